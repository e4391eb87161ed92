"""The numerical heart: cosine-similarity profiles, per-item Pearson
correlation, and the CorrEmbed mean.

The score of an item is the Pearson correlation between two similarity
profiles: the cosine similarities of its tag vector to every other item's
tag vector, and the cosine similarities of its image embedding to every
other item's embedding. CorrEmbed is the mean of those correlations over
the sampled items, skipping items whose profile is constant (undefined
correlation) rather than imputing a value for them.

All arithmetic is 64-bit. Per-item work is independent, so scoring can run
on a thread pool; every profile and every mean is reduced in ascending
index order, so results are identical regardless of thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DataError, DegenerateInputError


def _frozen_matrix(item_ids, matrix, what: str):
    ids = tuple(str(i) for i in item_ids)
    m = np.array(matrix, dtype=np.float64, order="C")
    if m.ndim != 2:
        raise DataError(f"{what} matrix must be 2-dimensional, got shape {m.shape}")
    if m.shape[0] != len(ids):
        raise DataError(
            f"{what} has {m.shape[0]} rows but {len(ids)} item ids"
        )
    if m.shape[0] < 2:
        raise DataError(f"{what} needs n >= 2 items, got {m.shape[0]}")
    if not np.isfinite(m).all():
        bad = int(np.flatnonzero(~np.isfinite(m).all(axis=1))[0])
        raise DataError(f"{what} row for item '{ids[bad]}' has non-finite entries")
    seen = set()
    for i in ids:
        if i in seen:
            raise DataError(f"duplicate item id '{i}' in {what}")
        seen.add(i)
    m.setflags(write=False)
    return ids, m


@dataclass(frozen=True)
class EmbeddingSet:
    """n x d matrix of image embeddings with aligned item identifiers.

    Immutable after construction; rows are stored float64 regardless of the
    ingested precision.
    """

    item_ids: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        ids, m = _frozen_matrix(self.item_ids, self.matrix, type(self).__name__)
        object.__setattr__(self, "item_ids", ids)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return len(self.item_ids)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])

    def index_of(self, item_id: str) -> int:
        try:
            return self.item_ids.index(item_id)
        except ValueError:
            raise DataError(f"unknown item id '{item_id}'") from None


class TagSet(EmbeddingSet):
    """n x T matrix of stacked (optionally category-weighted) tag vectors."""


@dataclass(frozen=True)
class SimilarityProfile:
    """Cosine similarities of one query row against the rest of its set."""

    query_index: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class CorrEmbedResult:
    """Per-item correlations plus their mean.

    ``per_item`` maps item id -> correlation, or None where the correlation
    is undefined (constant profile); ``mean`` averages exactly the defined
    values; ``n_scored`` counts them and ``n_skipped`` the undefined ones.
    """

    per_item: dict[str, float | None]
    mean: float
    n_scored: int
    n_skipped: int


def cosine(a, b) -> float:
    """Cosine similarity of two vectors, clamped to [-1, 1].

    Raises DataError naming the offending side if either vector has zero
    norm (an untagged item or an all-zero embedding).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DataError(f"cosine operands differ in shape: {a.shape} vs {b.shape}")
    na = math.sqrt(float(a @ a))
    nb = math.sqrt(float(b @ b))
    if na == 0.0:
        raise DataError("left cosine operand has zero norm")
    if nb == 0.0:
        raise DataError("right cosine operand has zero norm")
    return min(1.0, max(-1.0, float(a @ b) / (na * nb)))


def _unit_rows(s: EmbeddingSet, label: str) -> np.ndarray:
    norms = np.linalg.norm(s.matrix, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise DataError(
            f"zero-norm {label} vector for item '{s.item_ids[int(zero[0])]}'"
        )
    return s.matrix / norms[:, None]


def similarity_profile(
    s: EmbeddingSet, i: int, include_self: bool = False
) -> SimilarityProfile:
    """Cosines of row ``i`` against rows j in ascending j order.

    With ``include_self`` false (the default) the j = i entry is omitted,
    so the profile has n - 1 entries.
    """
    if not 0 <= i < s.n:
        raise DataError(f"query index {i} out of range for n={s.n}")
    u = _unit_rows(s, "row")
    vals = np.clip(u[i] @ u.T, -1.0, 1.0)
    if not include_self:
        vals = np.delete(vals, i)
    return SimilarityProfile(query_index=i, values=vals)


def pearson(x, y) -> float | None:
    """Sample Pearson correlation, or None when either side has zero variance."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise DataError(f"pearson operands differ in length: {x.shape} vs {y.shape}")
    if x.ndim != 1 or x.size < 2:
        raise DataError("pearson needs two 1-d vectors of length >= 2")
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx == 0.0 or syy == 0.0:
        return None
    r = float(xc @ yc) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def _check_alignment(images: EmbeddingSet, tags: TagSet) -> None:
    if images.n != tags.n:
        raise DataError(
            f"embedding set has {images.n} items but tag set has {tags.n}"
        )
    for pos, (a, b) in enumerate(zip(images.item_ids, tags.item_ids)):
        if a != b:
            raise DataError(
                f"item_ids mismatch at position {pos}: embeddings have '{a}', tags have '{b}'"
            )


def _sample_indices(n: int, sample, seed) -> np.ndarray:
    if sample == "all" or sample is None:
        return np.arange(n)
    k = int(sample)
    if not 1 <= k <= n:
        raise DataError(f"sample size {k} out of range for n={n}")
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n, size=k, replace=False))


def corr_embed(
    images: EmbeddingSet,
    tags: TagSet,
    sample="all",
    seed: int | None = None,
    include_self: bool = False,
    threads: int = 1,
) -> CorrEmbedResult:
    """Mean per-item correlation between tag and embedding similarity profiles.

    Args:
        images: embedding set, item order aligned with ``tags``.
        tags: (weighted) tag-vector set.
        sample: "all", or an integer k of items to sample without replacement.
        seed: RNG seed for sampling (ignored for sample="all").
        include_self: keep the j = i pair in each profile. Off by default
            because the constant (1, 1) self-point inflates the correlation.
        threads: worker threads for the per-item loop. Results are
            bit-identical for any thread count.

    Raises:
        DataError: misaligned inputs, zero-norm rows, or a bad sample size.
        DegenerateInputError: every sampled item has an undefined correlation.
    """
    _check_alignment(images, tags)
    n = images.n
    if not include_self and n < 3:
        raise DataError("n >= 3 required when self-pairs are excluded")
    u_img = _unit_rows(images, "embedding")
    u_tag = _unit_rows(tags, "tag")
    indices = _sample_indices(n, sample, seed)

    def corr_at(i: int) -> float | None:
        x = np.clip(u_tag[i] @ u_tag.T, -1.0, 1.0)
        y = np.clip(u_img[i] @ u_img.T, -1.0, 1.0)
        if not include_self:
            x = np.delete(x, i)
            y = np.delete(y, i)
        return pearson(x, y)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            corrs = list(pool.map(corr_at, indices))
    else:
        corrs = [corr_at(int(i)) for i in indices]

    per_item: dict[str, float | None] = {
        images.item_ids[int(i)]: r for i, r in zip(indices, corrs)
    }
    defined = [r for r in corrs if r is not None]
    if not defined:
        raise DegenerateInputError(
            "degenerate tag space: every sampled item has a constant similarity profile"
        )
    # fsum: exact, order-independent-safe reduction over the ascending-index list
    mean = math.fsum(defined) / len(defined)
    return CorrEmbedResult(
        per_item=per_item,
        mean=mean,
        n_scored=len(defined),
        n_skipped=len(corrs) - len(defined),
    )
