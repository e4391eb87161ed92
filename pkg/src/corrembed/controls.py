"""Control baselines: shape-preserving randomizations that establish the
chance-level score any real embedding must beat.

Four kinds. Random embeddings replace the matrix with uniform [0, 1) noise
of the same shape (nonnegative entries keep cosine slightly positive, which
matches the small positive published control scores). Random tags redraw
each indicator independently at a target density, redrawing rows that come
out all-zero. The two shuffles permute rows while keeping item ids fixed,
breaking the item association without touching the values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .simcore import CorrEmbedResult, EmbeddingSet, TagSet, corr_embed

CONTROL_KINDS = (
    "random_embeddings",
    "random_tags",
    "shuffle_embeddings",
    "shuffle_tags",
)


def random_embeddings(template: EmbeddingSet, seed: int) -> EmbeddingSet:
    """Same shape and ids as ``template``; entries i.i.d. uniform on [0, 1)."""
    rng = np.random.default_rng(seed)
    return EmbeddingSet(template.item_ids, rng.random((template.n, template.dim)))


def nonzero_density(matrix: np.ndarray) -> float:
    """Fraction of nonzero entries; the default density for random tags."""
    m = np.asarray(matrix)
    return float(np.count_nonzero(m) / m.size)


def random_tags(
    template: TagSet, density: float | None = None, seed: int | None = None
) -> TagSet:
    """Binary tag matrix of the template's shape with P(1) = density.

    density defaults to the template's nonzero fraction so the control
    matches the data's sparsity. Rows that come out all-zero are redrawn
    (a tag vector with no tags cannot be cosine-compared).
    """
    if density is None:
        density = nonzero_density(template.matrix)
    if not 0.0 < density < 1.0:
        raise DataError(f"tag density {density} outside (0, 1)")
    rng = np.random.default_rng(seed)
    n, t = template.n, template.dim
    m = (rng.random((n, t)) < density).astype(np.float64)
    while True:
        zero = np.flatnonzero(m.sum(axis=1) == 0.0)
        if zero.size == 0:
            break
        m[zero] = (rng.random((zero.size, t)) < density).astype(np.float64)
    return TagSet(template.item_ids, m)


def shuffle_assignment(s, seed: int):
    """Permute rows uniformly at random; item ids stay put (association broken).

    Returns the same type as ``s`` (EmbeddingSet or TagSet). The identity
    permutation is permitted; reports average over seeds instead.
    """
    rng = np.random.default_rng(seed)
    perm = rng.permutation(s.n)
    return type(s)(s.item_ids, s.matrix[perm])


@dataclass(frozen=True)
class ControlSpec:
    """One fully reproducible control run."""

    kind: str
    seed: int
    density: float | None = None

    def __post_init__(self):
        if self.kind not in CONTROL_KINDS:
            raise DataError(
                f"unknown control kind '{self.kind}' (expected one of {CONTROL_KINDS})"
            )

    def apply(
        self, images: EmbeddingSet, tags: TagSet
    ) -> tuple[EmbeddingSet, TagSet]:
        """Produce the (images, tags) pair with this control substituted in."""
        if self.kind == "random_embeddings":
            return random_embeddings(images, self.seed), tags
        if self.kind == "random_tags":
            return images, random_tags(tags, self.density, self.seed)
        if self.kind == "shuffle_embeddings":
            return shuffle_assignment(images, self.seed), tags
        return images, shuffle_assignment(tags, self.seed)


def control_score(
    spec: ControlSpec,
    images: EmbeddingSet,
    tags: TagSet,
    **corr_kwargs,
) -> CorrEmbedResult:
    """Score one control configuration with corr_embed."""
    imgs, tgs = spec.apply(images, tags)
    return corr_embed(imgs, tgs, **corr_kwargs)
