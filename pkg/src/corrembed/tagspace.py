"""Tag vocabulary construction and indicator-vector encoding.

The vocabulary is derived from the annotation data itself: every distinct
(category, tag) pair observed, minus configured dropped categories, ordered
lexicographically so two runs over the same data index tags identically.
Items are encoded as indicator vectors over that space, optionally scaled
per category by entropy-derived weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .errors import DataError
from .simcore import TagSet

# Categories not necessarily visible in product photos; dropped by default.
DEFAULT_DROPPED_CATEGORIES = frozenset({"Size", "Shoe Size"})


@dataclass(frozen=True)
class ItemAnnotation:
    """One item's human-assigned tags, as a set of (category, name) pairs."""

    item_id: str
    tags: frozenset[tuple[str, str]]

    def __post_init__(self):
        if not self.item_id:
            raise DataError("annotation with empty item_id")
        tags = frozenset((str(c), str(t)) for c, t in self.tags)
        object.__setattr__(self, "tags", tags)


@dataclass(frozen=True)
class TagVocabulary:
    """Ordered tag list partitioned into named categories.

    ``tags`` holds (category, name) pairs sorted lexicographically;
    dimension i of every tag vector corresponds to ``tags[i]``.
    """

    categories: tuple[str, ...]
    tags: tuple[tuple[str, str], ...]
    dropped: frozenset[str] = frozenset()
    index: Mapping[tuple[str, str], int] = field(init=False, repr=False)

    def __post_init__(self):
        idx: dict[tuple[str, str], int] = {}
        for i, pair in enumerate(self.tags):
            if pair in idx:
                raise DataError(f"duplicate tag {pair!r} in vocabulary")
            if pair[0] in self.dropped:
                raise DataError(f"tag {pair!r} belongs to a dropped category")
            idx[pair] = i
        cats = {c for c, _ in self.tags}
        if cats != set(self.categories):
            raise DataError("vocabulary categories do not match its tag list")
        object.__setattr__(self, "index", MappingProxyType(idx))

    @property
    def size(self) -> int:
        """Tag-vector dimensionality T."""
        return len(self.tags)

    def category_sizes(self) -> dict[str, int]:
        sizes: dict[str, int] = {c: 0 for c in self.categories}
        for c, _ in self.tags:
            sizes[c] += 1
        return sizes


@dataclass(frozen=True)
class ItemTagVector:
    """One item's dense tag vector over a fixed vocabulary."""

    item_id: str
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def build_vocabulary(
    annotations: Iterable[ItemAnnotation],
    dropped: Iterable[str] = DEFAULT_DROPPED_CATEGORIES,
) -> TagVocabulary:
    """Collect the distinct (category, tag) pairs observed in the data.

    Tags in dropped categories contribute no dimensions. Order is
    lexicographic by (category, tag), so the vocabulary is reproducible.
    """
    dropped = frozenset(dropped)
    anns = list(annotations)
    if not anns:
        raise DataError("no annotations")
    pairs = sorted({pair for a in anns for pair in a.tags if pair[0] not in dropped})
    categories = tuple(dict.fromkeys(c for c, _ in pairs))
    return TagVocabulary(categories=categories, tags=tuple(pairs), dropped=dropped)


def vocabulary_from_pairs(
    pairs: Iterable[tuple[str, str]],
    dropped: Iterable[str] = (),
) -> TagVocabulary:
    """Build a vocabulary from an explicit tag list (sorted, dropped removed)."""
    dropped = frozenset(dropped)
    kept = sorted({(str(c), str(t)) for c, t in pairs if c not in dropped})
    if not kept:
        raise DataError("no tags left after dropping categories")
    categories = tuple(dict.fromkeys(c for c, _ in kept))
    return TagVocabulary(categories=categories, tags=tuple(kept), dropped=dropped)


def encode(
    annotation: ItemAnnotation,
    vocab: TagVocabulary,
    weights: Mapping[str, float] | None = None,
) -> ItemTagVector:
    """Encode one annotation as a (weighted) indicator vector.

    Unweighted components are 0/1; with ``weights``, the component for a tag
    in category X is weight(X) (missing categories default to 1.0). Tags in
    dropped categories are silently ignored; any other tag absent from the
    vocabulary raises DataError naming it, since that signals a
    vocabulary/data mismatch.
    """
    v = np.zeros(vocab.size, dtype=np.float64)
    for pair in annotation.tags:
        category = pair[0]
        if category in vocab.dropped:
            continue
        i = vocab.index.get(pair)
        if i is None:
            raise DataError(
                f"tag ({category!r}, {pair[1]!r}) of item '{annotation.item_id}' "
                "is not in the vocabulary"
            )
        v[i] = 1.0 if weights is None else float(weights.get(category, 1.0))
    return ItemTagVector(item_id=annotation.item_id, values=v)


def tag_matrix(
    annotations: Iterable[ItemAnnotation],
    vocab: TagVocabulary,
    weights: Mapping[str, float] | None = None,
) -> np.ndarray:
    """Stack encodings of ``annotations`` (in the given order) into an n x T matrix."""
    rows = [encode(a, vocab, weights).values for a in annotations]
    if not rows:
        raise DataError("no annotations")
    return np.vstack(rows)


def build_tag_set(
    item_ids: Iterable[str],
    annotations_by_id: Mapping[str, ItemAnnotation],
    vocab: TagVocabulary,
    weights: Mapping[str, float] | None = None,
) -> TagSet:
    """Encode the annotations for ``item_ids``, preserving that id order.

    Raises DataError for ids without an annotation (embeddings and tag data
    out of sync).
    """
    ids = list(item_ids)
    missing = [i for i in ids if i not in annotations_by_id]
    if missing:
        raise DataError(
            f"{len(missing)} item ids have no annotation (first: '{missing[0]}')"
        )
    m = tag_matrix((annotations_by_id[i] for i in ids), vocab, weights)
    return TagSet(tuple(ids), m)
