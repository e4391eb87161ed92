"""Exact top-k similar-item retrieval over an embedding set.

Brute force by design: at the dataset scales this targets (tens of
thousands of rows), a full scan is fast enough even in production, and it
is exact. Ties break on ascending item id so rankings are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .simcore import EmbeddingSet, _unit_rows


@dataclass(frozen=True)
class NeighborList:
    """Ranked neighbors of one query item, descending similarity."""

    query_id: str
    neighbors: tuple[tuple[str, float], ...]


def top_k(s: EmbeddingSet, query_id: str, k: int) -> NeighborList:
    """The k most cosine-similar items to ``query_id`` (query excluded).

    k is clamped to n - 1. Unknown query ids raise DataError.
    """
    if k < 1:
        raise DataError(f"k must be >= 1, got {k}")
    qi = s.index_of(query_id)
    u = _unit_rows(s, "embedding")
    sims = np.clip(u[qi] @ u.T, -1.0, 1.0)
    ranked = sorted(
        ((s.item_ids[j], float(sims[j])) for j in range(s.n) if j != qi),
        key=lambda pair: (-pair[1], pair[0]),
    )
    return NeighborList(query_id=query_id, neighbors=tuple(ranked[: min(k, s.n - 1)]))
