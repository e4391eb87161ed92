"""Per-category entropy of customer rental histories and the derived weights.

A customer who keeps renting the same kind of tag within a category (always
"Dots", always "Stripes") produces low entropy there; a customer who roams
produces high entropy. Each category's entropy is the mean of the
per-customer entropies, counting only customers with at least one tag
occurrence in that category. Weights invert min-max-normalized entropy, so
the most consistent category gets weight 1 and the noisiest gets 0.

Natural log throughout: the normalization cancels the log base, so weights
are base-invariant (covered by a property test).
"""

from __future__ import annotations

import math
import warnings
from collections import Counter
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Iterable

from .errors import DataError
from .tagspace import ItemAnnotation


@dataclass(frozen=True)
class RentalHistory:
    """One customer's rented item ids, repeats allowed, order irrelevant."""

    customer_id: str
    item_ids: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "item_ids", tuple(str(i) for i in self.item_ids))


@dataclass(frozen=True)
class CategoryEntropy:
    """Mean per-customer entropy for one category.

    ``value`` is None when no customer had any occurrence in the category
    ("no signal"); the weights op turns that into weight 1.0 with a warning.
    """

    category: str
    value: float | None
    customers_counted: int


class CategoryWeights(Mapping):
    """Immutable category -> weight map with every weight in [0, 1]."""

    def __init__(self, by_category: Mapping[str, float]):
        w = {str(c): float(v) for c, v in by_category.items()}
        for c, v in w.items():
            if not 0.0 <= v <= 1.0 or not math.isfinite(v):
                raise DataError(f"weight for category '{c}' is {v}, expected [0, 1]")
        self._w = w

    def __getitem__(self, category: str) -> float:
        return self._w[category]

    def __iter__(self):
        return iter(self._w)

    def __len__(self) -> int:
        return len(self._w)

    def __repr__(self) -> str:
        return f"CategoryWeights({self._w!r})"

    def __eq__(self, other) -> bool:
        if isinstance(other, CategoryWeights):
            return self._w == other._w
        return Mapping.__eq__(self, other) if isinstance(other, Mapping) else NotImplemented

    def as_dict(self) -> dict[str, float]:
        return dict(self._w)


def _category_counts(
    history: RentalHistory,
    annotations: Mapping[str, ItemAnnotation],
    category: str,
    unknown: set[str],
) -> Counter:
    counts: Counter = Counter()
    for item_id in history.item_ids:
        ann = annotations.get(item_id)
        if ann is None:
            unknown.add(item_id)
            continue
        for c, t in ann.tags:
            if c == category:
                counts[t] += 1
    return counts


def category_entropy(
    histories: Iterable[RentalHistory],
    annotations: Mapping[str, ItemAnnotation],
    category: str,
) -> CategoryEntropy:
    """Mean per-customer Shannon entropy of one category's tag distribution.

    For each counted customer, tag occurrences across all rented items form
    a distribution within the category; its entropy is -sum p ln p. Customers
    with no occurrence in the category are not counted. Item ids without an
    annotation are reported via a warning and contribute nothing.
    """
    unknown: set[str] = set()
    per_customer: list[float] = []
    for h in histories:
        counts = _category_counts(h, annotations, category, unknown)
        total = sum(counts.values())
        if total == 0:
            continue
        ent = math.fsum(
            -(k / total) * math.log(k / total) for k in counts.values()
        )
        per_customer.append(ent)
    if unknown:
        sample = sorted(unknown)[:3]
        warnings.warn(
            f"{len(unknown)} rented item id(s) have no annotation "
            f"(e.g. {', '.join(sample)}); they were ignored"
        )
    if not per_customer:
        return CategoryEntropy(category=category, value=None, customers_counted=0)
    return CategoryEntropy(
        category=category,
        value=math.fsum(per_customer) / len(per_customer),
        customers_counted=len(per_customer),
    )


def entropies_by_category(
    histories: Iterable[RentalHistory],
    annotations: Mapping[str, ItemAnnotation],
    categories: Iterable[str],
) -> list[CategoryEntropy]:
    """category_entropy over several categories with one pass-through of inputs."""
    hs = list(histories)
    return [category_entropy(hs, annotations, c) for c in categories]


def tag_weights(
    entropies: Iterable[CategoryEntropy],
    floor: float = 0.0,
) -> CategoryWeights:
    """Invert min-max-normalized entropies into weights.

    weight(X) = 1 - (H(X) - min H) / (max H - min H), computed over the
    categories that carried signal. Degenerate cases:

    - all entropies equal: every weight is 1.0 (nothing discriminates,
      so nothing is down-weighted);
    - "no signal" categories get 1.0 with a warning.

    ``floor`` (in [0, 1]) lifts the minimum weight so the max-entropy
    category is not zeroed out entirely; the faithful default is 0.
    """
    es = list(entropies)
    if not es:
        raise DataError("no category entropies given")
    if not 0.0 <= floor <= 1.0:
        raise DataError(f"weight floor {floor} outside [0, 1]")
    seen = set()
    for e in es:
        if e.category in seen:
            raise DataError(f"duplicate entropy for category '{e.category}'")
        seen.add(e.category)

    signal = [e for e in es if e.value is not None]
    silent = [e for e in es if e.value is None]
    for e in silent:
        warnings.warn(
            f"category '{e.category}' has no rental-history signal; weight set to 1.0"
        )

    weights: dict[str, float] = {e.category: 1.0 for e in silent}
    if signal:
        lo = min(e.value for e in signal)
        hi = max(e.value for e in signal)
        for e in signal:
            if hi == lo:
                w = 1.0
            else:
                w = 1.0 - (e.value - lo) / (hi - lo)
            weights[e.category] = max(w, floor)
    return CategoryWeights(weights)


def tag_weights_theoretical(
    entropies: Iterable[CategoryEntropy],
    category_sizes: Mapping[str, int],
    floor: float = 0.0,
) -> CategoryWeights:
    """Alternative normalization against each category's maximum possible entropy.

    weight(X) = 1 - H(X) / ln|X|, where |X| is the category's tag count.
    Single-tag categories (ln|X| = 0 forces H = 0) get weight 1.0.
    """
    es = list(entropies)
    if not es:
        raise DataError("no category entropies given")
    if not 0.0 <= floor <= 1.0:
        raise DataError(f"weight floor {floor} outside [0, 1]")
    weights: dict[str, float] = {}
    for e in es:
        if e.value is None:
            warnings.warn(
                f"category '{e.category}' has no rental-history signal; weight set to 1.0"
            )
            weights[e.category] = 1.0
            continue
        size = category_sizes.get(e.category)
        if size is None or size < 1:
            raise DataError(f"no tag count known for category '{e.category}'")
        hmax = math.log(size)
        if hmax == 0.0:
            weights[e.category] = 1.0
        else:
            w = 1.0 - min(e.value / hmax, 1.0)
            weights[e.category] = max(w, floor)
    return CategoryWeights(weights)
