"""Naive single-threaded O(n^2) scoring oracle, pure Python on purpose.

Kept free of numpy so it shares no code path with the implementation it
checks. Double loops, plain floats, ascending index order.
"""

import math


def cosine(a, b):
    dot = 0.0
    na = 0.0
    nb = 0.0
    for x, y in zip(a, b):
        dot += x * y
        na += x * x
        nb += y * y
    return max(-1.0, min(1.0, dot / (math.sqrt(na) * math.sqrt(nb))))


def pearson(xs, ys):
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxy = sxx = syy = 0.0
    for x, y in zip(xs, ys):
        sxy += (x - mx) * (y - my)
        sxx += (x - mx) * (x - mx)
        syy += (y - my) * (y - my)
    if sxx == 0.0 or syy == 0.0:
        return None
    return max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))


def profile(rows, i, include_self=False):
    return [
        cosine(rows[i], rows[j])
        for j in range(len(rows))
        if include_self or j != i
    ]


def corr_embed_naive(img_rows, tag_rows, include_self=False):
    """Returns (mean, per_index list of float-or-None)."""
    n = len(img_rows)
    per_index = []
    for i in range(n):
        x = profile(tag_rows, i, include_self)
        y = profile(img_rows, i, include_self)
        per_index.append(pearson(x, y))
    defined = [r for r in per_index if r is not None]
    return math.fsum(defined) / len(defined), per_index
