import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrembed import (
    CategoryEntropy,
    CategoryWeights,
    DataError,
    category_entropy,
    cosine,
    encode,
    entropies_by_category,
    tag_weights,
    tag_weights_theoretical,
    vocabulary_from_pairs,
)

from conftest import ann, hist


def _annotations(*anns):
    return {a.item_id: a for a in anns}


# -- category_entropy ----------------------------------------------------------


def test_entropy_single_tag_customer_is_zero():
    by_id = _annotations(ann("i1", ("Pattern", "Dots")), ann("i2", ("Pattern", "Dots")))
    e = category_entropy([hist("c1", "i1", "i2", "i1")], by_id, "Pattern")
    assert e.value == 0.0
    assert e.customers_counted == 1


def test_entropy_uniform_four_colors_is_ln4():
    by_id = _annotations(
        ann("r", ("Color", "Red")),
        ann("g", ("Color", "Green")),
        ann("b", ("Color", "Blue")),
        ann("y", ("Color", "Yellow")),
    )
    e = category_entropy([hist("c1", "r", "g", "b", "y")], by_id, "Color")
    assert e.value == pytest.approx(math.log(4), abs=1e-12)


def test_entropy_two_customers_hand_evaluated():
    # one all-Red customer (0), one uniform Red/Blue customer (ln 2)
    by_id = _annotations(ann("r", ("Color", "Red")), ann("b", ("Color", "Blue")))
    histories = [hist("c1", "r", "r", "r"), hist("c2", "r", "b")]
    e = category_entropy(histories, by_id, "Color")
    assert e.value == pytest.approx(0.3465735902799726, abs=1e-12)
    assert e.customers_counted == 2


def test_entropy_no_signal_marker():
    by_id = _annotations(ann("r", ("Color", "Red")))
    e = category_entropy([hist("c1", "r")], by_id, "Pattern")
    assert e.value is None
    assert e.customers_counted == 0


def test_entropy_skips_customers_without_category():
    by_id = _annotations(ann("r", ("Color", "Red")), ann("p", ("Pattern", "Dots")))
    histories = [hist("c1", "r"), hist("c2", "p")]
    e = category_entropy(histories, by_id, "Color")
    assert e.customers_counted == 1
    assert e.value == 0.0


def test_entropy_warns_on_unknown_item_ids():
    by_id = _annotations(ann("r", ("Color", "Red")))
    with pytest.warns(UserWarning, match="no annotation"):
        e = category_entropy([hist("c1", "r", "mystery")], by_id, "Color")
    assert e.value == 0.0


def test_entropy_invariant_under_permutation():
    by_id = _annotations(
        ann("r", ("Color", "Red")),
        ann("b", ("Color", "Blue")),
        ann("g", ("Color", "Green")),
    )
    h1 = [hist("c1", "r", "b", "g"), hist("c2", "r", "r", "b")]
    h2 = [hist("c2", "b", "r", "r"), hist("c1", "g", "b", "r")]
    assert (
        category_entropy(h1, by_id, "Color").value
        == category_entropy(h2, by_id, "Color").value
    )


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=2, max_value=5))
def test_entropy_invariant_under_history_duplication(k):
    by_id = _annotations(
        ann("r", ("Color", "Red")),
        ann("b", ("Color", "Blue")),
    )
    base = ("r", "b", "b")
    once = category_entropy([hist("c", *base)], by_id, "Color")
    many = category_entropy([hist("c", *(base * k))], by_id, "Color")
    assert many.value == pytest.approx(once.value, abs=1e-12)


# -- tag_weights -----------------------------------------------------------------


def _ce(cat, value, counted=1):
    return CategoryEntropy(category=cat, value=value, customers_counted=counted)


def test_weights_endpoints():
    w = tag_weights([_ce("A", 0.0), _ce("B", math.log(2))])
    assert w["A"] == 1.0
    assert w["B"] == 0.0


def test_weights_all_equal_entropies_degenerate():
    w = tag_weights([_ce("A", 0.7), _ce("B", 0.7), _ce("C", 0.7)])
    assert set(w.values()) == {1.0}


def test_weights_midpoint_hand_evaluated():
    w = tag_weights([_ce("A", 0.0), _ce("B", 0.5), _ce("C", 1.0)])
    assert w["A"] == 1.0
    assert w["B"] == pytest.approx(0.5, abs=1e-15)
    assert w["C"] == 0.0


def test_weights_no_signal_category_warns_and_gets_one():
    with pytest.warns(UserWarning, match="no rental-history signal"):
        w = tag_weights([_ce("A", 0.2), _ce("B", 0.9), _ce("C", None, counted=0)])
    assert w["C"] == 1.0


def test_weights_floor():
    w = tag_weights([_ce("A", 0.0), _ce("B", 1.0)], floor=0.05)
    assert w["B"] == 0.05
    assert w["A"] == 1.0


def test_weights_empty_input():
    with pytest.raises(DataError):
        tag_weights([])


def test_weights_duplicate_category():
    with pytest.raises(DataError, match="duplicate"):
        tag_weights([_ce("A", 0.1), _ce("A", 0.2)])


def test_weights_antitone_in_entropy():
    rng = np.random.default_rng(0)
    for _ in range(20):
        values = rng.uniform(0, 3, size=6)
        es = [_ce(f"c{i}", float(v)) for i, v in enumerate(values)]
        w = tag_weights(es)
        for a in es:
            for b in es:
                if a.value <= b.value:
                    assert w[a.category] >= w[b.category]


def test_weights_log_base_invariant():
    # switching log base rescales every entropy by a constant; min-max
    # normalization cancels it, so the weights cannot move
    values = [0.3, 0.9, 1.7, 0.3, 2.4]
    es = [_ce(f"c{i}", v) for i, v in enumerate(values)]
    scaled = [_ce(f"c{i}", v / math.log(2)) for i, v in enumerate(values)]
    w1 = tag_weights(es)
    w2 = tag_weights(scaled)
    for c in w1:
        assert w2[c] == pytest.approx(w1[c], abs=1e-12)


def test_weights_stay_in_unit_interval():
    rng = np.random.default_rng(1)
    es = [_ce(f"c{i}", float(v)) for i, v in enumerate(rng.uniform(0, 5, size=9))]
    for v in tag_weights(es).values():
        assert 0.0 <= v <= 1.0


def test_weights_theoretical_max():
    es = [_ce("A", math.log(2) / 2), _ce("B", 0.0)]
    w = tag_weights_theoretical(es, {"A": 2, "B": 3})
    assert w["A"] == pytest.approx(0.5, abs=1e-12)
    assert w["B"] == 1.0


def test_weights_theoretical_single_tag_category():
    w = tag_weights_theoretical([_ce("A", 0.0)], {"A": 1})
    assert w["A"] == 1.0


def test_weights_theoretical_missing_size():
    with pytest.raises(DataError):
        tag_weights_theoretical([_ce("A", 0.1)], {})


def test_category_weights_validation():
    with pytest.raises(DataError):
        CategoryWeights({"A": 1.5})
    with pytest.raises(DataError):
        CategoryWeights({"A": -0.1})


def test_blue_blazer_closer_to_red_blazer_than_blue_jumpsuit():
    # with weight(Category) > weight(Color) > 0, shared garment type beats
    # shared color
    vocab = vocabulary_from_pairs(
        [
            ("Category", "Blazers"),
            ("Category", "Jumpsuits"),
            ("Color", "Blue"),
            ("Color", "Red"),
        ]
    )
    weights = {"Category": 1.0, "Color": 0.5}
    blue_blazer = encode(ann("bb", ("Color", "Blue"), ("Category", "Blazers")), vocab, weights)
    red_blazer = encode(ann("rb", ("Color", "Red"), ("Category", "Blazers")), vocab, weights)
    blue_jumpsuit = encode(
        ann("bj", ("Color", "Blue"), ("Category", "Jumpsuits")), vocab, weights
    )
    same_type = cosine(blue_blazer.values, red_blazer.values)
    same_color = cosine(blue_blazer.values, blue_jumpsuit.values)
    assert same_type > same_color


def test_entropies_by_category_covers_all_requested():
    by_id = _annotations(ann("r", ("Color", "Red"), ("Pattern", "Dots")))
    es = entropies_by_category([hist("c", "r")], by_id, ["Color", "Pattern", "Fit"])
    assert [e.category for e in es] == ["Color", "Pattern", "Fit"]
    assert es[2].value is None
