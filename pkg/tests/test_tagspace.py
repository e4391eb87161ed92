import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrembed import (
    DEFAULT_DROPPED_CATEGORIES,
    DataError,
    ItemAnnotation,
    build_tag_set,
    build_vocabulary,
    encode,
    vocabulary_from_pairs,
)
from corrembed.ingest import read_annotations

from conftest import ann

# Tag counts per category as printed in the published tag table, counted row
# by row by hand. 162 non-brand tags in total; 144 once the default dropped
# categories (Size, Shoe Size) are removed.
TAG_TABLE_CATEGORY_COUNTS = {
    "Material": 41,
    "Category": 22,
    "Color": 18,
    "Size": 12,
    "No category": 11,
    "Occasion": 11,
    "Sleeve": 7,
    "Embellishment": 7,
    "Neckline": 7,
    "Waist": 6,
    "Shoe Size": 6,
    "Pattern": 6,
    "Fit": 4,
    "Length": 4,
}


def test_build_vocabulary_drops_configured_categories():
    anns = [
        ann("a", ("Color", "Red")),
        ann("b", ("Color", "Blue")),
        ann("c", ("Size", "XL")),
    ]
    vocab = build_vocabulary(anns, dropped={"Size"})
    assert vocab.size == 2
    assert vocab.categories == ("Color",)


def test_build_vocabulary_without_dropping():
    anns = [
        ann("a", ("Color", "Red")),
        ann("b", ("Color", "Blue")),
        ann("c", ("Size", "XL")),
    ]
    vocab = build_vocabulary(anns, dropped=set())
    assert vocab.size == 3


def test_build_vocabulary_empty_input():
    with pytest.raises(DataError, match="no annotations"):
        build_vocabulary([])


def test_build_vocabulary_is_sorted_and_gapless():
    anns = [ann("a", ("B", "z"), ("A", "q"), ("B", "a"))]
    vocab = build_vocabulary(anns, dropped=set())
    assert vocab.tags == (("A", "q"), ("B", "a"), ("B", "z"))
    assert [vocab.index[t] for t in vocab.tags] == [0, 1, 2]


def test_published_tag_table_vocabulary(tag_table_path):
    anns = read_annotations(tag_table_path)
    full = build_vocabulary(anns, dropped=set())
    sizes = full.category_sizes()
    assert sizes == TAG_TABLE_CATEGORY_COUNTS
    assert full.size == 162

    default = build_vocabulary(anns)  # drops Size and Shoe Size
    assert default.size == 144
    assert set(default.categories) == set(TAG_TABLE_CATEGORY_COUNTS) - DEFAULT_DROPPED_CATEGORIES


def test_encode_basic(color_vocab):
    v = encode(ann("x", ("Color", "Red")), color_vocab)
    assert v.values.tolist() == [0.0, 1.0]


def test_encode_with_weights(color_vocab):
    v = encode(ann("x", ("Color", "Red")), color_vocab, weights={"Color": 0.5})
    assert v.values.tolist() == [0.0, 0.5]


def test_encode_only_dropped_tags_gives_zero_vector():
    anns = [ann("a", ("Color", "Red")), ann("b", ("Size", "XL"))]
    vocab = build_vocabulary(anns, dropped={"Size"})
    v = encode(ann("b", ("Size", "XL")), vocab)
    assert v.values.tolist() == [0.0]


def test_encode_unknown_tag_names_it(color_vocab):
    with pytest.raises(DataError, match="Green"):
        encode(ann("x", ("Color", "Green")), color_vocab)


def test_encode_missing_weight_defaults_to_one(color_vocab):
    v = encode(ann("x", ("Color", "Red")), color_vocab, weights={"Pattern": 0.2})
    assert v.values.tolist() == [0.0, 1.0]


def test_encode_idempotent_and_order_independent(color_vocab):
    a = ann("x", ("Color", "Red"), ("Color", "Blue"))
    b = ann("x", ("Color", "Blue"), ("Color", "Red"))
    assert encode(a, color_vocab).values.tolist() == encode(b, color_vocab).values.tolist()
    # duplicates collapse: frozenset semantics make this structural
    assert encode(a, color_vocab).values.tolist() == [1.0, 1.0]


def test_encode_dimension_always_matches_vocab(tag_table_path):
    anns = read_annotations(tag_table_path)
    vocab = build_vocabulary(anns)
    for a in anns:
        assert encode(a, vocab).values.shape == (vocab.size,)


@settings(max_examples=50, deadline=None)
@given(st.sets(st.tuples(st.sampled_from("ABC"), st.sampled_from("abcdef")), min_size=1))
def test_all_one_weights_equal_unweighted(tags):
    vocab = vocabulary_from_pairs([("A", x) for x in "abcdef"]
                                  + [("B", x) for x in "abcdef"]
                                  + [("C", x) for x in "abcdef"])
    a = ItemAnnotation(item_id="x", tags=frozenset(tags))
    ones = {c: 1.0 for c in "ABC"}
    np.testing.assert_array_equal(
        encode(a, vocab).values, encode(a, vocab, weights=ones).values
    )


def test_vocabulary_from_pairs_rejects_empty():
    with pytest.raises(DataError):
        vocabulary_from_pairs([("Size", "XL")], dropped={"Size"})


def test_build_tag_set_aligns_to_given_order(color_vocab):
    by_id = {
        "a": ann("a", ("Color", "Red")),
        "b": ann("b", ("Color", "Blue")),
    }
    ts = build_tag_set(["b", "a"], by_id, color_vocab)
    assert ts.item_ids == ("b", "a")
    assert ts.matrix.tolist() == [[1.0, 0.0], [0.0, 1.0]]


def test_build_tag_set_missing_annotation(color_vocab):
    by_id = {"a": ann("a", ("Color", "Red")), "b": ann("b", ("Color", "Blue"))}
    with pytest.raises(DataError, match="ghost"):
        build_tag_set(["a", "ghost"], by_id, color_vocab)


def test_annotation_rejects_empty_id():
    with pytest.raises(DataError):
        ItemAnnotation(item_id="", tags=frozenset())
