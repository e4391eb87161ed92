from pathlib import Path

import pytest

from corrembed import ItemAnnotation, RentalHistory

DATA_DIR = Path(__file__).parent / "data"


def ann(item_id, *tags):
    """Shorthand: ann("a", ("Color", "Red"), ...)."""
    return ItemAnnotation(item_id=item_id, tags=frozenset(tags))


def hist(customer_id, *item_ids):
    return RentalHistory(customer_id=customer_id, item_ids=tuple(item_ids))


@pytest.fixture
def color_vocab():
    """Two-color vocabulary: dims [(Color, Blue), (Color, Red)]."""
    from corrembed import vocabulary_from_pairs

    return vocabulary_from_pairs([("Color", "Blue"), ("Color", "Red")])


@pytest.fixture
def tag_table_path():
    return DATA_DIR / "tag_table_annotations.jsonl"
