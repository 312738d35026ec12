import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from senselearn.errors import ParseError, RaggedRow, UnknownColumn
from senselearn.events import ObservationSet
from senselearn.io import load_dataset, save_dataset
from worked import TOY_ROWS_1B, write_csv


def test_toy_file_is_fully_unlabeled(tmp_path):
    path = write_csv(tmp_path / "toy.csv", ["F1", "F2", "S"], [(a, b, "?") for a, b in TOY_ROWS_1B])
    ds = load_dataset(path, class_col="S", k=3)
    assert ds.data.n_rows == 10
    assert ds.data.is_fully_unlabeled
    assert ds.data.schema.class_cardinality == 3
    # levels numbered by first appearance: "1" -> 0, "2" -> 1
    assert ds.data.features.tolist() == (np.array(TOY_ROWS_1B) - 1).tolist()


def test_labeled_file_with_gold(tmp_path):
    rows = [("x", "p", "a"), ("y", "q", "b"), ("x", "q", "a")]
    path = write_csv(tmp_path / "lab.csv", ["W", "S", "gold"], rows)
    ds = load_dataset(path, class_col="S", gold_col="gold")
    assert ds.data.is_fully_labeled
    assert ds.data.schema.names == ("W", "S")
    assert ds.gold.tolist() == [0, 1, 0] and ds.gold_levels == ("a", "b")


@st.composite
def dense_sets(draw):
    # every level of every column is used at least once
    n_vars = draw(st.integers(1, 4))
    n = draw(st.integers(1, 15))
    raw = np.array([[draw(st.integers(0, 3)) for _ in range(n_vars)] for _ in range(n)])
    cols = [np.unique(c, return_inverse=True)[1] for c in raw.T]
    cards = tuple(int(c.max()) + 1 for c in cols)
    return ObservationSet.from_rows(np.array(cols).T, cards, tuple(f"V{i}" for i in range(n_vars)))


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(dense_sets())
def test_round_trip(tmp_path, data):
    path = tmp_path / "rt.csv"
    save_dataset(path, data)
    back = load_dataset(path).data
    assert back.schema.names == data.schema.names
    assert back.schema.cardinalities == data.schema.cardinalities
    assert np.array_equal(back.values, data.values)


def test_missing_mark_outside_class_column(tmp_path):
    path = write_csv(tmp_path / "bad.csv", ["F1", "S"], [(1, 1), ("?", 2)])
    with pytest.raises(ParseError) as info:
        load_dataset(path, class_col="S")
    assert info.value.line == 3


def test_ragged_row(tmp_path):
    path = write_csv(tmp_path / "bad.csv", ["F1", "S"], [(1, 1), (1, 2, 3)])
    with pytest.raises(RaggedRow):
        load_dataset(path, class_col="S")


def test_unknown_column(tmp_path):
    path = write_csv(tmp_path / "ok.csv", ["F1", "S"], [(1, 1)])
    with pytest.raises(UnknownColumn):
        load_dataset(path, class_col="T")


def test_empty_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(ParseError):
        load_dataset(path)
