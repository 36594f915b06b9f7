import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from persheat.complex import (
    DuplicateSimplex,
    LengthMismatch,
    MissingFace,
    NotMonotone,
    build_complex,
    filtration_order,
    monotone_repair,
    monotone_repair_batch,
    read_filtration,
    validate_monotone,
    write_filtration,
)

from conftest import WORKED_NAMES, random_complex


def test_worked_example_shape(worked):
    K, w = worked
    assert K.k == 11
    assert list(K.dims) == [0] * 4 + [1] * 5 + [2] * 2
    assert K.index_of(["c", "a"]) == WORKED_NAMES.index("i")
    assert ("a", "d") in K
    assert ("b", "d") not in K
    assert validate_monotone(K, w)


def test_filtration_order_of_worked_example(worked):
    K, w = worked
    order = filtration_order(K, w)
    assert "".join(WORKED_NAMES[i] for i in order) == "abcedgfhijk"


def test_ties_break_by_total_order():
    K = build_complex([["x"], ["y"], ["x", "y"]])
    assert list(filtration_order(K, [1.0, 1.0, 1.0])) == [0, 1, 2]


def test_missing_face_and_duplicates():
    with pytest.raises(MissingFace):
        build_complex([["a"], ["a", "b"]])
    with pytest.raises(DuplicateSimplex):
        build_complex([["a"], ["a"]])


def test_length_and_monotonicity_errors(worked):
    K, w = worked
    with pytest.raises(LengthMismatch):
        filtration_order(K, w[:-1])
    bad = w.copy()
    bad[WORKED_NAMES.index("e")] = -1.0
    assert not validate_monotone(K, bad)
    with pytest.raises(NotMonotone):
        filtration_order(K, bad)


def test_repair_is_identity_on_monotone(worked):
    K, w = worked
    assert np.array_equal(monotone_repair(K, w), w)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_repair_properties(seed):
    rng = np.random.default_rng(seed)
    K = random_complex(rng)
    x = rng.normal(size=K.k)
    w = monotone_repair(K, x)
    assert validate_monotone(K, w)
    assert np.all(w >= x)
    assert np.array_equal(monotone_repair(K, w), w)
    X = rng.normal(size=(5, K.k))
    B = monotone_repair_batch(K, X)
    for row, xr in zip(B, X):
        assert np.array_equal(row, monotone_repair(K, xr))


def test_filtration_file_round_trip(tmp_path, worked):
    K, w = worked
    w = w + np.array([0.1] * K.k) / 3.0
    path = tmp_path / "f.txt"
    write_filtration(path, K, w)
    K2, w2 = read_filtration(path)
    assert [s.vertices for s in K2] == [s.vertices for s in K]
    assert np.array_equal(w2, w)
