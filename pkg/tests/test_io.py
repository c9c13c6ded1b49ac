import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mct.io import FormatError, dump_json, load_json, matrix_from_json, matrix_to_json, \
    tuple_from_json, tuple_to_json
from mct.linalg import MatrixTuple

from conftest import seeds


@given(seeds, st.integers(1, 4), st.integers(1, 3))
def test_tuple_round_trip_is_bit_identical(seed, n, d):
    rng = np.random.default_rng(seed)
    T = MatrixTuple(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for _ in range(d))
    back = tuple_from_json(json.loads(json.dumps(tuple_to_json(T))))
    for a, b in zip(T, back):
        assert np.array_equal(a, b)


def test_real_arrays_are_accepted():
    assert np.array_equal(matrix_from_json([[1, 2], [3, 4]]), np.array([[1, 2], [3, 4]]))
    assert matrix_to_json(np.array([[1 + 2j]])) == [[[1.0, 2.0]]]


@pytest.mark.parametrize("obj", [
    {"d": 2, "n": 1, "matrices": [[[[1, 0]]]]},
    {"d": 1, "n": 2, "matrices": [[[[1, 0]]]]},
    {"matrices": "nope"},
    [1, 2],
])
def test_malformed_tuples(obj):
    with pytest.raises(FormatError):
        tuple_from_json(obj)


def test_load_rejects_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(FormatError):
        load_json(p)
    with pytest.raises(FormatError):
        load_json(tmp_path / "missing.json")


def test_dump_and_load(tmp_path):
    p = tmp_path / "x.json"
    dump_json({"a": 1}, p)
    assert load_json(p) == {"a": 1}
