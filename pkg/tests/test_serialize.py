import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from selftesting import builtins as bi
from selftesting.errors import InvalidInputError
from selftesting.serialize import (fmt12, game_from_json, game_to_json, load_json, matrix_from_json,
                                   matrix_to_json, strategy_from_json, strategy_to_json, to_jsonable)
from selftesting.strategies import random_projective_model


@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_matrix_round_trip(m, n, seed):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
    assert np.array_equal(matrix_from_json(json.loads(json.dumps(matrix_to_json(M)))), M)


def test_matrix_errors_carry_path():
    with pytest.raises(InvalidInputError, match=r"m\.data\[1\]"):
        matrix_from_json({"rows": 1, "cols": 2, "data": [[1, 0], "x"]}, "m")
    with pytest.raises(InvalidInputError, match="missing field 'cols'"):
        matrix_from_json({"rows": 1, "data": []}, "m")
    with pytest.raises(InvalidInputError, match="expected 4 entries"):
        matrix_from_json({"rows": 2, "cols": 2, "data": [1]}, "m")


@pytest.mark.parametrize("name", ["chsh", "k3-coloring", "chsh-parallel-2"])
def test_game_round_trip(name):
    G = bi.builtin_game(name)
    H = game_from_json(json.loads(json.dumps(game_to_json(G))))
    g, h = G.to_game(), H.to_game()
    assert np.array_equal(g.V, h.V) and np.allclose(g.mu, h.mu)


def test_unknown_game_type():
    with pytest.raises(InvalidInputError, match=r"game\.type"):
        game_from_json({"type": "bogus"})


def test_strategy_round_trip(rng):
    S = random_projective_model((2, 2, 2, 2), 2, 3, rng)
    T = strategy_from_json(json.loads(json.dumps(strategy_to_json(S, bi.chsh()))), game=bi.chsh())
    assert np.allclose(T.correlation().p, S.correlation().p, atol=1e-14)


def test_strategy_missing_question():
    obj = strategy_to_json(bi.chsh_ideal(), bi.chsh())
    del obj["bob"]["1"]
    with pytest.raises(InvalidInputError, match=r"strategy\.bob: missing question '1'"):
        strategy_from_json(obj, game=bi.chsh())


def test_strategy_dimension_mismatch():
    obj = strategy_to_json(bi.chsh_ideal(), bi.chsh())
    obj["dA"] = 3
    with pytest.raises(InvalidInputError, match=r"strategy\.dA"):
        strategy_from_json(obj)


def test_load_json_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"a": 1,\n "b": }')
    with pytest.raises(InvalidInputError, match="line 2 column"):
        load_json(str(p))


def test_fmt12_and_jsonable():
    assert fmt12(np.sqrt(2)) == "1.41421356237"
    assert to_jsonable({"x": np.array([1 + 0j]), 1: np.float64(0.5)}) == {"x": [1.0], "1": 0.5}
    assert to_jsonable(np.array([1j])) == [[0.0, 1.0]]
