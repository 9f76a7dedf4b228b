from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import PHI2, X, Y, Z, commutant_dim_rank
from selftesting.algebras import (Representation, TracialState, clifford_rep,
                                  commutant_dim, eval_poly, gns_from_irrep, random_irrep, synchronous_pair,
                                  xor_pair)
from selftesting.builtins import chsh_ideal, chsh_pair, chsh_xor, k3_coloring
from selftesting.errors import DegeneracyError, InvalidInputError, PreconditionError, ValidationError
from selftesting.games import SyncGame, XorGame
from selftesting.polynomials import StarPolynomial

b0, b1 = StarPolynomial.gen("b0"), StarPolynomial.gen("b1")
PAULI = Representation.unitary({"b0": X, "b1": Z})


def test_eval_constant_and_anticommutator():
    assert np.allclose(eval_poly(PAULI, StarPolynomial.const(1)), np.eye(2))
    assert np.allclose(eval_poly(PAULI, b0 * b1 + b1 * b0), 0)
    O = eval_poly(PAULI, (b0 + b1) / np.sqrt(2))
    assert np.allclose(O, (X + Z) / np.sqrt(2))
    assert np.allclose(O @ O, np.eye(2), atol=1e-15)


def test_eval_missing_generator():
    with pytest.raises(InvalidInputError):
        eval_poly(PAULI, StarPolynomial.gen("b2"))


@given(st.integers(0, 2**32 - 1))
def test_eval_linear_and_adjoint(seed):
    rng = np.random.default_rng(seed)
    rep = random_irrep(3, rng)
    u0, u1 = StarPolynomial.gen("u0"), StarPolynomial.gen("u1")
    c = complex(*rng.standard_normal(2))
    p = c * u0 * u1.adjoint() + u1 * u1 - 2.0
    q = u0.adjoint() * u1 + 0.5j
    assert np.allclose(rep.eval(p + 3 * q), rep.eval(p) + 3 * rep.eval(q), atol=1e-12)
    assert np.allclose(rep.eval(p.adjoint()), rep.eval(p).conj().T, atol=1e-12)


def test_clifford_examples():
    c2 = clifford_rep(2)
    assert np.allclose(c2["b0"], X) and np.allclose(c2["b1"], Z)
    c1 = clifford_rep(1)
    assert c1.dim == 1 and np.allclose(c1["b0"], 1)
    c4 = clifford_rep(4)
    expected = [np.kron(X, np.eye(2)), np.kron(Z, np.eye(2)), np.kron(Y, X), np.kron(Y, Z)]
    for k, E in enumerate(expected):
        assert np.allclose(c4[f"b{k}"], E)


@pytest.mark.parametrize("r", range(1, 8))
def test_clifford_relations(r):
    rep = clifford_rep(r)
    assert rep.dim == 2 ** (r // 2)
    I = np.eye(rep.dim)
    for g in rep.generators:
        A = rep[g]
        assert np.max(np.abs(A @ A - I)) < 1e-12 and np.max(np.abs(A - A.conj().T)) < 1e-12
    for g, h in combinations(rep.generators, 2):
        assert np.max(np.abs(rep[g] @ rep[h] + rep[h] @ rep[g])) < 1e-12
    rep.validate()


@pytest.mark.parametrize("r", [2, 4, 6])
def test_even_clifford_irreducible(r):
    assert commutant_dim(clifford_rep(r)) == 1


def test_commutant_examples():
    assert commutant_dim(PAULI) == 1
    assert commutant_dim(PAULI.direct_sum(PAULI)) == 4
    assert commutant_dim(PAULI.tensor_product(PAULI)) == 1


@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_commutant_matches_rank_oracle(d1, d2, seed):
    rng = np.random.default_rng(seed)
    r1 = random_irrep(d1, rng)
    r2 = random_irrep(d2, rng)
    for rep in (r1, r2, r1.direct_sum(r1), r1.direct_sum(r2)):
        assert commutant_dim(rep) == commutant_dim_rank(list(rep.images.values()))
    assert commutant_dim(r1.direct_sum(r1)) >= 2


def test_direct_sum_of_inequivalent_irreps():
    rep = Representation.unitary({"b0": np.array([[1.0]]), "b1": np.array([[1.0]])})
    other = Representation.unitary({"b0": np.array([[-1.0]]), "b1": np.array([[1.0]])})
    assert commutant_dim(rep.direct_sum(other)) == 2
    assert commutant_dim(PAULI.direct_sum(PAULI).direct_sum(PAULI)) == 9


def test_gns_examples():
    one = Representation({"u": np.array([[1j]])})
    big, phi = gns_from_irrep(one)
    assert np.allclose(phi, [1])
    big, phi = gns_from_irrep(PAULI)
    assert np.allclose(phi, PHI2)
    tau = TracialState(PAULI)
    assert abs(tau(b0)) < 1e-15 and abs(tau(b1)) < 1e-15 and tau(StarPolynomial.const(1)) == 1
    assert abs(tau(b0 * b1)) < 1e-15


def test_gns_rejects_reducible():
    with pytest.raises(PreconditionError):
        gns_from_irrep(PAULI.direct_sum(PAULI))


def _random_word(rng, gens, max_len):
    n = int(rng.integers(0, max_len + 1))
    return tuple((gens[int(rng.integers(len(gens)))], bool(rng.integers(2))) for _ in range(n))


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_gns_trace_identity(d):
    rng = np.random.default_rng(d)
    rep = random_irrep(d, rng)
    big, phi = gns_from_irrep(rep)
    tau = TracialState(rep)
    for _ in range(100):
        w1 = _random_word(rng, rep.generators, 3)
        w2 = _random_word(rng, rep.generators, 3)
        assert abs(np.vdot(phi, big.eval_word(w1) @ phi) - tau.word(w1)) < 1e-12
        assert abs(tau.word(w1 + w2) - tau.word(w2 + w1)) < 1e-12


def test_representation_validation():
    with pytest.raises(ValidationError):
        Representation.unitary({"b0": 2 * X}).validate()
    with pytest.raises(ValidationError):
        Representation({"p": np.eye(2) / 2, "q": np.eye(2) / 2}, "pvm", [["p", "q"]]).validate()
    with pytest.raises(InvalidInputError):
        Representation({"a": np.eye(2), "b": np.eye(3)})
    chsh_ideal().bob_rep().validate()


def test_synchronous_pair_k3():
    G = k3_coloring()
    pair = synchronous_pair(G)
    assert len(pair.gamma) == 9
    zeros = {(a, b, x, y) for a, b, x, y in np.ndindex(G.V.shape) if G.V[a, b, x, y] == 0}
    found = set()
    for r in pair.relations:
        (word,) = r.terms
        (nx, _), (ny, _) = word
        x, a = map(int, nx[1:].split("_"))
        y, b = map(int, ny[1:].split("_"))
        found.add((a, b, x, y))
    assert found == zeros
    # adjacent questions with the same colour, and inconsistent answers to one question
    assert StarPolynomial.word("n0_1", "n1_1") in pair.relations
    assert StarPolynomial.word("n0_0", "n0_1") in pair.relations


def test_synchronous_pair_trivial_cases():
    G = SyncGame([0], [0, 1], np.eye(2, dtype=int)[:, :, None, None])
    pair = synchronous_pair(G)
    assert set(map(str, pair.relations)) == {"(1+0i)*n0_0*n0_1", "(1+0i)*n0_1*n0_0"}
    V = np.ones((2, 2, 2, 2), dtype=int)
    V[0, 1, 0, 0] = V[1, 0, 0, 0] = V[0, 1, 1, 1] = V[1, 0, 1, 1] = 0
    pair = synchronous_pair(SyncGame([0, 1], [0, 1], V))
    assert len(pair.relations) == 4


def test_xor_pair_chsh():
    pair = chsh_pair()
    obs = pair.gamma_observables()
    assert obs[0] == (b0 + b1) / np.sqrt(2)
    assert obs[1] == (b0 - b1) / np.sqrt(2)
    assert pair.reduced_relations == [b0 * b1 + b1 * b0]
    bob = chsh_ideal().bob_rep()
    for p in pair.relations:
        assert np.allclose(bob.eval(p), 0, atol=1e-15)
    for x, g in obs.items():
        G = eval_poly(PAULI, g)
        assert np.max(np.abs(G @ G - np.eye(2))) < 1e-12
    assert pair.check_selfadjoint([f"n{y}_{b}" for y in range(2) for b in range(2)])


def test_xor_pair_trivial_and_scaling():
    pair = xor_pair(XorGame([[1.0]]), (np.array([1.0]),))
    assert pair.gamma[(0, 0)] == StarPolynomial.gen("n0_0")
    assert pair.gamma[(0, 1)] == StarPolynomial.gen("n0_1")
    G = chsh_xor()
    r = np.full(2, np.sqrt(2) / 4)
    scaled = XorGame.__new__(XorGame)
    scaled.omega, scaled.name = 3 * G.omega, ""
    p1, p2 = xor_pair(G, (r,)), xor_pair(scaled, (3 * r,))
    assert all(p1.gamma[k] == p2.gamma[k] for k in p1.gamma)


def test_xor_pair_degenerate():
    with pytest.raises(DegeneracyError):
        xor_pair(chsh_xor(), (np.array([0.0, 1.0]),))
