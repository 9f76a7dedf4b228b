import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import PHI2, chsh_ideal_correlation, correlation_loops
from selftesting.builtins import chsh_ideal
from selftesting.errors import InvalidInputError, ValidationError
from selftesting.polynomials import StarPolynomial, TensorPolynomial
from selftesting.strategies import (QuantumModel, balanced_form, evaluate_state, flags, random_povm_model,
                                    random_projective_model)

DIAG = np.stack([np.diag([1, 0]), np.diag([0, 1])]).astype(complex)


def product_model():
    return QuantumModel(DIAG[None], DIAG[None], np.array([1, 0, 0, 0], dtype=complex))


def test_deterministic_product_correlation():
    p = product_model().correlation().p
    assert set(np.unique(p)) <= {0.0, 1.0}
    assert p[0, 0, 0, 0] == 1


def test_chsh_ideal_correlation():
    assert np.allclose(chsh_ideal().correlation().p, chsh_ideal_correlation(), atol=1e-14)


@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_correlation_rows_sum_and_match_loops(dA, dB, seed):
    rng = np.random.default_rng(seed)
    S = random_povm_model((2, 3, 2, 2), dA, dB, rng)
    p = S.correlation().p
    assert np.allclose(p.sum(axis=(0, 1)), 1, atol=1e-12)
    assert np.allclose(p, correlation_loops(S.alice, S.bob, S.psi), atol=1e-12)


def test_validation_errors():
    bad = DIAG.copy()
    bad[0] = np.diag([1.2, -0.2])
    bad[1] = np.diag([-0.2, 1.2])
    with pytest.raises(ValidationError) as exc:
        QuantumModel(bad[None], DIAG[None], np.array([1, 0, 0, 0], dtype=complex))
    assert "PSD" in exc.value.relation and exc.value.residual == pytest.approx(-0.2)
    incomplete = DIAG.copy()
    incomplete[1] = 0
    with pytest.raises(ValidationError) as exc:
        QuantumModel(incomplete[None], DIAG[None], np.array([1, 0, 0, 0], dtype=complex))
    assert "completeness" in exc.value.relation
    with pytest.raises(InvalidInputError):
        QuantumModel(DIAG[None], DIAG[None], np.array([1, 1, 0, 0], dtype=complex))
    with pytest.raises(InvalidInputError):
        QuantumModel(DIAG[None], DIAG[None], np.array([1, 0, 0], dtype=complex))


def test_balanced_form_of_balanced_model():
    S = chsh_ideal()
    B = balanced_form(S)
    assert np.allclose(B.correlation().p, S.correlation().p, atol=1e-12)
    assert np.allclose(B.psi.reshape(2, 2), np.eye(2) / np.sqrt(2), atol=1e-12)


def test_balanced_form_pads_unequal_dimensions():
    rng = np.random.default_rng(5)
    S = random_povm_model((2, 2, 2, 2), 2, 3, rng)
    B = balanced_form(S)
    assert B.dA == B.dB == 3
    B.validate()
    assert np.allclose(B.correlation().p, S.correlation().p, atol=1e-10)


def test_balanced_form_product_state():
    B = balanced_form(product_model())
    assert np.allclose(np.diag(B.psi.reshape(2, 2)), [1, 0])


@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_balanced_form_properties(dA, dB, seed):
    rng = np.random.default_rng(seed)
    S = random_povm_model((2, 2, 3, 2), dA, dB, rng)
    B = balanced_form(S)
    d = max(dA, dB)
    T = B.psi.reshape(d, d)
    lam = np.real(np.diag(T))
    assert np.allclose(T, np.diag(lam), atol=1e-12)
    assert np.all(lam >= -1e-15) and np.all(np.diff(lam) <= 1e-12)
    assert np.allclose(B.rho_A(), np.diag(lam**2), atol=1e-12)
    assert np.allclose(B.rho_B(), np.diag(lam**2), atol=1e-12)
    assert np.max(np.abs(B.correlation().p - S.correlation().p)) < 1e-10
    B2 = balanced_form(B)
    assert np.max(np.abs(B2.correlation().p - B.correlation().p)) < 1e-12


def test_flags_examples():
    f = flags(chsh_ideal())
    assert f.projective and f.fullRank and f.centrallySupported
    half = np.stack([np.eye(2) / 2, np.eye(2) / 2]).astype(complex)[None]
    S = QuantumModel(half, DIAG[None], PHI2)
    assert not flags(S).projective
    f = flags(product_model())
    assert not f.fullRank


@given(st.integers(0, 2**32 - 1))
def test_full_rank_implies_central_support(seed):
    rng = np.random.default_rng(seed)
    S = random_projective_model((2, 2, 2, 2), 2, 2, rng)
    f = flags(S)
    assert (not f.fullRank) or f.centrallySupported


def test_full_rank_balanced_densities_invertible():
    rng = np.random.default_rng(9)
    S = random_projective_model((2, 2, 2, 2), 3, 3, rng)
    assert flags(S).fullRank
    B = balanced_form(S)
    assert np.linalg.eigvalsh(B.rho_A())[0] > 0 and np.linalg.eigvalsh(B.rho_B())[0] > 0


def test_evaluate_state_examples():
    S = chsh_ideal()
    one = StarPolynomial.const(1)
    assert evaluate_state(S, TensorPolynomial.tensor(one, one)) == pytest.approx(1)
    p = S.correlation().p
    for a, b, x, y in np.ndindex(p.shape):
        m = (((f"m{x}_{a}", False),), ((f"n{y}_{b}", False),))
        assert evaluate_state(S, m) == pytest.approx(p[a, b, x, y], abs=1e-15)
    word = ((("m0_0", False), ("m1_0", False)), ())
    direct = np.vdot(PHI2, np.kron(S.alice[0, 0] @ S.alice[1, 0], np.eye(2)) @ PHI2)
    assert evaluate_state(S, word) == pytest.approx(direct, abs=1e-15)
    adj = ((("m1_0", True), ("m0_0", True)), ())
    assert evaluate_state(S, adj) == pytest.approx(np.conj(direct), abs=1e-15)


def test_evaluate_state_unknown_label():
    with pytest.raises(InvalidInputError):
        evaluate_state(chsh_ideal(), ((("m7_0", False),), ()))


def test_pvm_orthogonality_on_state():
    rng = np.random.default_rng(11)
    S = random_projective_model((3, 2, 2, 2), 3, 2, rng)
    for x in range(2):
        for a in range(3):
            for a2 in range(3):
                if a != a2:
                    m = (((f"m{x}_{a}", False), (f"m{x}_{a2}", False)), ())
                    assert abs(evaluate_state(S, m)) < 1e-10
