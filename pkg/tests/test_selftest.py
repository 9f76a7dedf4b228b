import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import W_CHSH
from selftesting.algebras import BlockRepresentation
from selftesting.builtins import chsh, chsh_displayed_polynomial, chsh_ideal, chsh_pair
from selftesting.errors import DegenerateGapError, InvalidInputError, PreconditionError
from selftesting.families import AliceRotation, BobRotation, Depolarization
from selftesting.games import NonlocalGame
from selftesting.linalg import random_state, random_unitary
from selftesting.selftest import (LocalDilation, dilation_bound, pair_robustness_residuals, power_fit,
                                  robustness_sweep, spectral_gap, top_eigenspace_check, verify_local_dilation)
from selftesting.strategies import QuantumModel, conjugate_model, with_ancilla

SQ2 = np.sqrt(2)


def always_win():
    return NonlocalGame([0, 1], [0, 1], [0, 1], [0, 1], np.full((2, 2), 0.25), np.ones((2, 2, 2, 2), dtype=int))


def test_chsh_gap_definition_form():
    rep = spectral_gap(chsh(), chsh_ideal().bipartite_rep())
    assert abs(rep.topValue - W_CHSH) < 1e-12
    assert abs(rep.gap - SQ2 / 4) < 1e-9
    assert rep.topMultiplicity == 1
    # full spectrum 1/2 +- sqrt2/4 and 1/2 twice
    assert np.allclose(rep.eigenvalues, [0.5 - SQ2 / 4, 0.5, 0.5, 0.5 + SQ2 / 4], atol=1e-12)


def test_chsh_gap_displayed_form():
    rep = spectral_gap(chsh(), chsh_ideal().bipartite_rep(), chsh_displayed_polynomial())
    assert abs(rep.gap - SQ2 / 2) < 1e-9


def test_always_win_is_degenerate():
    S = chsh_ideal()
    rep = spectral_gap(always_win(), S.bipartite_rep())
    assert rep.topValue == pytest.approx(1.0) and rep.gap == 0.0 and rep.topMultiplicity == 4
    assert rep.degenerate
    assert not top_eigenspace_check(always_win(), S.bipartite_rep())


def test_top_eigenspace_checks():
    ideal = chsh_ideal().bipartite_rep()
    assert top_eigenspace_check(chsh(), ideal)
    double = BlockRepresentation([ideal, ideal])
    assert spectral_gap(chsh(), double).topMultiplicity == 2
    assert not top_eigenspace_check(chsh(), double)


@given(st.integers(0, 2**32 - 1))
def test_gap_basis_invariant(seed):
    rng = np.random.default_rng(seed)
    ideal = chsh_ideal().bipartite_rep()
    base = spectral_gap(chsh(), ideal)
    moved = spectral_gap(chsh(), ideal.conjugate(random_unitary(2, rng), random_unitary(2, rng)))
    assert abs(base.topValue - moved.topValue) < 1e-9 and abs(base.gap - moved.gap) < 1e-9


def test_trivial_dilation():
    S = chsh_ideal()
    D = LocalDilation(np.eye(2), np.eye(2), [1.0], 1, 1)
    rep = verify_local_dilation(S, S, D)
    assert rep.eps < 1e-12


def test_ancilla_dilation_exact(rng):
    S = chsh_ideal()
    aux = random_state(6, rng)
    big = with_ancilla(S, aux, 2, 3)
    D = LocalDilation(np.eye(4), np.eye(6), aux, 2, 3)
    assert verify_local_dilation(big, S, D).eps < 1e-12


def test_dilation_dimension_errors():
    S = chsh_ideal()
    D = LocalDilation(np.eye(4), np.eye(2), [1.0, 0.0], 2, 1)
    with pytest.raises(InvalidInputError):
        verify_local_dilation(S, S, D)
    with pytest.raises(InvalidInputError):
        LocalDilation(2 * np.eye(2), np.eye(2), [1.0], 1, 1)


def test_rotated_dilation_residuals_within_bound():
    S, IA, IB = BobRotation()(0.05)
    ideal = chsh_ideal()
    db = dilation_bound(S, ideal, IA, IB, chsh())
    D = LocalDilation(IA, IB, db.aux, 1, IB.shape[0] // 2)
    rep = verify_local_dilation(S, ideal, D)
    assert np.all(rep.state <= db.termBounds + 1e-8)
    assert rep.stateResidual == pytest.approx(db.achieved, abs=1e-12)


def test_dilation_bound_ideal():
    S = chsh_ideal()
    db = dilation_bound(S, S, np.eye(2), np.eye(2), chsh())
    assert db.delta < 1e-12 and db.eps == 0 and db.achieved < 1e-12 and db.bound < 1e-12


@pytest.mark.parametrize("family", [BobRotation(), AliceRotation(), Depolarization()])
@pytest.mark.parametrize("t", [0.02, 0.1, 0.3])
def test_dilation_bound_families(family, t):
    S, IA, IB = family(t)
    db = dilation_bound(S, chsh_ideal(), IA, IB, chsh())
    assert db.achieved <= db.bound + 1e-8
    assert np.all(db.termResiduals <= db.termBounds + 1e-8)


def test_bob_rotation_eps_closed_form():
    for t in [0.01, 0.1, 0.3]:
        S, IA, IB = BobRotation()(t)
        db = dilation_bound(S, chsh_ideal(), IA, IB, chsh())
        assert db.eps == pytest.approx((1 - np.cos(t)) / (4 * SQ2), abs=1e-14)


def test_depolarization_closed_form():
    p = 0.2
    S, IA, IB = Depolarization()(p)
    db = dilation_bound(S, chsh_ideal(), IA, IB, chsh())
    assert db.eps == pytest.approx(p * SQ2 / 4, abs=1e-14)
    assert db.delta < 1e-14
    assert db.achieved == pytest.approx(np.sqrt(2 - 2 * np.sqrt(1 - 3 * p / 4)), abs=1e-12)


def test_dilation_bound_degenerate_gap():
    S = chsh_ideal()
    with pytest.raises(DegenerateGapError):
        dilation_bound(S, S, np.eye(2), np.eye(2), always_win())


def test_pair_residuals_ideal():
    r = pair_robustness_residuals(chsh_ideal(), chsh_pair())
    assert r.condI < 1e-12 and r.condII < 1e-12 and r.condIII < 1e-12
    r = pair_robustness_residuals(chsh_ideal(), chsh_pair(), which="reduced")
    assert r.condII < 1e-12


def test_pair_residuals_rotated():
    t = 0.1
    S, _, _ = BobRotation()(t)
    r = pair_robustness_residuals(S, chsh_pair())
    # recipe relation is {b0, b1}/16 and {B0, B1} = 2 sin(t) I
    assert r.condII == pytest.approx(2 * np.sin(t) / 16, abs=1e-14)
    red = pair_robustness_residuals(S, chsh_pair(), which="reduced")
    assert red.condII == pytest.approx(2 * np.sin(t), abs=1e-14)
    assert r.condIII < 1e-12 and r.condI > 0


def test_pair_residuals_need_projective():
    S = chsh_ideal()
    half = np.stack([np.eye(2) / 2, np.eye(2) / 2]).astype(complex)
    T = QuantumModel(S.alice, np.stack([half, half]), S.psi)
    with pytest.raises(PreconditionError):
        pair_robustness_residuals(T, chsh_pair())


def test_sweep_rows_and_fit():
    rep = robustness_sweep(chsh(), chsh_pair(), chsh_ideal(), BobRotation(), [0.3, 0.0, 0.1, 0.01])
    eps = [r.eps for r in rep.rows]
    assert eps == sorted(eps)
    zero = rep.rows[0]
    assert zero.param == 0.0 and zero.eps == 0 and zero.achieved < 1e-12
    assert rep.all_within_bound()
    assert 0.4 <= rep.fits["achieved"].exponent <= 0.6


def test_sweep_empty_schedule():
    with pytest.raises(InvalidInputError):
        robustness_sweep(chsh(), chsh_pair(), chsh_ideal(), BobRotation(), [])


def test_eps_nondecreasing_along_rotation():
    grid = np.linspace(0, np.pi / 4, 40)
    ideal = chsh_ideal()
    eps = []
    for t in grid:
        S, IA, IB = BobRotation()(t)
        eps.append(dilation_bound(S, ideal, IA, IB, chsh()).eps)
    assert np.all(np.diff(eps) >= -1e-15)


@given(st.integers(2, 6), st.floats(0, 0.5), st.floats(0, 0.5), st.integers(0, 2**32 - 1))
def test_inner_product_difference(d, s1, s2, seed):
    rng = np.random.default_rng(seed)
    a, b = random_state(d, rng), random_state(d, rng)
    da, db = random_state(d, rng) * s1, random_state(d, rng) * s2
    at, bt = a + da, b + db
    at, bt = at / np.linalg.norm(at), bt / np.linalg.norm(bt)
    d1, d2 = np.linalg.norm(a - at), np.linalg.norm(b - bt)
    assert abs(np.vdot(a, b) - np.vdot(at, bt)) <= d1 + d2 + 1e-12


def test_power_fit():
    x = np.array([1e-4, 1e-3, 1e-2])
    f = power_fit(x, 3 * x**0.5)
    assert f.exponent == pytest.approx(0.5) and f.constant == pytest.approx(3)
    assert power_fit([0, 0], [1, 1]) is None


def test_conjugated_model_keeps_correlation(rng):
    S = chsh_ideal()
    T = conjugate_model(S, random_unitary(2, rng), random_unitary(2, rng))
    assert np.allclose(T.correlation().p, S.correlation().p, atol=1e-12)
