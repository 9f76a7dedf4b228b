import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import PHI2, X, Z
from selftesting.algebras import Representation
from selftesting.errors import InvalidInputError, PreconditionError
from selftesting.gowers_hatami import (EpsilonRep, RDecomposition, RTerm, check_ucp, choi_matrix,
                                       cl2_anticommutator, cl2_decompositions, cl2_ideal, cl2_matrix_units,
                                       cl2_relations, cl2_theta, cl2_theta_averaged, compress, gh_bound_check,
                                       rdecomp_size, stinespring, unit_images_from_function)
from selftesting.linalg import op_norm, random_density, random_unitary
from selftesting.polynomials import StarPolynomial

b0, b1 = StarPolynomial.gen("b0"), StarPolynomial.gen("b1")
R = [cl2_anticommutator()]


def rotated(t):
    return Representation.unitary({"b0": X, "b1": np.cos(t) * Z + np.sin(t) * X})


def random_binary_observable(d, rng):
    U = random_unitary(d, rng)
    signs = np.where(rng.random(d) < 0.5, 1.0, -1.0)
    return U @ np.diag(signs) @ U.conj().T


def test_size_examples():
    d = RDecomposition([RTerm(0.5, (("b1", False),), 0, ())], R, {0: 2.0})
    assert rdecomp_size(d) == 0.5
    assert rdecomp_size(RDecomposition([], R, {})) == 0
    d = RDecomposition([RTerm(1.0, (), 0, (("b0", False), ("b1", False)))], R, {0: 2.0})
    assert rdecomp_size(d) == 5


def test_size_missing_norm():
    with pytest.raises(InvalidInputError):
        rdecomp_size(RDecomposition([RTerm(1.0, (), 0, ())], R, {}))


def test_theta_images():
    th = cl2_theta()
    assert th.images[0] == StarPolynomial.const(1)
    r = b0 * b1 + b1 * b0
    assert th.images[3] == b0 * b1 - 0.5 * r
    assert th.images[1] == b0 - 0.5 * b1 * r
    assert th.images[2] == b1 - 0.5 * b0 * r
    # exact anticommuting representation: the correction vanishes
    assert np.allclose(cl2_ideal().eval(th.images[1]), X)


def test_decompositions_represent_differences():
    for averaged, th in ((True, cl2_theta_averaged()), (False, cl2_theta())):
        dec = cl2_decompositions(averaged)
        for k, g in ((1, "b0"), (2, "b1")):
            diff = StarPolynomial.gen(g) - th.images[k]
            assert diff == dec[g].polynomial()


def test_matrix_units_exact_coefficients():
    units = cl2_matrix_units()
    assert units[(0, 0)] == 0.5 * (1 + b1)
    assert units[(1, 1)] == 0.5 * (1 - b1)
    assert units[(0, 1)] == 0.5 * (b0 - b0 * b1)
    assert units[(1, 0)] == 0.5 * (b0 + b0 * b1)
    for (i, j), p in units.items():
        E = np.zeros((2, 2)); E[i, j] = 1
        assert np.allclose(cl2_ideal().eval(p), E)


def test_check_ucp_identity_map():
    U = unit_images_from_function(lambda A: A, 2)
    ok, lo = check_ucp(U)
    assert ok and abs(lo) < 1e-12
    C = choi_matrix(U)
    assert np.allclose(C, 2 * np.outer(PHI2, PHI2.conj()))


def test_check_ucp_trace_map():
    ok, lo = check_ucp(unit_images_from_function(lambda A: np.trace(A) / 2 * np.eye(3), 2))
    assert ok and lo >= -1e-12


def test_check_ucp_transpose_fails():
    ok, lo = check_ucp(unit_images_from_function(lambda A: A.T, 2))
    assert not ok and lo == pytest.approx(-1)


def test_check_ucp_shape_error():
    with pytest.raises(InvalidInputError):
        check_ucp(np.zeros((2, 3, 2, 2)))


def test_basis_must_span():
    th = cl2_theta()
    th.domain_basis = th.domain_basis[:3]
    th.images = th.images[:3]
    with pytest.raises(InvalidInputError):
        th.unit_images(rotated(0.1), cl2_ideal())


def test_verbatim_lift_not_ucp_off_relation():
    ok, lo = check_ucp(cl2_theta().unit_images(rotated(0.1), cl2_ideal()))
    assert not ok and lo < -0.04


@given(st.floats(0.0, 1.5))
def test_averaged_lift_ucp_on_rotations(t):
    ok, lo = check_ucp(cl2_theta_averaged().unit_images(rotated(t), cl2_ideal()))
    assert ok


@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_averaged_lift_ucp_on_random_observables(d, seed):
    rng = np.random.default_rng(seed)
    rep = Representation.unitary({"b0": random_binary_observable(d, rng), "b1": random_binary_observable(d, rng)})
    ok, lo = check_ucp(cl2_theta_averaged().unit_images(rep, cl2_ideal()))
    assert ok, lo


def test_stinespring_identity():
    V, s = stinespring(unit_images_from_function(lambda A: A, 2))
    assert s == 1
    assert np.allclose(V.conj().T @ V, np.eye(2))
    assert np.allclose(V @ V.conj().T, np.eye(2))


def test_stinespring_two_commuting_copies():
    rep = Representation.unitary({"b0": np.kron(np.eye(2), X), "b1": np.kron(np.eye(2), Z)})
    U = cl2_theta().unit_images(rep, cl2_ideal())
    V, s = stinespring(U)
    for i in range(2):
        for j in range(2):
            E = np.zeros((2, 2)); E[i, j] = 1
            assert np.max(np.abs(compress(V, E, s) - U[i, j])) < 1e-9


@pytest.mark.parametrize("t", [0.05, 0.2])
def test_stinespring_rotated(t):
    U = cl2_theta_averaged().unit_images(rotated(t), cl2_ideal())
    V, s = stinespring(U)
    assert np.max(np.abs(V.conj().T @ V - np.eye(2))) < 1e-9
    assert s == 2


def test_stinespring_rejects_non_cp():
    with pytest.raises(PreconditionError):
        stinespring(cl2_theta().unit_images(rotated(0.1), cl2_ideal()))


@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_kraus_reconstruction(d, seed):
    rng = np.random.default_rng(seed)
    rep = Representation.unitary({"b0": random_binary_observable(d, rng), "b1": random_binary_observable(d, rng)})
    U = cl2_theta_averaged().unit_images(rep, cl2_ideal())
    V, s = stinespring(U)
    for i in range(2):
        for j in range(2):
            E = np.zeros((2, 2)); E[i, j] = 1
            assert np.max(np.abs(compress(V, E, s) - U[i, j])) < 1e-9


def test_gh_exact_representation_any_rho(rng):
    rho = random_density(2, rng)
    rows = gh_bound_check(EpsilonRep(cl2_ideal(), rho, cl2_relations()), cl2_theta_averaged(), cl2_decompositions())
    assert all(r.lhs < 1e-10 for r in rows)


@pytest.mark.parametrize("t", [0.2, 0.1, 0.05, 0.025])
def test_gh_rotated_grid(t):
    e = EpsilonRep(rotated(t), np.eye(2) / 2, cl2_relations())
    anti = e.rep["b0"] @ e.rep["b1"] + e.rep["b1"] @ e.rep["b0"]
    assert e.measured_eps == pytest.approx(2 * np.sin(t), abs=1e-14)
    rows = {r.generator: r for r in gh_bound_check(e, cl2_theta_averaged(), cl2_decompositions())}
    half = 0.5 * np.sqrt(np.real(np.trace(anti.conj().T @ anti)) / 2)
    for r in rows.values():
        assert r.lhs <= half + 1e-8 and r.lhs <= r.rhs + 1e-8 and r.rhs <= r.rhs_paper + 1e-12
    assert rows["b0"].lhs == pytest.approx(np.sin(t), abs=1e-12)
    assert rows["b0"].lhs / t < 1.0


def test_gh_missing_decomposition():
    e = EpsilonRep(rotated(0.1), np.eye(2) / 2, cl2_relations())
    with pytest.raises(InvalidInputError):
        gh_bound_check(e, cl2_theta_averaged(), {"b0": cl2_decompositions()["b0"]})


def test_gh_rows_hold_with_nonuniform_rho(rng):
    rho = random_density(2, rng)
    rows = gh_bound_check(EpsilonRep(rotated(0.2), rho, cl2_relations()), cl2_theta_averaged(), cl2_decompositions())
    assert all(r.ok for r in rows)


@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_relation_norm_at_most_two(d, seed):
    rng = np.random.default_rng(seed)
    rep = Representation.unitary({"b0": random_binary_observable(d, rng), "b1": random_binary_observable(d, rng)})
    assert op_norm(rep.eval(cl2_anticommutator())) <= 2 + 1e-12
    commuting = Representation.unitary({"b0": np.eye(1), "b1": np.eye(1)})
    assert op_norm(commuting.eval(cl2_anticommutator())) == pytest.approx(2)
