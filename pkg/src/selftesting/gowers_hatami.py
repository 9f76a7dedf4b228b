"""R-decompositions, the Cl2 ucp lift, Stinespring dilations and the stability check.

The check compares ``|pi(b) - I*(ideal(b) (x) 1)I|_rho`` against bounds built
from an R-decomposition of ``b - theta(b)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .algebras import SIGMA_X, SIGMA_Z, Representation
from .config import DEFAULT, Config
from .errors import InvalidInputError, PreconditionError
from .linalg import dagger, frobenius, hermitian_eig, rho_norm, sqrtm_psd
from .polynomials import StarPolynomial, Word


@dataclass(frozen=True)
class RTerm:
    """lam * u * r * v with r = relations[rel] (or its adjoint when ``rel_adjoint``)."""

    lam: complex
    u: Word
    rel: int
    v: Word
    rel_adjoint: bool = False


@dataclass
class RDecomposition:
    terms: list[RTerm]
    relations: list[StarPolynomial]
    relation_norms: Mapping[int, float]

    def size(self) -> float:
        return rdecomp_size(self)

    def polynomial(self) -> StarPolynomial:
        """The element sum_i lam_i u_i r_i v_i."""
        out = StarPolynomial()
        for t in self.terms:
            r = self.relations[t.rel]
            r = r.adjoint() if t.rel_adjoint else r
            out = out + StarPolynomial({t.u: t.lam}) * r * StarPolynomial({t.v: 1.0})
        return out


def rdecomp_size(d: RDecomposition) -> float:
    """sum_i |lam_i| (1 + |r_i| deg(v_i))."""
    total = 0.0
    for t in d.terms:
        if t.rel not in d.relation_norms:
            raise InvalidInputError(f"no norm recorded for relation {t.rel}")
        total += abs(t.lam) * (1.0 + d.relation_norms[t.rel] * len(t.v))
    return total


# ucp maps ------------------------------------------------------------------------

@dataclass
class UcpMap:
    """Linear map on a finite-dimensional algebra given by images of a basis."""

    domain_basis: list[StarPolynomial]
    images: list[StarPolynomial]
    name: str = ""

    def __post_init__(self):
        if len(self.domain_basis) != len(self.images):
            raise InvalidInputError("basis and image lists differ in length")

    def image_matrices(self, rep: Representation) -> list[np.ndarray]:
        return [rep.eval(p) for p in self.images]

    def coefficients(self, ideal: Representation, A: np.ndarray, tol: float = 1e-10) -> np.ndarray:
        """Coordinates of the matrix ``A`` in the basis, read through the ideal irrep."""
        B = np.stack([ideal.eval(p).reshape(-1) for p in self.domain_basis], axis=1)
        c, *_ = np.linalg.lstsq(B, np.asarray(A, dtype=np.complex128).reshape(-1), rcond=None)
        res = np.max(np.abs(B @ c - np.asarray(A).reshape(-1)), initial=0.0)
        if res > tol:
            raise InvalidInputError(f"domain basis does not span the target (residual {res:.3e})")
        return c

    def apply(self, rep: Representation, ideal: Representation, A: np.ndarray) -> np.ndarray:
        """theta-hat(A) = pi(theta(sigma^{-1}(A)))."""
        c = self.coefficients(ideal, A)
        return sum(ck * M for ck, M in zip(c, self.image_matrices(rep)))

    def unit_images(self, rep: Representation, ideal: Representation) -> np.ndarray:
        """Array ``out[i, j] = theta-hat(e_ij)`` over the matrix units of the ideal irrep."""
        d, n = ideal.dim, rep.dim
        imgs = self.image_matrices(rep)
        out = np.zeros((d, d, n, n), dtype=np.complex128)
        for i in range(d):
            for j in range(d):
                E = np.zeros((d, d))
                E[i, j] = 1.0
                c = self.coefficients(ideal, E)
                out[i, j] = sum(ck * M for ck, M in zip(c, imgs))
        return out


def _cl2_basis() -> list[StarPolynomial]:
    return [StarPolynomial.const(1.0), StarPolynomial.gen("b0"), StarPolynomial.gen("b1"),
            StarPolynomial.word("b0", "b1")]


def cl2_anticommutator() -> StarPolynomial:
    return StarPolynomial.word("b0", "b1") + StarPolynomial.word("b1", "b0")


def cl2_ideal() -> Representation:
    return Representation.unitary({"b0": SIGMA_X, "b1": SIGMA_Z})


def cl2_theta() -> UcpMap:
    """The lift with b0 -> b0 - b1 r/2, b1 -> b1 - b0 r/2, b0 b1 -> b0 b1 - r/2, r = b0 b1 + b1 b0.

    Not completely positive off the anticommuting locus; see ``cl2_theta_averaged``.
    """
    one, b0, b1, b01 = _cl2_basis()
    r = cl2_anticommutator()
    return UcpMap(_cl2_basis(), [one, b0 - 0.5 * b1 * r, b1 - 0.5 * b0 * r, b01 - 0.5 * r], "cl2-theta")


def cl2_theta_averaged() -> UcpMap:
    """Group-averaged lift over the Pauli group: b0 -> b0 - b1 r/2, b1 -> b1, b0 b1 -> b0 b1 - r/2.

    It equals V*(lambda(g) (x) 1)V for an explicit isometry V, so it is ucp
    for every pair of binary observables.
    """
    one, b0, b1, b01 = _cl2_basis()
    r = cl2_anticommutator()
    return UcpMap(_cl2_basis(), [one, b0 - 0.5 * b1 * r, b1, b01 - 0.5 * r], "cl2-theta-averaged")


def cl2_matrix_units() -> dict[tuple[int, int], StarPolynomial]:
    """Matrix units of M_2 written in the basis {1, b0, b1, b0 b1} via b0 -> sigma_X, b1 -> sigma_Z."""
    basis = _cl2_basis()
    ideal = cl2_ideal()
    mats = [ideal.eval(p) for p in basis]
    out = {}
    for i in range(2):
        for j in range(2):
            E = np.zeros((2, 2))
            E[i, j] = 1.0
            # Hilbert-Schmidt coefficients: the basis is orthogonal with tr(B* B) = 2
            coeffs = [np.trace(dagger(B) @ E) / 2 for B in mats]
            out[(i, j)] = sum((c * p for c, p in zip(coeffs, basis)), StarPolynomial())
    return out


def unit_images_from_function(f: Callable[[np.ndarray], np.ndarray], d: int) -> np.ndarray:
    """Matrix-unit images of a linear map given as a Python function on d x d matrices."""
    first = np.asarray(f(np.eye(d)))
    n = first.shape[0]
    out = np.zeros((d, d, n, n), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            E = np.zeros((d, d), dtype=np.complex128)
            E[i, j] = 1.0
            out[i, j] = f(E)
    return out


def choi_matrix(unit_images: np.ndarray) -> np.ndarray:
    """Block matrix [theta(e_ij)]_{ij} = sum e_ij (x) theta(e_ij)."""
    d, _, n, _ = unit_images.shape
    return np.transpose(unit_images, (0, 2, 1, 3)).reshape(d * n, d * n)


def check_ucp(unit_images: np.ndarray, cfg: Config = DEFAULT) -> tuple[bool, float]:
    """(is ucp, minimum Choi eigenvalue)."""
    U = np.asarray(unit_images, dtype=np.complex128)
    if U.ndim != 4 or U.shape[0] != U.shape[1] or U.shape[2] != U.shape[3]:
        raise InvalidInputError(f"expected unit images of shape (d, d, n, n), got {U.shape}")
    d, n = U.shape[0], U.shape[2]
    C = choi_matrix(U)
    C = 0.5 * (C + dagger(C))
    lo = float(hermitian_eig(C, cfg)[0][0])
    unital = float(np.max(np.abs(sum(U[i, i] for i in range(d)) - np.eye(n)), initial=0.0))
    return bool(lo >= -cfg.choi_clamp and unital <= cfg.hermitian_tol), lo


def stinespring(unit_images: np.ndarray, cfg: Config = DEFAULT) -> tuple[np.ndarray, int]:
    """Isometry V : C^n -> C^d (x) C^s with V*(e_ij (x) 1_s)V = theta(e_ij), s = Choi rank."""
    U = np.asarray(unit_images, dtype=np.complex128)
    d, n = U.shape[0], U.shape[2]
    C = choi_matrix(U)
    w, vecs = hermitian_eig(0.5 * (C + dagger(C)), cfg)
    if w[0] < -cfg.choi_clamp:
        raise PreconditionError(f"map is not completely positive (Choi eigenvalue {w[0]:.3e})")
    w = np.where(w < 0, 0.0, w)
    keep = np.flatnonzero(w > cfg.kraus_tol)
    s = len(keep)
    V = np.zeros((d * s, n), dtype=np.complex128)
    for col, k in enumerate(keep):
        K = np.conj(np.sqrt(w[k]) * vecs[:, k]).reshape(d, n)
        V[col::s, :] = K
    return V, s


def compress(V: np.ndarray, A: np.ndarray, s: int) -> np.ndarray:
    """V* (A (x) 1_s) V."""
    return dagger(V) @ np.kron(A, np.eye(s)) @ V


# epsilon-representations and the stability check --------------------------------

@dataclass
class EpsilonRep:
    rep: Representation
    rho: np.ndarray
    relations: list[StarPolynomial]
    measured_eps: float = field(init=False)

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=np.complex128)
        self.measured_eps = max((rho_norm(self.rep.eval(r), self.rho) for r in self.relations), default=0.0)


@dataclass
class GHRow:
    generator: str
    lhs: float
    rhs: float
    rhs_paper: float
    size: float
    measured_eps: float
    multiplicity: int

    @property
    def ok(self) -> bool:
        return self.lhs <= self.rhs + 1e-8

    def as_dict(self) -> dict:
        return {"generator": self.generator, "lhs": self.lhs, "rhs": self.rhs, "rhsPaperForm": self.rhs_paper,
                "size": self.size, "measuredEps": self.measured_eps, "multiplicity": self.multiplicity,
                "ok": self.ok}


def gh_bound_check(e: EpsilonRep, theta: UcpMap, decomps: Mapping[str, RDecomposition],
                   ideal: Representation | None = None, generators: Sequence[str] | None = None,
                   nu: float | None = None, cfg: Config = DEFAULT) -> list[GHRow]:
    """Per generator: lhs = |pi(b) - I*(ideal(b) (x) 1)I|_rho against two bounds.

    ``rhs`` is the term-wise bound sum |lam| (|pi(r)|_rho + |r| |[pi(v), sqrt rho]|_F);
    ``rhs_paper`` is size * nu with nu defaulting to the measured epsilon.
    """
    ideal = cl2_ideal() if ideal is None else ideal
    generators = list(ideal.generators if generators is None else generators)
    for g in generators:
        if g not in decomps:
            raise InvalidInputError(f"no R-decomposition supplied for generator {g!r}")
    V, s = stinespring(theta.unit_images(e.rep, ideal), cfg)
    sq = sqrtm_psd(e.rho, cfg)
    nu = e.measured_eps if nu is None else nu
    rows = []
    for g in generators:
        diff = e.rep[g] - compress(V, ideal[g], s)
        lhs = rho_norm(diff, e.rho)
        d = decomps[g]
        rhs = 0.0
        for t in d.terms:
            r = d.relations[t.rel]
            r = r.adjoint() if t.rel_adjoint else r
            rv = rho_norm(e.rep.eval(r), e.rho)
            comm = 0.0
            if t.v:
                Pv = e.rep.eval_word(t.v)
                comm = d.relation_norms[t.rel] * frobenius(Pv @ sq - sq @ Pv)
            rhs += abs(t.lam) * (rv + comm)
        size = rdecomp_size(d)
        rows.append(GHRow(g, lhs, rhs, size * nu, size, e.measured_eps, s))
    return rows


def cl2_relations() -> list[StarPolynomial]:
    return [cl2_anticommutator()]


def cl2_decompositions(averaged: bool = True) -> dict[str, RDecomposition]:
    """Decompositions of b - theta(b) over R = {b0 b1 + b1 b0} with |r| = 2."""
    rels = cl2_relations()
    norms = {0: 2.0}
    b0 = RDecomposition([RTerm(0.5, (("b1", False),), 0, ())], rels, norms)
    if averaged:
        b1 = RDecomposition([], rels, norms)
    else:
        b1 = RDecomposition([RTerm(0.5, (("b0", False),), 0, ())], rels, norms)
    return {"b0": b0, "b1": b1}
