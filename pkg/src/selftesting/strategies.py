"""Finite-dimensional quantum models: validation, correlations, balanced form, flags."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Config
from .errors import InvalidInputError, ValidationError
from .games import Correlation, alice_obs, alice_proj, bob_obs, bob_proj
from .linalg import (as_state, dagger, eigvalsh, hermitian_eig, random_projective_measurement,
                     random_state, reduced_densities, schmidt)
from .polynomials import StarPolynomial, TensorPolynomial


class QuantumModel:
    """Bipartite model: ``alice[x, a]`` (dA x dA effects), ``bob[y, b]``, state ``psi`` on C^dA (x) C^dB.

    The state is stored as a vector in row-major order, so ``psi.reshape(dA, dB)[i, j]``
    is the amplitude of ``|i>|j>``.
    """

    def __init__(self, alice, bob, psi, validate: bool = True, cfg: Config = DEFAULT):
        self.alice = np.asarray(alice, dtype=np.complex128)
        self.bob = np.asarray(bob, dtype=np.complex128)
        self.psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
        if self.alice.ndim != 4 or self.alice.shape[2] != self.alice.shape[3]:
            raise InvalidInputError(f"alice: expected shape (|X|, |A|, dA, dA), got {self.alice.shape}")
        if self.bob.ndim != 4 or self.bob.shape[2] != self.bob.shape[3]:
            raise InvalidInputError(f"bob: expected shape (|Y|, |B|, dB, dB), got {self.bob.shape}")
        if self.psi.size != self.dA * self.dB:
            raise InvalidInputError(f"psi: expected dimension {self.dA * self.dB}, got {self.psi.size}")
        if validate:
            self.validate(cfg)

    @property
    def dA(self) -> int:
        return self.alice.shape[-1]

    @property
    def dB(self) -> int:
        return self.bob.shape[-1]

    @property
    def shape(self) -> tuple[int, int, int, int]:
        """(|A|, |B|, |X|, |Y|), matching game predicates."""
        return (self.alice.shape[1], self.bob.shape[1], self.alice.shape[0], self.bob.shape[0])

    def validate(self, cfg: Config = DEFAULT) -> "QuantumModel":
        as_state(self.psi, cfg=cfg, name="psi")
        for side, arr in (("alice", self.alice), ("bob", self.bob)):
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"{side}: finite entries", np.inf)
            d = arr.shape[-1]
            for x in range(arr.shape[0]):
                for a in range(arr.shape[1]):
                    E = arr[x, a]
                    herm = float(np.max(np.abs(E - dagger(E)), initial=0.0))
                    if herm > cfg.hermitian_tol:
                        raise ValidationError(f"{side}[{x}][{a}] Hermitian", herm)
                    lo = float(eigvalsh(E, cfg)[0]) if d else 0.0
                    if lo < -cfg.psd_tol:
                        raise ValidationError(f"{side}[{x}][{a}] PSD", lo,
                                              f"{side}[{x}][{a}]: effect not PSD, min eigenvalue {lo:.3e}")
                comp = float(np.max(np.abs(arr[x].sum(axis=0) - np.eye(d)), initial=0.0))
                if comp > cfg.psd_tol:
                    raise ValidationError(f"{side}[{x}] completeness", comp,
                                          f"{side}[{x}]: effects do not sum to identity (residual {comp:.3e})")
        return self

    # derived objects
    def psi_matrix(self) -> np.ndarray:
        return self.psi.reshape(self.dA, self.dB)

    def rho_A(self) -> np.ndarray:
        return reduced_densities(self.psi, self.dA, self.dB)[0]

    def rho_B(self) -> np.ndarray:
        return reduced_densities(self.psi, self.dA, self.dB)[1]

    def correlation(self, check: bool = True) -> Correlation:
        Psi = self.psi_matrix()
        p = np.einsum("ij,xaik,kl,ybjl->abxy", np.conj(Psi), self.alice, Psi, self.bob)
        p = np.real(p)
        return Correlation(p) if check else _unchecked_correlation(p)

    def alice_images(self) -> dict[str, np.ndarray]:
        return _images(self.alice, alice_proj, alice_obs)

    def bob_images(self) -> dict[str, np.ndarray]:
        return _images(self.bob, bob_proj, bob_obs)

    def alice_rep(self):
        from .algebras import Representation
        return Representation.from_measurements(self.alice, alice_proj, alice_obs)

    def bob_rep(self):
        from .algebras import Representation
        return Representation.from_measurements(self.bob, bob_proj, bob_obs)

    def bipartite_rep(self):
        from .algebras import ProductRepresentation
        return ProductRepresentation(self.alice_rep(), self.bob_rep())

    def __repr__(self):
        nA, nB, nX, nY = self.shape
        return f"QuantumModel(dA={self.dA}, dB={self.dB}, |X|={nX}, |A|={nA}, |Y|={nY}, |B|={nB})"


def _unchecked_correlation(p: np.ndarray) -> Correlation:
    c = Correlation.__new__(Correlation)
    c.p, c.tol = p, np.inf
    return c


def _images(arr: np.ndarray, proj_name, obs_name) -> dict[str, np.ndarray]:
    out = {}
    for x in range(arr.shape[0]):
        for a in range(arr.shape[1]):
            out[proj_name(x, a)] = arr[x, a]
        if arr.shape[1] == 2:
            out[obs_name(x)] = arr[x, 0] - arr[x, 1]
    return out


def correlation(S: QuantumModel) -> Correlation:
    return S.correlation()


@dataclass(frozen=True)
class ModelFlags:
    projective: bool
    fullRank: bool
    centrallySupported: bool


def _support_projection(rho: np.ndarray, cfg: Config) -> np.ndarray:
    w, U = hermitian_eig(rho, cfg)
    cols = U[:, w > cfg.rank_tol]
    return cols @ dagger(cols)


def is_projective(S: QuantumModel, cfg: Config = DEFAULT) -> bool:
    for arr in (S.alice, S.bob):
        if np.max(np.abs(arr @ arr - arr), initial=0.0) > cfg.projective_tol:
            return False
    return True


def flags(S: QuantumModel, cfg: Config = DEFAULT) -> ModelFlags:
    coeffs, _, _ = schmidt(S.psi, S.dA, S.dB, cfg)
    rank = int(np.sum(coeffs > cfg.rank_tol))
    full = S.dA == S.dB == rank
    central = True
    for arr, rho in ((S.alice, S.rho_A()), (S.bob, S.rho_B())):
        Pi = _support_projection(rho, cfg)
        comm = np.einsum("ij,xajk->xaik", Pi, arr) - np.einsum("xaij,jk->xaik", arr, Pi)
        if np.max(np.linalg.norm(comm, axis=(2, 3)), initial=0.0) >= cfg.projective_tol:
            central = False
    return ModelFlags(is_projective(S, cfg), full, central)


def _pad(arr: np.ndarray, d: int) -> np.ndarray:
    """Extend effects to dimension d: the first answer absorbs the identity on the padding block."""
    d0 = arr.shape[-1]
    if d0 == d:
        return arr
    out = np.zeros(arr.shape[:2] + (d, d), dtype=np.complex128)
    out[:, :, :d0, :d0] = arr
    out[:, 0, d0:, d0:] = np.eye(d - d0)
    return out


def balanced_form(S: QuantumModel, cfg: Config = DEFAULT) -> QuantumModel:
    """Equal local dimensions with state sum_i lambda_i |ii>, lambda descending.

    Left Schmidt vectors are phased so their first nonzero amplitude is positive real.
    """
    d = max(S.dA, S.dB)
    Psi = np.zeros((d, d), dtype=np.complex128)
    Psi[:S.dA, :S.dB] = S.psi_matrix()
    lam, U, R = schmidt(Psi.reshape(-1), d, d, cfg)
    for k in range(d):
        nz = np.flatnonzero(np.abs(U[:, k]) > 1e-12)
        if nz.size:
            ph = U[nz[0], k] / abs(U[nz[0], k])
            U[:, k] /= ph
            R[:, k] *= ph
    alice = np.einsum("ji,xajk,kl->xail", np.conj(U), _pad(S.alice, d), U)
    bob = np.einsum("ji,xajk,kl->xail", np.conj(R), _pad(S.bob, d), R)
    psi = np.zeros((d, d), dtype=np.complex128)
    psi[np.arange(d), np.arange(d)] = lam
    return QuantumModel(alice, bob, psi.reshape(-1), validate=False)


def _word_matrix(word, images: dict[str, np.ndarray], d: int) -> np.ndarray:
    M = np.eye(d, dtype=np.complex128)
    for name, adj in word:
        if name not in images:
            raise InvalidInputError(f"unknown generator {name!r}")
        img = images[name]
        M = M @ (dagger(img) if adj else img)
    return M


def evaluate_state(S: QuantumModel, m) -> complex:
    """<psi| pi_A(alpha) (x) pi_B(beta) |psi> for a bipartite monomial or polynomial.

    ``m`` may be a ``TensorPolynomial`` or a ``(left word, right word)`` pair.
    """
    if isinstance(m, TensorPolynomial):
        return sum(c * evaluate_state(S, k) for k, c in m.terms.items())
    left, right = m
    if isinstance(left, StarPolynomial) or isinstance(right, StarPolynomial):
        return evaluate_state(S, TensorPolynomial.tensor(_as_poly(left), _as_poly(right)))
    MA = _word_matrix(left, S.alice_images(), S.dA)
    MB = _word_matrix(right, S.bob_images(), S.dB)
    Psi = S.psi_matrix()
    return complex(np.vdot(Psi, MA @ Psi @ MB.T))


def _as_poly(x) -> StarPolynomial:
    return x if isinstance(x, StarPolynomial) else StarPolynomial({tuple(x): 1.0})


def tensor_models(S1: QuantumModel, S2: QuantumModel) -> QuantumModel:
    """Parallel composition: questions and answers are pairs, spaces (A1 A2) (x) (B1 B2)."""
    def combine(e1, e2):
        T = np.einsum("xaij,ybkl->xyabikjl", e1, e2)
        n1, k1, d1 = e1.shape[0], e1.shape[1], e1.shape[2]
        n2, k2, d2 = e2.shape[0], e2.shape[1], e2.shape[2]
        return T.reshape(n1 * n2, k1 * k2, d1 * d2, d1 * d2)

    T = np.einsum("ij,kl->ikjl", S1.psi_matrix(), S2.psi_matrix())
    psi = T.reshape(-1)
    return QuantumModel(combine(S1.alice, S2.alice), combine(S1.bob, S2.bob), psi, validate=False)


def with_ancilla(S: QuantumModel, aux, rA: int, rB: int) -> QuantumModel:
    """S (x) (ancilla state on C^rA (x) C^rB with trivial measurements); spaces ordered H_A (x) C^rA."""
    aux = np.asarray(aux, dtype=np.complex128).reshape(rA, rB)
    alice = np.einsum("xaij,kl->xaikjl", S.alice, np.eye(rA)).reshape(S.alice.shape[:2] + (S.dA * rA,) * 2)
    bob = np.einsum("xaij,kl->xaikjl", S.bob, np.eye(rB)).reshape(S.bob.shape[:2] + (S.dB * rB,) * 2)
    psi = np.einsum("ij,kl->ikjl", S.psi_matrix(), aux).reshape(-1)
    return QuantumModel(alice, bob, psi, validate=False)


def conjugate_model(S: QuantumModel, UA: np.ndarray, UB: np.ndarray) -> QuantumModel:
    """Apply local unitaries: effects U E U*, state (UA (x) UB) psi."""
    alice = np.einsum("ij,xajk,lk->xail", UA, S.alice, np.conj(UA))
    bob = np.einsum("ij,xajk,lk->xail", UB, S.bob, np.conj(UB))
    psi = (UA @ S.psi_matrix() @ UB.T).reshape(-1)
    return QuantumModel(alice, bob, psi, validate=False)


def random_projective_model(shape, dA: int, dB: int, rng: np.random.Generator) -> QuantumModel:
    """Random PVMs and a random pure state; ``shape`` is (|A|, |B|, |X|, |Y|)."""
    nA, nB, nX, nY = shape
    alice = np.stack([random_projective_measurement(dA, nA, rng) for _ in range(nX)])
    bob = np.stack([random_projective_measurement(dB, nB, rng) for _ in range(nY)])
    return QuantumModel(alice, bob, random_state(dA * dB, rng))


def random_povm(d: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """k PSD effects summing to I: G_a* G_a normalised by (sum_a G_a* G_a)^{-1/2}."""
    from .linalg import random_matrix
    raw = np.stack([(lambda g: dagger(g) @ g)(random_matrix(d, rng)) for _ in range(k)])
    S = raw.sum(axis=0)
    w, U = hermitian_eig(S)
    Sinv = (U / np.sqrt(w)) @ dagger(U)
    out = np.einsum("ij,ajk,kl->ail", Sinv, raw, Sinv)
    return 0.5 * (out + np.conj(np.swapaxes(out, 1, 2)))


def random_povm_model(shape, dA: int, dB: int, rng: np.random.Generator) -> QuantumModel:
    nA, nB, nX, nY = shape
    alice = np.stack([random_povm(dA, nA, rng) for _ in range(nX)])
    bob = np.stack([random_povm(dB, nB, rng) for _ in range(nY)])
    return QuantumModel(alice, bob, random_state(dA * dB, rng))
