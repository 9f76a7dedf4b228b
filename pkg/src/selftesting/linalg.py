"""Dense complex linear algebra: eigensolver, SVD/Schmidt, partial traces, norms.

Every routine that needs a spectral decomposition goes through
:func:`hermitian_eig`, which is backed by the cyclic Jacobi kernel.
"""
from __future__ import annotations

from functools import reduce

import numpy as np

from ._kernels import jacobi_eigh
from .config import DEFAULT, Config
from .errors import InvalidInputError, NumericalError


def as_matrix(M, name: str = "matrix", square: bool = False) -> np.ndarray:
    """Coerce to a finite 2-d complex array, raising on bad shape or NaN/Inf."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim != 2:
        raise InvalidInputError(f"{name}: expected a 2-d matrix, got shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"{name}: expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError(f"{name}: entries must be finite")
    return A


def as_state(psi, dim: int | None = None, cfg: Config = DEFAULT, name: str = "state") -> np.ndarray:
    v = np.asarray(psi, dtype=np.complex128).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name}: amplitudes must be finite")
    if dim is not None and v.size != dim:
        raise InvalidInputError(f"{name}: expected dimension {dim}, got {v.size}")
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > cfg.norm_tol:
        raise InvalidInputError(f"{name}: norm {nrm!r} differs from 1")
    return v


def dagger(M: np.ndarray) -> np.ndarray:
    return np.conj(M).T


def hermitian_residual(M: np.ndarray) -> float:
    return float(np.max(np.abs(M - dagger(M)), initial=0.0))


def hermitian_eig(M, cfg: Config = DEFAULT) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian matrix."""
    A = as_matrix(M, square=True)
    scale = max(1.0, float(np.max(np.abs(A), initial=0.0)))
    if hermitian_residual(A) > cfg.hermitian_tol * scale:
        raise InvalidInputError(
            f"matrix is not Hermitian (residual {hermitian_residual(A):.3e})"
        )
    A = 0.5 * (A + dagger(A))
    w, V, sweeps = jacobi_eigh(A, cfg.jacobi_tol, cfg.jacobi_max_sweeps)
    if sweeps < 0:
        raise NumericalError(
            f"Jacobi eigensolver did not converge in {cfg.jacobi_max_sweeps} sweeps"
        )
    order = np.argsort(w, kind="stable")
    return np.asarray(w)[order], np.asarray(V)[:, order]


def eigvalsh(M, cfg: Config = DEFAULT) -> np.ndarray:
    return hermitian_eig(M, cfg)[0]


def _complete_orthonormal(U: np.ndarray, m: int) -> np.ndarray:
    """Extend orthonormal columns ``U`` (m x r) to m x m by Gram-Schmidt on the standard basis."""
    cols = [U[:, k] for k in range(U.shape[1])]
    for e in np.eye(m, dtype=np.complex128):
        if len(cols) == m:
            break
        v = e.copy()
        for _ in range(2):
            for c in cols:
                v = v - np.vdot(c, v) * c
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            cols.append(v / nv)
    return np.column_stack(cols) if cols else np.zeros((m, 0), dtype=np.complex128)


def svd(X, cfg: Config = DEFAULT) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``X = U @ diag(s) @ Vh`` with ``s`` descending, via the eigensolver on X*X."""
    A = as_matrix(X)
    m, n = A.shape
    if m < n:
        U, s, Vh = svd(dagger(A), cfg)
        return dagger(Vh), s, dagger(U)
    w, V = hermitian_eig(dagger(A) @ A, cfg)
    V = V[:, ::-1]
    XV = A @ V
    s = np.linalg.norm(XV, axis=0)
    order = np.argsort(-s, kind="stable")
    s, V, XV = s[order], V[:, order], XV[:, order]
    scale = max(s[0] if s.size else 0.0, 1.0)
    keep = s > cfg.rank_tol * scale
    U = XV[:, keep] / s[keep]
    # re-orthonormalise the recovered columns (clustered singular values)
    if U.shape[1]:
        Q, R = np.linalg.qr(U)
        U = Q * np.sign(np.real(np.diag(R)) + (np.real(np.diag(R)) == 0))
    U = _complete_orthonormal(U, m)[:, :n]
    return U, s, dagger(V)


def schmidt(psi, dA: int, dB: int, cfg: Config = DEFAULT):
    """Schmidt coefficients (descending) with left/right bases as columns."""
    v = np.asarray(psi, dtype=np.complex128).reshape(-1)
    if dA * dB != v.size:
        raise InvalidInputError(f"dimension mismatch: {dA}*{dB} != {v.size}")
    v = as_state(v, cfg=cfg)
    U, s, Vh = svd(v.reshape(dA, dB), cfg)
    return s, U, Vh.T


def schmidt_rank(psi, dA: int, dB: int, cfg: Config = DEFAULT) -> int:
    s, _, _ = schmidt(psi, dA, dB, cfg)
    return int(np.sum(s > cfg.rank_tol))


def partial_trace(M, dA: int, dB: int, side: str = "B") -> np.ndarray:
    """Trace out subsystem ``side`` ("A" or "B") of an operator on C^dA (x) C^dB."""
    A = as_matrix(M, square=True)
    if A.shape[0] != dA * dB:
        raise InvalidInputError(f"dimension mismatch: {A.shape} vs {dA}*{dB}")
    T = A.reshape(dA, dB, dA, dB)
    if side == "B":
        return np.einsum("ijkj->ik", T)
    if side == "A":
        return np.einsum("ijil->jl", T)
    raise InvalidInputError(f"side must be 'A' or 'B', got {side!r}")


def reduced_densities(psi, dA: int, dB: int) -> tuple[np.ndarray, np.ndarray]:
    """(rho_A, rho_B) of a pure bipartite state, computed from its dA x dB reshaping."""
    T = np.asarray(psi, dtype=np.complex128).reshape(dA, dB)
    return T @ dagger(T), T.T @ np.conj(T)


def rho_norm(X, rho) -> float:
    """sqrt(Tr(X* X rho))."""
    A = as_matrix(X, "X")
    R = as_matrix(rho, "rho", square=True)
    if A.shape[1] != R.shape[0]:
        raise InvalidInputError(f"dimension mismatch: X {A.shape}, rho {R.shape}")
    val = np.real(np.trace(dagger(A) @ A @ R))
    return float(np.sqrt(max(val, 0.0)))


def frobenius(X) -> float:
    return float(np.linalg.norm(np.asarray(X)))


def op_norm(X, cfg: Config = DEFAULT) -> float:
    A = as_matrix(X)
    if A.size == 0:
        return 0.0
    G = dagger(A) @ A if A.shape[0] >= A.shape[1] else A @ dagger(A)
    return float(np.sqrt(max(eigvalsh(G, cfg)[-1], 0.0)))


def sqrtm_psd(M, cfg: Config = DEFAULT) -> np.ndarray:
    w, V = hermitian_eig(M, cfg)
    return (V * np.sqrt(np.clip(w, 0.0, None))) @ dagger(V)


def kron(*mats) -> np.ndarray:
    if not mats:
        return np.ones((1, 1), dtype=np.complex128)
    return reduce(np.kron, [np.asarray(m, dtype=np.complex128) for m in mats])


def is_psd(M, tol: float, cfg: Config = DEFAULT) -> tuple[bool, float]:
    lo = float(eigvalsh(M, cfg)[0])
    return lo >= -tol, lo


def maximally_entangled(d: int) -> np.ndarray:
    return np.eye(d, dtype=np.complex128).reshape(-1) / np.sqrt(d)


# random test objects ---------------------------------------------------------

def random_matrix(d: int, rng: np.random.Generator, cols: int | None = None) -> np.ndarray:
    cols = d if cols is None else cols
    return rng.standard_normal((d, cols)) + 1j * rng.standard_normal((d, cols))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    Q, R = np.linalg.qr(random_matrix(d, rng))
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    G = random_matrix(d, rng)
    return 0.5 * (G + dagger(G))


def random_state(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    G = random_matrix(d, rng, d if rank is None else rank)
    R = G @ dagger(G)
    return R / np.real(np.trace(R))


def random_projective_measurement(d: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """k orthogonal projections summing to I_d from a random basis split into k blocks."""
    U = random_unitary(d, rng)
    labels = rng.integers(0, k, size=d)
    out = np.zeros((k, d, d), dtype=np.complex128)
    for a in range(k):
        cols = U[:, labels == a]
        out[a] = cols @ dagger(cols)
    return out
