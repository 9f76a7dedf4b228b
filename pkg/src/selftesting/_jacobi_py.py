"""Pure-Python (numpy-vectorised) cyclic Jacobi kernel for complex Hermitian matrices."""
from __future__ import annotations

import numpy as np


def jacobi_eigh(a, tol: float, max_sweeps: int):
    """Return ``(eigenvalues, eigenvectors, sweeps)``; eigenvalues are unsorted.

    ``sweeps`` is -1 when the sweep cap was hit before convergence.
    """
    A = np.array(a, dtype=np.complex128, copy=True)
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    norm = np.linalg.norm(A)
    if n < 2 or norm == 0.0:
        return np.real(np.diag(A)).copy(), V, 0
    thresh = tol * norm
    skip = 1e-17 * norm / n
    polished = False
    for sweep in range(max_sweeps + 1):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= thresh:
            # one extra sweep is nearly free (quadratic convergence) and removes the residual
            if polished or off == 0.0:
                return np.real(np.diag(A)).copy(), V, sweep
            polished = True
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                r = abs(apq)
                if r <= skip:
                    continue
                ph = np.conj(apq) / r
                app = A[p, p].real
                aqq = A[q, q].real
                zeta = (aqq - app) / (2.0 * r)
                if zeta == 0.0:
                    t = 1.0
                else:
                    t = np.sign(zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                U = np.array([[c, s], [-s * ph, c * ph]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ U
                A[idx, :] = U.conj().T @ A[idx, :]
                A[p, p] = app - t * r
                A[q, q] = aqq + t * r
                A[p, q] = 0.0
                A[q, p] = 0.0
                V[:, idx] = V[:, idx] @ U
    return np.real(np.diag(A)).copy(), V, -1
