# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled cyclic Jacobi kernel for complex Hermitian matrices."""
import numpy as np
from libc.math cimport sqrt, fabs

cdef extern from "complex.h" nogil:
    double cabs(double complex)
    double complex conj(double complex)
    double creal(double complex)


def jacobi_eigh(a, double tol, int max_sweeps):
    """Return ``(eigenvalues, eigenvectors, sweeps)``; eigenvalues are unsorted.

    ``sweeps`` is -1 when the sweep cap was hit before convergence.
    """
    arr = np.array(a, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t n = arr.shape[0]
    vec = np.eye(n, dtype=np.complex128)
    cdef double complex[:, ::1] A = arr
    cdef double complex[:, ::1] V = vec
    cdef Py_ssize_t i, j, p, q, k
    cdef double norm = 0.0, off, thresh, skip, r, app, aqq, zeta, t, c, s
    cdef double complex apq, ph, cph, x, y
    cdef int sweep
    cdef bint polished = False
    for i in range(n):
        for j in range(n):
            norm += creal(A[i, j] * conj(A[i, j]))
    norm = sqrt(norm)
    if n < 2 or norm == 0.0:
        return np.real(np.diag(arr)).copy(), vec, 0
    thresh = tol * norm
    skip = 1e-17 * norm / n
    with nogil:
        for sweep in range(max_sweeps + 1):
            off = 0.0
            for i in range(n):
                for j in range(n):
                    if i != j:
                        off += creal(A[i, j] * conj(A[i, j]))
            if sqrt(off) <= thresh:
                # one extra sweep is nearly free (quadratic convergence) and removes the residual
                if polished or off == 0.0:
                    break
                polished = True
            if sweep == max_sweeps:
                sweep = -1
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = A[p, q]
                    r = cabs(apq)
                    if r <= skip:
                        continue
                    ph = conj(apq) / r
                    cph = conj(ph)
                    app = creal(A[p, p])
                    aqq = creal(A[q, q])
                    zeta = (aqq - app) / (2.0 * r)
                    if zeta == 0.0:
                        t = 1.0
                    elif zeta > 0.0:
                        t = 1.0 / (zeta + sqrt(1.0 + zeta * zeta))
                    else:
                        t = -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = t * c
                    for k in range(n):
                        x = A[k, p]
                        y = A[k, q]
                        A[k, p] = c * x - s * ph * y
                        A[k, q] = s * x + c * ph * y
                    for k in range(n):
                        x = A[p, k]
                        y = A[q, k]
                        A[p, k] = c * x - s * cph * y
                        A[q, k] = s * x + c * cph * y
                    A[p, p] = app - t * r
                    A[q, q] = aqq + t * r
                    A[p, q] = 0.0
                    A[q, p] = 0.0
                    for k in range(n):
                        x = V[k, p]
                        y = V[k, q]
                        V[k, p] = c * x - s * ph * y
                        V[k, q] = s * x + c * ph * y
    return np.real(np.diag(arr)).copy(), vec, sweep
