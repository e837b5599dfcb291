# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the kernels in ``_pykernels``.

The loops release the GIL so per-xi solves can run on worker threads.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs
from libc.stdlib cimport malloc, free

cnp.import_array()

BACKEND = "cython"

cdef extern from "complex.h" nogil:
    double cabs(double complex)
    double complex conj(double complex)


def march_kernel(a_in, double h):
    cdef double complex[::1] a = np.ascontiguousarray(a_in, dtype=np.complex128)
    cdef Py_ssize_t N = a.shape[0] - 1
    up_arr = np.zeros((N + 1, 2 * N + 1), dtype=np.complex128)
    um_arr = np.zeros((N + 1, 2 * N + 1), dtype=np.complex128)
    cdef double complex[:, ::1] up = up_arr
    cdef double complex[:, ::1] um = um_arr
    cdef Py_ssize_t m, j, jmax, jr
    cdef double complex ih2 = 0.5j * h
    cdef double complex ih4 = 0.25j * h
    cdef double complex P, M, alpha, beta, U, V, ah, upd, umd, bj, bjm
    with nogil:
        up[0, 0] = 1j * a[0]
        um[0, 0] = -up[0, 0]
        for m in range(1, 2 * N + 1):
            jmax = m if m < 2 * N - m else 2 * N - m
            jr = m - 2 if m - 2 < jmax else jmax
            for j in range(0, jr + 1):
                P = up[j + 1, m - 1] + ih2 * a[j + 1] * um[j + 1, m - 1]
                alpha = ih2 * a[j]
                if j == 0:
                    U = P / (1.0 + alpha)
                    V = -U
                else:
                    bjm = conj(a[j - 1])
                    bj = conj(a[j])
                    M = um[j - 1, m - 1] + ih2 * bjm * up[j - 1, m - 1]
                    beta = ih2 * bj
                    U = (P + alpha * M) / (1.0 - alpha * beta)
                    V = M + beta * U
                up[j, m] = U
                um[j, m] = V
            if m <= N:
                j = m - 1
                ah = 0.5 * (a[j] + a[j + 1])
                upd = 1j * ah
                umd = um[j, j] - 0.25 * h * (cabs(a[j]) * cabs(a[j]) + cabs(ah) * cabs(ah))
                P = upd + ih4 * ah * umd
                alpha = ih4 * a[j]
                if j == 0:
                    U = P / (1.0 + alpha)
                    V = -U
                else:
                    M = um[j - 1, m - 1] + ih2 * conj(a[j - 1]) * up[j - 1, m - 1]
                    beta = ih2 * conj(a[j])
                    U = (P + alpha * M) / (1.0 - alpha * beta)
                    V = M + beta * U
                up[j, m] = U
                um[j, m] = V
                up[m, m] = 1j * a[m]
                um[m, m] = um[m - 1, m - 1] + ih2 * (conj(a[m]) * up[m, m] + conj(a[m - 1]) * up[m - 1, m - 1])
    return up_arr, um_arr


def lu_factor(A_in):
    """In-place LU with partial pivoting on a C-contiguous complex matrix."""
    cdef double complex[:, ::1] A = A_in
    cdef Py_ssize_t n = A.shape[0]
    perm_arr = np.arange(n, dtype=np.intp)
    cdef Py_ssize_t[::1] perm = perm_arr
    cdef Py_ssize_t k, i, jj, p, info = -1
    cdef double best, v
    cdef double complex piv, l, tmp
    cdef double complex *rowk
    cdef double complex *rowi
    with nogil:
        for k in range(n):
            p = k
            best = cabs(A[k, k])
            for i in range(k + 1, n):
                v = cabs(A[i, k])
                if v > best:
                    best = v
                    p = i
            if best == 0.0:
                info = k
                break
            if p != k:
                for jj in range(n):
                    tmp = A[k, jj]
                    A[k, jj] = A[p, jj]
                    A[p, jj] = tmp
                i = perm[k]
                perm[k] = perm[p]
                perm[p] = i
            piv = A[k, k]
            rowk = &A[k, 0]
            for i in range(k + 1, n):
                rowi = &A[i, 0]
                l = rowi[k] / piv
                rowi[k] = l
                if l != 0:
                    for jj in range(k + 1, n):
                        rowi[jj] = rowi[jj] - l * rowk[jj]
    return perm_arr, info


def lu_solve(LU_in, perm_in, B_in, bint conj_trans=False):
    cdef double complex[:, ::1] LU = np.ascontiguousarray(LU_in, dtype=np.complex128)
    cdef Py_ssize_t[::1] perm = np.ascontiguousarray(perm_in, dtype=np.intp)
    B = np.asarray(B_in, dtype=np.complex128)
    cdef Py_ssize_t n = LU.shape[0]
    X_arr = np.array(B.reshape(n, -1), dtype=np.complex128, order="C", copy=True)
    cdef double complex[:, ::1] X = X_arr
    cdef Py_ssize_t nr = X.shape[1]
    cdef Py_ssize_t i, k, c
    cdef double complex s
    Y_arr = np.empty_like(X_arr)
    cdef double complex[:, ::1] Y = Y_arr
    with nogil:
        if not conj_trans:
            for i in range(n):
                for c in range(nr):
                    Y[i, c] = X[perm[i], c]
            for c in range(nr):
                for i in range(1, n):
                    s = Y[i, c]
                    for k in range(i):
                        s = s - LU[i, k] * Y[k, c]
                    Y[i, c] = s
                for i in range(n - 1, -1, -1):
                    s = Y[i, c]
                    for k in range(i + 1, n):
                        s = s - LU[i, k] * Y[k, c]
                    Y[i, c] = s / LU[i, i]
        else:
            for c in range(nr):
                for i in range(n):
                    s = X[i, c]
                    for k in range(i):
                        s = s - conj(LU[k, i]) * X[k, c]
                    X[i, c] = s / conj(LU[i, i])
                for i in range(n - 2, -1, -1):
                    s = X[i, c]
                    for k in range(i + 1, n):
                        s = s - conj(LU[k, i]) * X[k, c]
                    X[i, c] = s
            for i in range(n):
                for c in range(nr):
                    Y[perm[i], c] = X[i, c]
    return Y_arr.reshape(B.shape)


def hermitian_tridiag(A_in):
    A_arr = np.array(A_in, dtype=np.complex128, order="C", copy=True)
    cdef double complex[:, ::1] A = A_arr
    cdef Py_ssize_t n = A.shape[0]
    d_arr = np.zeros(n)
    e2_arr = np.zeros(n - 1 if n > 1 else 0)
    cdef double[::1] d = d_arr
    cdef double[::1] e2 = e2_arr
    cdef double complex *v = <double complex *> malloc(n * sizeof(double complex))
    cdef double complex *w = <double complex *> malloc(n * sizeof(double complex))
    cdef double complex *qv = <double complex *> malloc(n * sizeof(double complex))
    cdef Py_ssize_t k, i, jj, m
    cdef double sigma, xnorm, vnorm, beta
    cdef double complex phase, alpha, s
    if v == NULL or w == NULL or qv == NULL:
        free(v); free(w); free(qv)
        raise MemoryError()
    try:
        with nogil:
            for k in range(n - 2):
                m = n - k - 1
                sigma = 0.0
                for i in range(m):
                    sigma += cabs(A[k + 1 + i, k]) ** 2
                xnorm = sqrt(sigma)
                if xnorm == 0.0:
                    continue
                if cabs(A[k + 1, k]) != 0.0:
                    phase = A[k + 1, k] / cabs(A[k + 1, k])
                else:
                    phase = 1.0
                alpha = -phase * xnorm
                for i in range(m):
                    v[i] = A[k + 1 + i, k]
                v[0] = v[0] - alpha
                vnorm = 0.0
                for i in range(m):
                    vnorm += cabs(v[i]) ** 2
                vnorm = sqrt(vnorm)
                if vnorm == 0.0:
                    continue
                for i in range(m):
                    v[i] = v[i] / vnorm
                beta = 0.0
                for i in range(m):
                    s = 0.0
                    for jj in range(m):
                        s = s + A[k + 1 + i, k + 1 + jj] * v[jj]
                    w[i] = s
                    beta += (conj(v[i]) * s).real
                for i in range(m):
                    qv[i] = 2.0 * w[i] - 2.0 * beta * v[i]
                for i in range(m):
                    for jj in range(m):
                        A[k + 1 + i, k + 1 + jj] = A[k + 1 + i, k + 1 + jj] - v[i] * conj(qv[jj]) - qv[i] * conj(v[jj])
                for i in range(m):
                    A[k + 1 + i, k] = 0.0
                    A[k, k + 1 + i] = 0.0
                A[k + 1, k] = alpha
                A[k, k + 1] = conj(alpha)
            for i in range(n):
                d[i] = A[i, i].real
            for i in range(n - 1):
                e2[i] = cabs(A[i + 1, i]) ** 2
    finally:
        free(v); free(w); free(qv)
    return d_arr, e2_arr


cdef Py_ssize_t _sturm(double[::1] d, double[::1] e2, double x) nogil:
    cdef Py_ssize_t i, count = 0
    cdef double q = 1.0
    for i in range(d.shape[0]):
        if i > 0:
            q = d[i] - x - e2[i - 1] / q
        else:
            q = d[i] - x
        if q == 0.0:
            q = -1e-300
        if q < 0.0:
            count += 1
    return count


def sturm_count(d_in, e2_in, double x):
    cdef double[::1] d = np.ascontiguousarray(d_in, dtype=np.float64)
    cdef double[::1] e2 = np.ascontiguousarray(e2_in, dtype=np.float64)
    return _sturm(d, e2, x)


def bisect_min(d_in, e2_in, double lo, double hi, double tol, int maxit):
    cdef double[::1] d = np.ascontiguousarray(d_in, dtype=np.float64)
    cdef double[::1] e2 = np.ascontiguousarray(e2_in, dtype=np.float64)
    cdef int it = 0
    cdef double mid
    with nogil:
        while hi - lo > tol and it < maxit:
            mid = 0.5 * (lo + hi)
            if _sturm(d, e2, mid) >= 1:
                hi = mid
            else:
                lo = mid
            it += 1
    return 0.5 * (lo + hi), it
