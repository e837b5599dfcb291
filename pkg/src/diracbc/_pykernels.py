"""Pure numpy implementations of the hot kernels.

Same signatures and results as the compiled ``_ckernels`` module; used when
the extension is not built or ``DIRACBC_PURE=1`` is set.
"""

import numpy as np

BACKEND = "python"


def march_kernel(a, h):
    """Characteristic march for the fundamental kernel.

    Returns ``(up, um)``, each of shape ``(N+1, 2N+1)``, holding
    ``u+ = w1 + i w2`` and ``u- = w1 - i w2`` on the triangle
    ``j <= m <= 2N - j`` and zero elsewhere.
    """
    a = np.ascontiguousarray(a, dtype=np.complex128)
    N = a.size - 1
    b = np.conj(a)
    a_half = 0.5 * (a[:-1] + a[1:])
    abs2 = np.abs(a) ** 2
    up = np.zeros((N + 1, 2 * N + 1), dtype=np.complex128)
    um = np.zeros_like(up)
    ih2 = 0.5j * h
    ih4 = 0.25j * h

    up[0, 0] = 1j * a[0]
    um[0, 0] = -up[0, 0]
    for m in range(1, 2 * N + 1):
        jmax = min(m, 2 * N - m)
        # regular cells: j = 0 .. min(m - 2, jmax)
        jr = min(m - 2, jmax)
        if jr >= 0:
            j = np.arange(jr + 1)
            P = up[j + 1, m - 1] + ih2 * a[j + 1] * um[j + 1, m - 1]
            alpha = ih2 * a[j]
            U = np.empty(jr + 1, dtype=np.complex128)
            V = np.empty(jr + 1, dtype=np.complex128)
            U[0] = P[0] / (1.0 + alpha[0])
            V[0] = -U[0]
            if jr >= 1:
                jj = j[1:]
                M = um[jj - 1, m - 1] + ih2 * b[jj - 1] * up[jj - 1, m - 1]
                beta = ih2 * b[jj]
                U[1:] = (P[1:] + alpha[1:] * M) / (1.0 - alpha[1:] * beta)
                V[1:] = M + beta * U[1:]
            up[: jr + 1, m] = U
            um[: jr + 1, m] = V
        if m <= N:
            # sub-diagonal node (m-1, m): half cell from the diagonal midpoint
            j = m - 1
            upd = 1j * a_half[j]
            umd = um[j, j] - 0.25 * h * (abs2[j] + abs(a_half[j]) ** 2)
            P = upd + ih4 * a_half[j] * umd
            alpha = ih4 * a[j]
            if j == 0:
                U = P / (1.0 + alpha)
                V = -U
            else:
                M = um[j - 1, m - 1] + ih2 * b[j - 1] * up[j - 1, m - 1]
                beta = ih2 * b[j]
                U = (P + alpha * M) / (1.0 - alpha * beta)
                V = M + beta * U
            up[j, m] = U
            um[j, m] = V
            # diagonal node (m, m)
            up[m, m] = 1j * a[m]
            um[m, m] = um[m - 1, m - 1] + ih2 * (b[m] * up[m, m] + b[m - 1] * up[m - 1, m - 1])
    return up, um


def lu_factor(A):
    """In-place LU with partial pivoting.  Returns ``(perm, info)``.

    ``A[perm] = L U`` with unit lower ``L`` stored below the diagonal.
    ``info`` is -1 on success or the first column with an exact zero pivot.
    """
    n = A.shape[0]
    perm = np.arange(n)
    for k in range(n):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if A[p, k] == 0:
            return perm, k
        if p != k:
            A[[k, p]] = A[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        if k + 1 < n:
            A[k + 1 :, k] /= A[k, k]
            A[k + 1 :, k + 1 :] -= np.outer(A[k + 1 :, k], A[k, k + 1 :])
    return perm, -1


def lu_solve(LU, perm, B, conj_trans=False):
    """Solve ``A X = B`` (or ``A^H X = B``) from the factors of :func:`lu_factor`."""
    n = LU.shape[0]
    B = np.asarray(B, dtype=np.complex128)
    X = np.array(B.reshape(n, -1), copy=True)
    if not conj_trans:
        X = X[perm]
        for i in range(1, n):
            X[i] -= LU[i, :i] @ X[:i]
        for i in range(n - 1, -1, -1):
            X[i] = (X[i] - LU[i, i + 1 :] @ X[i + 1 :]) / LU[i, i]
    else:
        # A^H = U^H L^H P
        for i in range(n):
            X[i] = (X[i] - np.conj(LU[:i, i]) @ X[:i]) / np.conj(LU[i, i])
        for i in range(n - 2, -1, -1):
            X[i] -= np.conj(LU[i + 1 :, i]) @ X[i + 1 :]
        Y = np.empty_like(X)
        Y[perm] = X
        X = Y
    return X.reshape(B.shape)


def hermitian_tridiag(A):
    """Householder reduction of a Hermitian matrix.

    Returns the diagonal ``d`` and the squared moduli ``e2`` of the
    off-diagonal of a real symmetric tridiagonal matrix with the same
    eigenvalues.  ``A`` is not modified.
    """
    A = np.array(A, dtype=np.complex128, copy=True)
    n = A.shape[0]
    e2 = np.zeros(max(n - 1, 0))
    for k in range(n - 2):
        x = A[k + 1 :, k]
        sigma = float(np.vdot(x, x).real)
        xnorm = np.sqrt(sigma)
        if xnorm == 0.0:
            continue
        x0 = x[0]
        phase = x0 / abs(x0) if x0 != 0 else 1.0
        alpha = -phase * xnorm
        v = x.copy()
        v[0] -= alpha
        vnorm = np.sqrt(float(np.vdot(v, v).real))
        if vnorm == 0.0:
            continue
        v /= vnorm
        S = A[k + 1 :, k + 1 :]
        w = S @ v
        beta = float(np.vdot(v, w).real)
        qv = 2.0 * w - 2.0 * beta * v
        S -= np.outer(v, np.conj(qv)) + np.outer(qv, np.conj(v))
        A[k + 1 :, k] = 0.0
        A[k, k + 1 :] = 0.0
        A[k + 1, k] = alpha
        A[k, k + 1] = np.conj(alpha)
    d = A.diagonal().real.copy()
    if n >= 2:
        e2[:] = np.abs(np.diagonal(A, -1)) ** 2
    return d, e2


def sturm_count(d, e2, x):
    """Number of eigenvalues strictly below ``x``."""
    count = 0
    q = 1.0
    tiny = 1e-300
    for i in range(d.size):
        q = d[i] - x - (e2[i - 1] / q if i > 0 else 0.0)
        if q == 0.0:
            q = -tiny
        if q < 0.0:
            count += 1
    return count


def bisect_min(d, e2, lo, hi, tol, maxit):
    """Bisection for the smallest eigenvalue in ``[lo, hi]``.

    Returns ``(value, iterations)``; ``iterations == maxit`` signals that the
    tolerance was not reached.
    """
    it = 0
    while hi - lo > tol and it < maxit:
        mid = 0.5 * (lo + hi)
        if sturm_count(d, e2, mid) >= 1:
            hi = mid
        else:
            lo = mid
        it += 1
    return 0.5 * (lo + hi), it
