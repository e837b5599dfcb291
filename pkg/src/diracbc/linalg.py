"""Dense complex linear algebra: LU solves and the smallest Hermitian eigenvalue.

Both routines run on the kernels selected in :mod:`diracbc._backend`, so no
LAPACK binding is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import InvalidArgumentError, NumericalError, SingularMatrixError


@dataclass(frozen=True)
class LUFactors:
    lu: np.ndarray
    perm: np.ndarray
    anorm1: float

    @property
    def n(self) -> int:
        return self.lu.shape[0]

    def solve(self, B, conj_trans: bool = False) -> np.ndarray:
        return kernels.lu_solve(self.lu, self.perm, B, conj_trans)

    def inv_norm1_estimate(self, maxiter: int = 5) -> float:
        """Hager/Higham estimate of ``||A^-1||_1`` using a few solves."""
        n = self.n
        x = np.full(n, 1.0 / n, dtype=np.complex128)
        est = 0.0
        for it in range(maxiter):
            y = self.solve(x)
            est = float(np.sum(np.abs(y)))
            ay = np.abs(y)
            xi = np.where(ay > 0, y / np.where(ay > 0, ay, 1.0), 1.0)
            z = self.solve(xi, conj_trans=True)
            jmax = int(np.argmax(np.abs(z)))
            if it > 0 and abs(z[jmax]) <= np.vdot(x, z).real:
                break
            x = np.zeros(n, dtype=np.complex128)
            x[jmax] = 1.0
        # Higham's alternating-sign vector guards against underestimates
        alt = np.array([(-1) ** i * (1 + i / max(n - 1, 1)) for i in range(n)], dtype=np.complex128)
        alt_est = 2.0 * float(np.sum(np.abs(self.solve(alt)))) / (3.0 * n)
        return max(est, alt_est)

    def cond_estimate(self) -> float:
        return self.anorm1 * self.inv_norm1_estimate()


@dataclass(frozen=True)
class LUSolution:
    x: np.ndarray
    cond_estimate: float
    flagged: bool
    residual: float


def _as_square(A) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidArgumentError("matrix entries must be finite")
    return A


def lu_factor(A) -> LUFactors:
    A = _as_square(A)
    lu = np.array(A, dtype=np.complex128, order="C", copy=True)
    anorm1 = float(np.max(np.sum(np.abs(lu), axis=0))) if lu.size else 0.0
    perm, info = kernels.lu_factor(lu)
    if info >= 0:
        raise SingularMatrixError(f"exact zero pivot in column {info}")
    return LUFactors(lu, np.asarray(perm), anorm1)


def lu_solve(A, B, cond_cap: float | None = None) -> LUSolution:
    """Solve ``A X = B`` by partial-pivoting LU.

    Returns the solution, a 1-norm condition estimate, whether that estimate
    exceeds ``cond_cap`` (the caller decides what to do about it) and the
    relative residual ``||A X - B||_max / ||B||_max``.
    """
    A = _as_square(A)
    B = np.asarray(B, dtype=np.complex128)
    if B.shape[0] != A.shape[0]:
        raise InvalidArgumentError("right-hand side has the wrong number of rows")
    fac = lu_factor(A)
    X = fac.solve(B)
    cond = fac.cond_estimate()
    bnorm = float(np.max(np.abs(B))) if B.size else 0.0
    res = np.max(np.abs(A @ X - B)) if B.size else 0.0
    rel = float(res / bnorm) if bnorm > 0 else float(res)
    flagged = cond_cap is not None and not (cond <= cond_cap)
    return LUSolution(X, cond, flagged, rel)


def hermitian_defect(A) -> float:
    A = np.asarray(A)
    return float(np.max(np.abs(A - A.conj().T))) if A.size else 0.0


def hermitian_min_eig(A, tol: float = 1e-12, maxit: int = 200) -> float:
    """Smallest eigenvalue of a Hermitian matrix.

    Householder tridiagonalisation followed by Sturm-sequence bisection on
    the Gershgorin interval; the result is accurate to ``tol * ||A||``.
    """
    A = _as_square(A)
    n = A.shape[0]
    if n == 0:
        raise InvalidArgumentError("empty matrix")
    scale = max(1.0, float(np.max(np.abs(A))))
    if hermitian_defect(A) > 1e-12 * scale:
        raise InvalidArgumentError(f"matrix is not Hermitian (defect {hermitian_defect(A):.3e})")
    d, e2 = kernels.hermitian_tridiag(A)
    e = np.sqrt(e2)
    rad = np.zeros(n)
    rad[:-1] += e
    rad[1:] += e
    lo = float(np.min(d - rad))
    hi = float(np.max(d + rad))
    width = max(hi - lo, scale * 1e-300)
    lo -= 1e-12 * width
    hi += 1e-12 * width
    anorm = max(abs(lo), abs(hi))
    target = max(tol * anorm, 4 * np.finfo(float).eps * anorm)
    value, it = kernels.bisect_min(d, e2, lo, hi, target, maxit)
    if it >= maxit:
        raise NumericalError("bisection did not converge")
    return float(value)
