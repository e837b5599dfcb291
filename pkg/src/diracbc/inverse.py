"""Recovery of the potential from a response function.

For each ``xi = x_j`` the row ``t = T - xi`` of the kernel ``k^xi`` solves

    gamma^-1 c(t,s) + gamma k(t,s) + int_{T-xi}^T k(t,eta) c(eta,s) deta = 0,

for ``s`` in ``[T-xi, T]``.  The corner value gives the diagonal of the
fundamental kernel through ``w_check(x,x) = -gamma kappa k^x(T-x, T-x)``
and hence ``p + i q = w2(x,x) - i w1(x,x)``.

The block for ``xi = x_j`` only involves ``r`` on ``[0, 2 x_j]`` (in the
reflected variable ``T - t``), so the solves are independent of ``T`` and of
each other and run as a parallel map over ``j``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .connecting import (
    ConnectingKernel,
    assemble_discrete_C,
    build_connecting_kernel,
    check_positive_definite,
)
from .core import Potential, ResponseFunction, trapezoid_weights
from .errors import IllPosedDataError, InvalidArgumentError, NumericalError, SingularMatrixError
from .forward import KAPPA
from .linalg import lu_factor


@dataclass(frozen=True)
class GLKMRowSolution:
    j: int
    xi: float
    corner: np.ndarray  # k^xi(T-xi, T-xi), 2x2
    residual: float
    cond_estimate: float
    rows: np.ndarray | None = field(default=None, repr=False)

    @property
    def w_check(self) -> np.ndarray:
        return -2.0 * KAPPA @ self.corner


QUADRATURES = ("literal", "one-sided")


def _glkm_system(ck: ConnectingKernel, j: int, quadrature: str = "literal"):
    """Block kernel, weights, system matrix and the kernel rows used on the right.

    ``literal`` uses the kernel node values as they are.  ``one-sided``
    replaces the diagonal values of ``c11`` and ``c22`` (where the kernel
    jumps) by the limit each trapezoid node actually needs: the appropriate
    one-sided limit at the two interval ends and the mean of both limits
    inside, which restores second-order accuracy of the quadrature.
    """
    Kb = ck.block(j)
    n1 = j + 1
    lam = np.tile(trapezoid_weights(n1, ck.grid.h), 2)
    rhs = Kb
    Km = Kb
    if quadrature == "one-sided":
        r0 = ck.r.r[0]
        # t > s and t < s limits of (c11, c22) at t = s
        below = (-1j * r0, 1j * np.conj(r0))
        above = (1j * np.conj(r0), -1j * r0)
        Km = Kb.copy()
        d = np.arange(n1)
        for comp in range(2):
            idx = comp * n1 + d
            vals = 0.5 * (below[comp] + above[comp]) * np.ones(n1, dtype=np.complex128)
            vals[0] = below[comp]
            if j >= 1:
                vals[-1] = above[comp]
            Km[idx, idx] = vals
        rhs = Kb.copy()
        rhs[0, 0] = above[0]
        rhs[n1, n1] = above[1]
    elif quadrature != "literal":
        raise InvalidArgumentError(f"quadrature must be one of {QUADRATURES}")
    A = ck.gamma * np.eye(Kb.shape[0], dtype=np.complex128) + Km.T * lam[None, :]
    return Kb, lam, A, rhs


def solve_glkm_at(
    ck: ConnectingKernel,
    j: int,
    full: bool = False,
    tol: float = 1e-10,
    cond_cap: float = 1e12,
    quadrature: str = "literal",
) -> GLKMRowSolution:
    """Solve the equation at ``xi = x_j`` for the rows of ``k`` at ``t = T - xi``.

    With ``full=True`` every row ``t`` in ``[T-xi, T]`` is solved as well and
    stored in ``rows`` as the matrix ``K[(alpha,l),(beta,n)] = k_ab(t_l, s_n)``.
    """
    N = ck.grid.N
    if isinstance(j, bool) or int(j) != j or not (1 <= j <= N):
        raise InvalidArgumentError(f"node index must be in 1..{N}, got {j!r}")
    j = int(j)
    xi = j * ck.grid.h
    g = ck.gamma
    n1 = j + 1
    if full and quadrature != "literal":
        raise InvalidArgumentError("full rows are only available with the literal quadrature")
    Kb, lam, A, rhs = _glkm_system(ck, j, quadrature)
    if full:
        B = -Kb.T / g
    else:
        B = -np.stack([rhs[0], rhs[n1]], axis=1) / g
    try:
        fac = lu_factor(A)
    except SingularMatrixError as exc:
        raise IllPosedDataError(f"singular system at xi={xi:g}: {exc}", xi=xi) from None
    cond = fac.cond_estimate()
    if not (cond <= cond_cap):
        raise IllPosedDataError(f"condition estimate {cond:.3e} exceeds cap {cond_cap:.1e} at xi={xi:g}", xi=xi)
    X = fac.solve(B)
    bnorm = float(np.max(np.abs(B)))
    res = float(np.max(np.abs(A @ X - B)))
    rel = res / bnorm if bnorm > 0 else res
    if not np.all(np.isfinite(X)) or not (rel <= tol):
        raise NumericalError(f"residual {rel:.3e} above tolerance {tol:.1e} at xi={xi:g}")
    if full:
        rows = X.T
        corner = np.array([[rows[0, 0], rows[0, n1]], [rows[n1, 0], rows[n1, n1]]])
    else:
        rows = None
        corner = np.array([[X[0, 0], X[n1, 0]], [X[0, 1], X[n1, 1]]])
    return GLKMRowSolution(j, xi, corner, rel, cond, rows)


def nystrom_inverse_defect(ck: ConnectingKernel, sol: GLKMRowSolution) -> float:
    """``max |(gamma^-1 I + K^xi L)(gamma I + C^xi L) - I|`` for a full solution."""
    if sol.rows is None:
        raise InvalidArgumentError("needs a solution computed with full=True")
    Kb, lam, _, _ = _glkm_system(ck, sol.j)
    n = Kb.shape[0]
    g = ck.gamma
    left = np.eye(n) / g + sol.rows * lam[None, :]
    right = g * np.eye(n) + Kb * lam[None, :]
    return float(np.max(np.abs(left @ right - np.eye(n))))


@dataclass(frozen=True)
class RecoveredDiagonal:
    """``w_check(x_j, x_j)`` for ``j = 0..N``, shape (N+1, 2, 2)."""

    grid: object
    w: np.ndarray

    @property
    def w1(self) -> np.ndarray:
        return self.w[:, 0, 0]

    @property
    def w2(self) -> np.ndarray:
        return self.w[:, 1, 0]

    def reality_defect(self) -> np.ndarray:
        """``|p + i q|`` from the first column minus the same from the conjugated second."""
        z1 = self.w[:, 1, 0] - 1j * self.w[:, 0, 0]
        z2 = np.conj(self.w[:, 1, 1]) - 1j * np.conj(self.w[:, 0, 1])
        return np.abs(z1 - z2)

    def conj_defect(self) -> np.ndarray:
        return np.max(np.abs(self.w[:, :, 1] - np.conj(self.w[:, :, 0])), axis=1)


def recover_diagonal(r: ResponseFunction, solutions) -> RecoveredDiagonal:
    """Assemble the diagonal from the per-xi solutions; ``x = 0`` comes from ``r(0)``."""
    g = r.grid
    N = g.N
    by_j = {s.j: s for s in solutions}
    missing = [j for j in range(1, N + 1) if j not in by_j]
    if missing:
        raise InvalidArgumentError(f"missing solutions for node indices {missing[:5]}")
    w = np.zeros((N + 1, 2, 2), dtype=np.complex128)
    r0 = r.r[0]
    w[0] = [[0.0, 0.0], [r0, np.conj(r0)]]
    for j in range(1, N + 1):
        w[j] = by_j[j].w_check
    return RecoveredDiagonal(g, w)


def recover_potential(d: RecoveredDiagonal) -> Potential:
    w1, w2 = d.w1, d.w2
    p = w1.imag + w2.real
    q = -w1.real + w2.imag
    return Potential(d.grid, p, q)


@dataclass(frozen=True)
class InvertOptions:
    gate: bool = False
    theta: float = 0.05
    tol: float = 1e-10
    cond_cap: float = 1e12
    workers: int = 1
    quadrature: str = "literal"


@dataclass(frozen=True)
class XiDiagnostic:
    xi: float
    residual: float
    cond_estimate: float
    reality_defect: float
    conj_defect: float


@dataclass(frozen=True)
class InversionResult:
    potential: Potential
    diagonal: RecoveredDiagonal
    diagnostics: list
    min_eigenvalue: float | None = None


def invert(r: ResponseFunction, opts: InvertOptions | None = None) -> InversionResult:
    opts = opts or InvertOptions()
    if int(opts.workers) != opts.workers or opts.workers < 1:
        raise InvalidArgumentError("workers must be a positive integer")
    if opts.quadrature not in QUADRATURES:
        raise InvalidArgumentError(f"quadrature must be one of {QUADRATURES}")
    ck = build_connecting_kernel(r)
    min_eig = None
    if opts.gate:
        rep = check_positive_definite(assemble_discrete_C(ck), opts.theta)
        min_eig = rep.min_eigenvalue
        if not rep.passed:
            raise IllPosedDataError(
                f"connecting operator is not positive definite: min eigenvalue {rep.min_eigenvalue:.6g} < theta {opts.theta:g}"
            )
    N = r.grid.N

    def task(j):
        return solve_glkm_at(ck, j, tol=opts.tol, cond_cap=opts.cond_cap, quadrature=opts.quadrature)

    js = range(1, N + 1)
    if opts.workers == 1:
        sols = [task(j) for j in js]
    else:
        # largest blocks first balances the pool; map keeps the output order
        order = list(reversed(js))
        with ThreadPoolExecutor(max_workers=int(opts.workers)) as pool:
            done = dict(zip(order, pool.map(task, order)))
        sols = [done[j] for j in js]
    diag = recover_diagonal(r, sols)
    pot = recover_potential(diag)
    rdef = diag.reality_defect()
    cdef = diag.conj_defect()
    diagnostics = [XiDiagnostic(0.0, 0.0, 1.0, float(rdef[0]), float(cdef[0]))]
    for s in sols:
        diagnostics.append(XiDiagnostic(s.xi, s.residual, s.cond_estimate, float(rdef[s.j]), float(cdef[s.j])))
    return InversionResult(pot, diag, diagnostics, min_eig)
