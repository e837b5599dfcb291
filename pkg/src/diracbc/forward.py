"""Forward problem: fundamental kernel, response function and wave fields.

The fundamental kernel ``w`` is computed from the characteristic variables
``u+ = w1 + i w2`` and ``u- = w1 - i w2``, which satisfy

    i (d/dt - d/dx) u+ + (p + i q) u- = 0,
    i (d/dt + d/dx) u- + (p - i q) u+ = 0,

with ``u-(0, t) = -u+(0, t)`` (from ``w1(0, .) = 0``) and the diagonal data
``u+(x, x) = i (p(x) + i q(x))``.  Each grid cell is updated by the
trapezoid rule along both characteristics with an exact local 2x2 solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .core import BoundaryControl, Grid, Potential, ResponseFunction
from .errors import InvalidArgumentError

KAPPA = np.array([[1.0, 1.0], [1.0j, -1.0j]])


def triangle_mask(N: int, t_last: int | None = None) -> np.ndarray:
    """Boolean ``(N+1, 2N+1)`` mask of nodes with ``j <= m <= 2N - j``."""
    j = np.arange(N + 1)[:, None]
    m = np.arange(2 * N + 1)[None, :]
    mask = (m >= j) & (m <= 2 * N - j)
    if t_last is not None:
        mask &= m <= t_last
    return mask


@dataclass(frozen=True)
class CharacteristicField:
    up: np.ndarray
    um: np.ndarray

    @property
    def w1(self) -> np.ndarray:
        return 0.5 * (self.up + self.um)

    @property
    def w2(self) -> np.ndarray:
        return (self.up - self.um) / 2j


@dataclass(frozen=True)
class FundamentalKernel:
    """``w1, w2`` at nodes ``(x_j, t_m)``; arrays of shape ``(N+1, 2N+1)``.

    Entries outside the triangle ``x_j <= t_m <= 2T - x_j`` are zero.  The
    diagonal entries hold the one-sided values ``w(x, x+0)``.
    """

    grid: Grid
    w1: np.ndarray
    w2: np.ndarray

    def __post_init__(self):
        for name in ("w1", "w2"):
            arr = np.array(getattr(self, name), dtype=np.complex128)
            if arr.shape != (self.grid.N + 1, 2 * self.grid.N + 1):
                raise InvalidArgumentError(f"{name} has shape {arr.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def mask(self) -> np.ndarray:
        return triangle_mask(self.grid.N)

    def characteristic(self) -> CharacteristicField:
        return CharacteristicField(self.w1 + 1j * self.w2, self.w1 - 1j * self.w2)

    def diagonal(self) -> tuple[np.ndarray, np.ndarray]:
        j = np.arange(self.grid.N + 1)
        return self.w1[j, j], self.w2[j, j]


@dataclass(frozen=True)
class WaveField:
    """``u1, u2`` at nodes ``(x_j, t_m)``; zero where ``t < x``."""

    grid: Grid
    u1: np.ndarray
    u2: np.ndarray
    control: BoundaryControl

    @property
    def domain(self) -> np.ndarray:
        N = self.grid.N
        return triangle_mask(N, self.control.last_index) | _below_diagonal(N, self.control.last_index)


def _below_diagonal(N, t_last):
    j = np.arange(N + 1)[:, None]
    m = np.arange(2 * N + 1)[None, :]
    return (m < j) & (m <= t_last)


def solve_fundamental_kernel(pot: Potential) -> FundamentalKernel:
    g = pot.grid
    up, um = kernels.march_kernel(pot.a, g.h)
    if not (np.all(np.isfinite(up)) and np.all(np.isfinite(um))):
        raise InvalidArgumentError("potential too large for the grid step (non-finite kernel)")
    ch = CharacteristicField(up, um)
    w1 = ch.w1
    # u- = -u+ on x = 0 makes this exactly zero already; keep it explicit
    w1[0, :] = 0.0
    return FundamentalKernel(g, w1, ch.w2)


def response_from_kernel(k: FundamentalKernel) -> ResponseFunction:
    return ResponseFunction(k.grid, k.w2[0, :])


def forward(pot: Potential) -> ResponseFunction:
    """Response function of ``pot`` on ``[0, 2T]``."""
    return response_from_kernel(solve_fundamental_kernel(pot))


def diagonal_defect(k: FundamentalKernel, pot: Potential) -> dict:
    """Defect of ``-i w1(x,x) + w2(x,x) = p + i q``.

    ``stored`` uses the diagonal node values; ``extrapolated`` reconstructs
    ``w(x, x+0)`` by linear extrapolation from ``w(x, x+h)`` and
    ``w(x, x+2h)``, which tests the interior solution against the identity.
    """
    N = k.grid.N
    a = pot.a
    j = np.arange(N + 1)
    stored = -1j * k.w1[j, j] + k.w2[j, j] - a
    jj = np.arange(N)
    w1e = 2.0 * k.w1[jj, jj + 1] - k.w1[jj, jj + 2]
    w2e = 2.0 * k.w2[jj, jj + 1] - k.w2[jj, jj + 2]
    extra = -1j * w1e + w2e - a[:N]
    return {"stored": float(np.max(np.abs(stored))), "extrapolated": float(np.max(np.abs(extra)))}


def _trapezoid_conv(f, w_row, start, stop, h):
    """``sum_l mu_l f(m - l) w(l)`` for ``m = start..stop`` over ``l = start..m``."""
    seg = w_row[start : stop + 1]
    n = seg.size
    full = np.convolve(f[:n], seg)[:n] * h
    # trapezoid end corrections at l = start and l = m
    full -= 0.5 * h * f[:n] * seg[0]
    full -= 0.5 * h * f[0] * seg
    full[0] = 0.0
    return full


def apply_duhamel(k: FundamentalKernel, ctrl: BoundaryControl) -> WaveField:
    """``u(x,t) = f(t-x) (1, i) + int_x^t f(t-s) w(x,s) ds`` by the trapezoid rule."""
    g = k.grid
    if not ctrl.grid.same_as(g):
        raise InvalidArgumentError("control and kernel grids differ")
    N = g.N
    h = g.h
    f = ctrl.f
    M = ctrl.last_index
    u1 = np.zeros((N + 1, 2 * N + 1), dtype=np.complex128)
    u2 = np.zeros_like(u1)
    for j in range(N + 1):
        stop = min(M, 2 * N - j)
        if stop < j:
            continue
        lead = f[: stop - j + 1]
        u1[j, j : stop + 1] = lead + _trapezoid_conv(f, k.w1[j], j, stop, h)
        u2[j, j : stop + 1] = 1j * lead + _trapezoid_conv(f, k.w2[j], j, stop, h)
    return WaveField(g, u1, u2, ctrl)


def apply_response_operator(r: ResponseFunction, ctrl: BoundaryControl) -> np.ndarray:
    """``(R f)(t) = i f(t) + int_0^t r(t-s) f(s) ds`` on the nodes of ``ctrl``."""
    if not ctrl.grid.same_as(r.grid):
        raise InvalidArgumentError("control and response grids differ")
    f = ctrl.f
    h = r.grid.h
    n = f.size
    rv = r.r[:n]
    conv = np.convolve(rv, f)[:n] * h
    conv -= 0.5 * h * (rv * f[0] + rv[0] * f)
    conv[0] = 0.0
    return 1j * f + conv


def _heun_march(left_coef, right_coef, f, N, M, h):
    """Explicit second-order march of a characteristic pair with control ``f``.

    ``L`` moves towards ``x = 0`` (along ``x + t = const``) with
    ``dL = left_coef * R``; ``R`` moves away from it with ``dR = right_coef * L``.
    Boundary condition ``R(0, t) = 2 f(t) - L(0, t)``; zero initial data.
    """
    L = np.zeros((N + 2, M + 1), dtype=np.complex128)
    R = np.zeros_like(L)
    cl = np.zeros(N + 2, dtype=np.complex128)
    cr = np.zeros(N + 2, dtype=np.complex128)
    cl[: N + 1] = left_coef
    cr[: N + 1] = right_coef
    L[0, 0] = 0.0
    R[0, 0] = 2.0 * f[0]
    for m in range(1, M + 1):
        jtop = min(N, 2 * N - m)
        j = np.arange(jtop + 1)
        Lo = L[j + 1, m - 1]
        Ro_l = R[j + 1, m - 1]
        Lp = Lo + h * cl[j + 1] * Ro_l
        Rp = np.empty(jtop + 1, dtype=np.complex128)
        Rp[0] = 2.0 * f[m] - Lp[0]
        jj = j[1:]
        Rp[1:] = R[jj - 1, m - 1] + h * cr[jj - 1] * L[jj - 1, m - 1]
        Lc = Lo + 0.5 * h * (cl[j + 1] * Ro_l + cl[j] * Rp)
        Rc = np.empty_like(Rp)
        Rc[1:] = R[jj - 1, m - 1] + 0.5 * h * (cr[jj - 1] * L[jj - 1, m - 1] + cr[jj] * Lp[1:])
        Rc[0] = 2.0 * f[m] - Lc[0]
        L[: jtop + 1, m] = Lc
        R[: jtop + 1, m] = Rc
    return L[: N + 1], R[: N + 1]


def fd_oracle(pot: Potential, ctrl: BoundaryControl, dual: bool = False) -> WaveField:
    """Direct finite-difference solution of the boundary value problem.

    Marches ``i u_t + J u_x + V u = 0`` (or the dual ``i v_t - J v_x - V v = 0``
    when ``dual``) with ``u1(0, t) = f(t)`` and zero data for ``t < x`` by an
    explicit Heun scheme along characteristics.  It never touches the
    fundamental kernel.
    """
    g = pot.grid
    if not ctrl.grid.same_as(g):
        raise InvalidArgumentError("control and potential grids differ")
    N, h = g.N, g.h
    M = ctrl.last_index
    a = pot.a
    b = np.conj(a)
    if not dual:
        # L = u+ , R = u-
        L, R = _heun_march(1j * a, 1j * b, ctrl.f, N, M, h)
        plus, minus = L, R
    else:
        # L = v- , R = v+
        L, R = _heun_march(-1j * b, -1j * a, ctrl.f, N, M, h)
        plus, minus = R, L
    u1 = np.zeros((N + 1, 2 * N + 1), dtype=np.complex128)
    u2 = np.zeros_like(u1)
    u1[:, : M + 1] = 0.5 * (plus + minus)
    u2[:, : M + 1] = (plus - minus) / 2j
    dom = triangle_mask(N, M) | _below_diagonal(N, M)
    u1[~dom] = 0.0
    u2[~dom] = 0.0
    below = _below_diagonal(N, M)
    u1[below] = 0.0
    u2[below] = 0.0
    return WaveField(g, u1, u2, ctrl)
