"""Grids, potentials, response functions and boundary controls.

All containers are frozen dataclasses holding numpy arrays that are marked
read-only on construction, so they can be shared between worker threads.

The x-grid on ``[0, T]`` and the t-grid on ``[0, 2T]`` share one step ``h``;
every kernel argument of the form ``t - s`` or ``2T - t - s`` is therefore an
integer multiple of ``h`` and is resolved by index arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError


def _frozen(arr, dtype):
    out = np.array(arr, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Grid:
    """Uniform grid with ``N`` subintervals on ``[0, T]`` and step ``h``.

    Use :func:`make_grid` for validated construction; ``h`` is stored rather
    than recomputed so that truncated grids keep a bit-identical step.
    """

    T: float
    N: int
    h: float

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T > 0):
            raise InvalidArgumentError(f"T must be positive and finite, got {self.T!r}")
        if int(self.N) != self.N or self.N < 1:
            raise InvalidArgumentError(f"N must be a positive integer, got {self.N!r}")
        if not (math.isfinite(self.h) and self.h > 0):
            raise InvalidArgumentError(f"h must be positive, got {self.h!r}")

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.N + 1) * self.h

    @property
    def t(self) -> np.ndarray:
        """Nodes of the extended time interval ``[0, 2T]``."""
        return np.arange(2 * self.N + 1) * self.h

    def truncated(self, n: int) -> "Grid":
        """Grid on ``[0, n*h]`` with the same step (for locality checks)."""
        if not 1 <= n <= self.N:
            raise InvalidArgumentError(f"truncation size must lie in 1..{self.N}, got {n}")
        return Grid(T=n * self.h, N=n, h=self.h)

    def same_as(self, other: "Grid") -> bool:
        return self.N == other.N and self.h == other.h


def make_grid(T: float, N: int) -> Grid:
    try:
        T = float(T)
    except (TypeError, ValueError):
        raise InvalidArgumentError(f"T must be a real number, got {T!r}") from None
    if not (math.isfinite(T) and T > 0):
        raise InvalidArgumentError(f"T must be positive, got {T}")
    if isinstance(N, bool) or int(N) != N or N < 2:
        raise InvalidArgumentError(f"N must be an integer >= 2, got {N!r}")
    N = int(N)
    return Grid(T=T, N=N, h=T / N)


def trapezoid_weights(n_nodes: int, h: float) -> np.ndarray:
    """Composite trapezoid weights for ``n_nodes`` equispaced nodes."""
    if n_nodes <= 1:
        return np.zeros(max(n_nodes, 0))
    w = np.full(n_nodes, h)
    w[0] = w[-1] = 0.5 * h
    return w


@dataclass(frozen=True)
class Potential:
    """Samples of ``p`` and ``q`` at the x-nodes of ``grid``."""

    grid: Grid
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        n = self.grid.N + 1
        p = _frozen(self.p, np.float64)
        q = _frozen(self.q, np.float64)
        if p.shape != (n,) or q.shape != (n,):
            raise InvalidArgumentError(f"p and q must have length N+1={n}")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
            raise InvalidArgumentError("potential samples must be finite")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def a(self) -> np.ndarray:
        """``p + i q`` at the nodes."""
        return self.p + 1j * self.q

    @classmethod
    def zero(cls, grid: Grid) -> "Potential":
        z = np.zeros(grid.N + 1)
        return cls(grid, z, z)


def sample_potential(grid: Grid, p, q) -> Potential:
    """Sample callables ``p(x)`` and ``q(x)`` on the x-nodes.

    Callables are applied to the whole node array; numpy warnings raised by
    singular expressions such as ``1/x`` are suppressed and reported as a
    non-finite sample instead.
    """
    x = grid.x
    with np.errstate(all="ignore"):
        pv = np.broadcast_to(np.asarray(p(x), dtype=np.float64), x.shape)
        qv = np.broadcast_to(np.asarray(q(x), dtype=np.float64), x.shape)
    bad = ~(np.isfinite(pv) & np.isfinite(qv))
    if bad.any():
        j = int(np.argmax(bad))
        raise InvalidArgumentError(f"non-finite potential sample at x={x[j]:g}")
    return Potential(grid, pv, qv)


@dataclass(frozen=True)
class ResponseFunction:
    """Samples ``r(t_m)`` for ``m = 0..2N``; zero for negative arguments."""

    grid: Grid
    r: np.ndarray

    def __post_init__(self):
        r = _frozen(self.r, np.complex128)
        if r.shape != (2 * self.grid.N + 1,):
            raise InvalidArgumentError(f"r must have length 2N+1={2 * self.grid.N + 1}")
        if not np.all(np.isfinite(r)):
            raise InvalidArgumentError("response samples must be finite")
        object.__setattr__(self, "r", r)

    def at_index(self, m) -> np.ndarray:
        """Samples at integer node offsets ``m`` (any shape), 0 for ``m < 0``."""
        m = np.asarray(m)
        out = np.zeros(m.shape, dtype=np.complex128)
        ok = m >= 0
        if np.any(m[ok] > 2 * self.grid.N):
            raise InvalidArgumentError("index beyond the sampled interval [0, 2T]")
        out[ok] = self.r[m[ok]]
        return out

    def __call__(self, t):
        """Piecewise-linear evaluation; exactly 0 for ``t < 0``."""
        t = np.asarray(t, dtype=np.float64)
        g = self.grid
        vals = np.interp(t, g.t, self.r.real) + 1j * np.interp(t, g.t, self.r.imag)
        return np.where(t < 0, 0.0 + 0.0j, vals)

    def truncated(self, n: int) -> "ResponseFunction":
        """Restriction to ``[0, 2 n h]`` on the grid of size ``n``."""
        return ResponseFunction(self.grid.truncated(n), self.r[: 2 * n + 1])

    def scaled(self, factor: complex) -> "ResponseFunction":
        return ResponseFunction(self.grid, factor * self.r)

    @classmethod
    def zero(cls, grid: Grid) -> "ResponseFunction":
        return cls(grid, np.zeros(2 * grid.N + 1, dtype=np.complex128))


@dataclass(frozen=True)
class BoundaryControl:
    """Control samples on ``[0, T]`` (N+1 values) or ``[0, 2T]`` (2N+1 values)."""

    grid: Grid
    f: np.ndarray
    extended: bool = field(init=False)

    def __post_init__(self):
        f = _frozen(self.f, np.complex128)
        N = self.grid.N
        if f.shape == (2 * N + 1,):
            ext = True
        elif f.shape == (N + 1,):
            ext = False
        else:
            raise InvalidArgumentError(f"control must have length N+1={N + 1} or 2N+1={2 * N + 1}")
        if not np.all(np.isfinite(f)):
            raise InvalidArgumentError("control samples must be finite")
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "extended", ext)

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.f.size) * self.grid.h

    @property
    def last_index(self) -> int:
        return self.f.size - 1

    def conj(self) -> "BoundaryControl":
        return BoundaryControl(self.grid, np.conj(self.f))


def sample_control(grid: Grid, f, extended: bool = True) -> BoundaryControl:
    m = 2 * grid.N + 1 if extended else grid.N + 1
    t = np.arange(m) * grid.h
    with np.errstate(all="ignore"):
        vals = np.broadcast_to(np.asarray(f(t), dtype=np.complex128), t.shape)
    if not np.all(np.isfinite(vals)):
        raise InvalidArgumentError("non-finite control sample")
    return BoundaryControl(grid, vals)


def lint_control(ctrl: BoundaryControl, rtol: float = 1e-6) -> list[str]:
    """Warnings for controls outside the smooth class ``f(0) = f'(0) = 0``.

    ``f'(0)`` is estimated by the one-sided second-order difference, which is
    exact for quadratics, so ``f(t) = t**2`` lints clean on any grid.
    Never raises.
    """
    f = ctrl.f
    h = ctrl.grid.h
    scale = max(1.0, float(np.max(np.abs(f))) if f.size else 1.0)
    warnings = []
    if f.size and abs(f[0]) > rtol * scale:
        warnings.append(f"f(0)≠0: |f(0)| = {abs(f[0]):.3e}")
    if f.size >= 3:
        d0 = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
        if abs(d0) > rtol * scale / ctrl.grid.T:
            warnings.append(f"f'(0)≠0: |f'(0)| ≈ {abs(d0):.3e}")
    elif f.size == 2 and abs(f[1] - f[0]) / h > rtol * scale / ctrl.grid.T:
        warnings.append("f'(0)≠0")
    return warnings
