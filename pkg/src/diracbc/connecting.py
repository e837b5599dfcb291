"""Connecting operator: kernel, Nystrom matrix, positivity check, factorization.

The kernel on ``[0,T]^2`` is built from the response function by

    c11(t,s) = -i [r(t-s) - conj r(s-t)]      c12(t,s) = -i conj r(2T-t-s)
    c21(t,s) =  i r(2T-t-s)                   c22(t,s) =  i [conj r(t-s) - r(s-t)]

with ``r(t) = 0`` for ``t < 0``.  At ``t = s`` both ``r(0)`` terms are kept
(``c11(t,t) = 2 Im r(0)``), which keeps the kernel exactly Hermitian.

Unknowns are ordered in (component, node) blocks: index ``alpha*(N+1) + m``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Grid, ResponseFunction, trapezoid_weights
from .errors import InvalidArgumentError
from .forward import KAPPA, FundamentalKernel
from .linalg import hermitian_defect, hermitian_min_eig

GAMMA = 2.0


def _kernel_blocks(r: np.ndarray, t_idx: np.ndarray, s_idx: np.ndarray, two_n: int) -> np.ndarray:
    """2x2 kernel entries for node index vectors; returns shape (2, 2, nt, ns)."""
    m = t_idx[:, None]
    k = s_idx[None, :]

    def r_at(i):
        return np.where(i >= 0, r[np.clip(i, 0, r.size - 1)], 0.0)

    d = m - k
    rd = r_at(d)
    rmd = r_at(-d)
    rs = r_at(two_n - m - k)
    c = np.empty((2, 2) + d.shape, dtype=np.complex128)
    c[0, 0] = -1j * (rd - np.conj(rmd))
    c[0, 1] = -1j * np.conj(rs)
    c[1, 0] = 1j * rs
    c[1, 1] = 1j * (np.conj(rd) - rmd)
    return c


def _as_block_matrix(c: np.ndarray) -> np.ndarray:
    """(2, 2, n, n) -> (2n, 2n) in (component, node) ordering."""
    n = c.shape[2]
    return c.transpose(0, 2, 1, 3).reshape(2 * n, 2 * n)


def _mirror_hermitian(K: np.ndarray) -> np.ndarray:
    """Keep the strict lower triangle and real diagonal, fill the rest by adjoint."""
    L = np.tril(K, -1)
    return L + L.conj().T + np.diag(K.diagonal().real).astype(np.complex128)


@dataclass(frozen=True)
class ConnectingKernel:
    """``c(t_m, t_k)`` for ``m, k = 0..N`` and the response it came from."""

    grid: Grid
    c: np.ndarray  # (2, 2, N+1, N+1)
    r: ResponseFunction
    gamma: float = GAMMA

    def matrix(self) -> np.ndarray:
        """Kernel values as a Hermitian ``2(N+1)`` square matrix."""
        return _mirror_hermitian(_as_block_matrix(self.c))

    def block(self, j: int) -> np.ndarray:
        """Kernel restricted to ``[T - x_j, T]``: nodes ``N-j..N``, dimension ``2(j+1)``."""
        N = self.grid.N
        sub = self.c[:, :, N - j :, N - j :]
        return _mirror_hermitian(_as_block_matrix(sub))


def build_connecting_kernel(r: ResponseFunction) -> ConnectingKernel:
    g = r.grid
    N = g.N
    idx = np.arange(N + 1)
    c = _kernel_blocks(r.r, idx, idx, 2 * N)
    c.setflags(write=False)
    return ConnectingKernel(g, c, r)


@dataclass(frozen=True)
class DiscreteConnectingOperator:
    """Symmetrically weighted Nystrom matrix ``gamma I + L^1/2 K L^1/2``.

    ``L`` holds the trapezoid weights on ``[0,T]``.  The matrix is similar
    to the plain Nystrom matrix ``gamma I + K L`` (same spectrum) and is
    Hermitian by construction.
    """

    grid: Grid
    matrix: np.ndarray
    weights: np.ndarray
    gamma: float = GAMMA

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def nystrom(self) -> np.ndarray:
        """The unsymmetrised matrix ``gamma I + K L``."""
        s = np.sqrt(np.tile(self.weights, 2))
        K = (self.matrix - self.gamma * np.eye(self.dim)) / s[:, None] / s[None, :]
        return self.gamma * np.eye(self.dim) + K * (s**2)[None, :]


def assemble_discrete_C(ck: ConnectingKernel) -> DiscreteConnectingOperator:
    g = ck.grid
    lam = trapezoid_weights(g.N + 1, g.h)
    s = np.sqrt(np.tile(lam, 2))
    K = ck.matrix()
    M = ck.gamma * np.eye(K.shape[0], dtype=np.complex128) + s[:, None] * K * s[None, :]
    M = _mirror_hermitian(M)
    M.setflags(write=False)
    return DiscreteConnectingOperator(g, M, lam, ck.gamma)


@dataclass(frozen=True)
class PositivityReport:
    T: float
    N: int
    min_eigenvalue: float
    theta: float
    hermitian_defect: float
    passed: bool

    def format(self) -> str:
        return "\n".join(
            [
                f"T={self.T!r}",
                f"N={self.N}",
                f"min_eigenvalue={self.min_eigenvalue!r}",
                f"theta={self.theta!r}",
                f"hermitian_defect={self.hermitian_defect:.3e}",
                f"verdict={'pass' if self.passed else 'fail'}",
            ]
        )


def check_positive_definite(C: DiscreteConnectingOperator, theta: float = 0.05) -> PositivityReport:
    """Pass iff the smallest eigenvalue of ``C`` is at least ``theta``."""
    if not (theta > 0):
        raise InvalidArgumentError("theta must be positive")
    lam = hermitian_min_eig(C.matrix)
    return PositivityReport(
        C.grid.T, C.grid.N, lam, float(theta), hermitian_defect(C.matrix), bool(lam >= theta)
    )


@dataclass(frozen=True)
class DiscreteControlOperator:
    """``(W a)(x_j) = kappa a(T-x_j) + sum_l mu_jl w_check(x_j, s_l) a(T-s_l)``.

    Rows are ``(alpha, j)`` over x-nodes, columns ``(beta, m)`` over t-nodes
    of ``a`` on ``[0,T]``; ``a(T - s_l)`` sits at column node ``N - l``.
    """

    grid: Grid
    matrix: np.ndarray
    x_weights: np.ndarray = field(repr=False)


def w_check(k: FundamentalKernel) -> np.ndarray:
    """``[[w1, conj w1], [w2, conj w2]]`` on the kernel nodes, shape (2, 2, N+1, 2N+1)."""
    return np.array([[k.w1, np.conj(k.w1)], [k.w2, np.conj(k.w2)]])


def assemble_discrete_W(k: FundamentalKernel) -> DiscreteControlOperator:
    g = k.grid
    N, h = g.N, g.h
    n = N + 1
    wc = w_check(k)
    W = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    for j in range(n):
        mu = trapezoid_weights(N - j + 1, h) if j < N else np.zeros(1)
        l = np.arange(j, N + 1)
        cols = N - l
        for al in range(2):
            for be in range(2):
                W[al * n + j, be * n + cols] += mu * wc[al, be, j, l]
                W[al * n + j, be * n + N - j] += KAPPA[al, be]
    W.setflags(write=False)
    return DiscreteControlOperator(g, W, trapezoid_weights(n, h))


def factorization_residual(W: DiscreteControlOperator, C: DiscreteConnectingOperator) -> float:
    """Max-norm of ``L_t^-1/2 W^H L_x W L_t^-1/2 - C``.

    This compares the two quadratic forms ``(C a, a)`` and ``||W a||^2``
    in the same symmetric weighting as :func:`assemble_discrete_C`.
    """
    if not W.grid.same_as(C.grid):
        raise InvalidArgumentError("W and C are on different grids")
    lx = np.tile(W.x_weights, 2)
    st = 1.0 / np.sqrt(np.tile(C.weights, 2))
    G = W.matrix.conj().T @ (lx[:, None] * W.matrix)
    G = st[:, None] * G * st[None, :]
    return float(np.max(np.abs(G - C.matrix)))
