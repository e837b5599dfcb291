"""Coarse Neumann-series oracle for the fundamental kernel.

Solves ``w - A w = A u*`` with ``A = -S V`` by summing the series
``sum_j A^(j+1) u*``, where ``S`` inverts ``i u_t + J u_x = h`` with
``u|_{t=0} = 0`` and ``u1|_{x=0} = 0`` through line integrals over the
contour through ``A(x,t)``, ``B(0,t-x)``, ``C(t-x,0)``, ``D(t+x,0)``:

    u1 = -i/(2 sqrt2) [AB - BC + AD] h1 + 1/(2 sqrt2) [-AB - BC + AD] h2
    u2 = -i/(2 sqrt2) [AB + BC + AD] h2 - 1/(2 sqrt2) [-AB + BC + AD] h1

(``t > x``).  Everything is supported on ``t >= x``, so each integral is cut
where its line crosses the diagonal.  The cost is O(N^2) per term and the
method shares no code with the characteristic march.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import Potential
from .errors import InvalidArgumentError
from .forward import FundamentalKernel, triangle_mask

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class NeumannKernel(FundamentalKernel):
    """Partial Neumann sum together with the size of its terms."""

    terms: int = 0
    first_term_norm: float = 0.0
    last_term_norm: float = 0.0


class NeumannConvergenceWarning(UserWarning):
    pass


def _line_integrals(h, N, hstep):
    """``AD``, ``BC``, ``AB`` integrals ``int h dl`` at every triangle node.

    ``h`` holds one-sided values (from ``t > x``) on the diagonal.
    """
    AD = np.zeros_like(h)
    # anti-diagonals x + t = s through node (k, s - k), k = 0..floor(s/2)
    for s in range(2 * N + 1):
        kmax = s // 2
        k = np.arange(kmax + 1)
        vals = h[k, s - k]
        seg = np.zeros(kmax + 1, dtype=h.dtype)
        # trapezoid on [k, k+1], accumulated from the diagonal end
        if kmax >= 1:
            seg[:-1] = 0.5 * (vals[:-1] + vals[1:])
        if s % 2 == 1:
            # crossing sits half a step beyond the last node
            cross = 0.5 * (h[kmax, kmax] + h[kmax + 1, kmax + 1])
            tail = 0.25 * (vals[-1] + cross)
        else:
            tail = 0.0
        cum = np.cumsum(seg[::-1])[::-1] + tail
        AD[k, s - k] = SQRT2 * hstep * cum

    j = np.arange(N + 1)[:, None]
    m = np.arange(2 * N + 1)[None, :]
    mask = triangle_mask(N)
    d = np.where(mask, m - j, 0)
    BC = np.where(mask, AD[0, d], 0.0)

    AB = np.zeros_like(h)
    # lines t - x = c from (0, c) to (j, c + j)
    for c in range(2 * N + 1):
        kmax = min(N, (2 * N - c) // 2)
        k = np.arange(kmax + 1)
        vals = h[k, c + k]
        cum = np.zeros(kmax + 1, dtype=h.dtype)
        if kmax >= 1:
            cum[1:] = np.cumsum(0.5 * (vals[:-1] + vals[1:]))
        AB[k, c + k] = SQRT2 * hstep * cum
    return AB, BC, AD


def apply_S(h1, h2, N, hstep):
    AB1, BC1, AD1 = _line_integrals(h1, N, hstep)
    AB2, BC2, AD2 = _line_integrals(h2, N, hstep)
    c = 1.0 / (2.0 * SQRT2)
    u1 = -1j * c * (AB1 - BC1 + AD1) + c * (-AB2 - BC2 + AD2)
    u2 = -1j * c * (AB2 + BC2 + AD2) - c * (-AB1 + BC1 + AD1)
    mask = triangle_mask(N)
    return np.where(mask, u1, 0.0), np.where(mask, u2, 0.0)


def _delta_term(pot):
    """``A u*`` for the delta control, in closed form.

    ``-V u*`` concentrates ``-2(p+iq)`` on the diagonal in the ``+``
    characteristic only, so ``u+ = i a((x+t)/2)`` and the boundary
    reflection gives ``u- = -i a((t-x)/2)``.
    """
    N = pot.grid.N
    a = pot.a
    j = np.arange(N + 1)[:, None]
    m = np.arange(2 * N + 1)[None, :]
    mask = triangle_mask(N)
    s = np.where(mask, j + m, 0)
    d = np.where(mask, m - j, 0)
    up = 1j * _half_index(a, s)
    um = -1j * _half_index(a, d)
    up = np.where(mask, up, 0.0)
    um = np.where(mask, um, 0.0)
    return 0.5 * (up + um), (up - um) / 2j


def _half_index(a, s):
    """``a`` at position ``s/2`` (linear interpolation between nodes)."""
    lo = s // 2
    hi = np.minimum((s + 1) // 2, a.size - 1)
    return 0.5 * (a[lo] + a[hi])


def neumann_oracle(pot: Potential, max_terms: int = 30) -> NeumannKernel:
    """Partial sum ``sum_{j=0..max_terms} A^(j+1) u*`` of the Neumann series."""
    if int(max_terms) != max_terms or max_terms < 0:
        raise InvalidArgumentError("max_terms must be a non-negative integer")
    g = pot.grid
    N, h = g.N, g.h
    p = pot.p[:, None]
    q = pot.q[:, None]
    y1, y2 = _delta_term(pot)
    w1, w2 = y1.copy(), y2.copy()
    first = float(np.max(np.hypot(np.abs(y1), np.abs(y2))))
    last = first
    for _ in range(int(max_terms)):
        h1 = -(p * y1 + q * y2)
        h2 = -(q * y1 - p * y2)
        y1, y2 = apply_S(h1, h2, N, h)
        w1 += y1
        w2 += y2
        last = float(np.max(np.hypot(np.abs(y1), np.abs(y2))))
        if last == 0.0:
            break
    if first > 0 and last > 1e-6 * first:
        warnings.warn(
            f"Neumann series not converged: last term {last:.3e} vs first {first:.3e}",
            NeumannConvergenceWarning,
            stacklevel=2,
        )
    return NeumannKernel(g, w1, w2, terms=int(max_terms) + 1, first_term_norm=first, last_term_norm=last)
