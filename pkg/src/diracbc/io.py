"""CSV readers and writers for potentials, responses, controls and fields.

Every file starts with a comment line ``# T=<value> N=<value>`` followed by
an exact header line.  Floats are written with 17 significant digits so a
write/read cycle reproduces the samples bit for bit.
"""

from __future__ import annotations

import math
import re
from pathlib import Path

import numpy as np

from .core import BoundaryControl, Grid, Potential, ResponseFunction, make_grid
from .errors import FormatError, InvalidArgumentError

POTENTIAL_HEADER = "x,p,q"
RESPONSE_HEADER = "t,re_r,im_r"
CONTROL_HEADER = "t,re_f,im_f"
FIELD_HEADER = "x,t,re_u1,im_u1,re_u2,im_u2"
DIAGNOSTICS_HEADER = "xi,residual,cond_estimate,reality_defect,conj_defect"

_META = re.compile(r"^#\s*T=(\S+)\s+N=(\S+)\s*$")


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _meta_line(grid: Grid) -> str:
    return f"# T={_fmt(grid.T)} N={grid.N}"


def _read_table(path, header, ncols):
    """Return (grid, rows) with rows as a float array, validating layout."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read file: {exc}", path=path) from None
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty file", line=1, path=path)
    m = _META.match(lines[0].strip())
    if m is None:
        raise FormatError("first line must be '# T=<value> N=<value>'", line=1, path=path)
    try:
        T = float(m.group(1))
        N = int(m.group(2))
        grid = make_grid(T, N)
    except (ValueError, InvalidArgumentError) as exc:
        raise FormatError(f"bad grid parameters: {exc}", line=1, path=path) from None
    if len(lines) < 2 or lines[1].strip() != header:
        raise FormatError(f"header must be exactly '{header}'", line=2, path=path)
    rows = []
    for lineno, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != ncols:
            raise FormatError(f"expected {ncols} fields, got {len(parts)}", line=lineno, path=path)
        try:
            vals = [float(s) for s in parts]
        except ValueError:
            raise FormatError("non-numeric field", line=lineno, path=path) from None
        if not all(math.isfinite(v) for v in vals):
            raise FormatError("non-finite value", line=lineno, path=path)
        rows.append(vals)
    return grid, np.array(rows, dtype=np.float64).reshape(-1, ncols)


def _check_nodes(nodes, h, path):
    expect = np.arange(nodes.size) * h
    tol = 1e-9 * max(1.0, float(expect[-1]) if expect.size else 1.0)
    bad = np.abs(nodes - expect) > tol
    if bad.any():
        j = int(np.argmax(bad))
        raise FormatError(f"node coordinate {nodes[j]!r} does not match the grid", line=3 + j, path=path)


def write_potential(path, pot: Potential) -> None:
    g = pot.grid
    out = [_meta_line(g), POTENTIAL_HEADER]
    out += [f"{_fmt(x)},{_fmt(p)},{_fmt(q)}" for x, p, q in zip(g.x, pot.p, pot.q)]
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def read_potential(path) -> Potential:
    grid, rows = _read_table(path, POTENTIAL_HEADER, 3)
    if rows.shape[0] != grid.N + 1:
        raise FormatError(f"expected N+1={grid.N + 1} rows, found {rows.shape[0]}", path=path)
    _check_nodes(rows[:, 0], grid.h, path)
    return Potential(grid, rows[:, 1], rows[:, 2])


def write_response(path, resp: ResponseFunction) -> None:
    g = resp.grid
    out = [_meta_line(g), RESPONSE_HEADER]
    out += [f"{_fmt(t)},{_fmt(z.real)},{_fmt(z.imag)}" for t, z in zip(g.t, resp.r)]
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def read_response(path) -> ResponseFunction:
    grid, rows = _read_table(path, RESPONSE_HEADER, 3)
    if rows.shape[0] != 2 * grid.N + 1:
        raise FormatError(f"expected 2N+1={2 * grid.N + 1} rows, found {rows.shape[0]}", path=path)
    _check_nodes(rows[:, 0], grid.h, path)
    return ResponseFunction(grid, rows[:, 1] + 1j * rows[:, 2])


def write_control(path, ctrl: BoundaryControl) -> None:
    out = [_meta_line(ctrl.grid), CONTROL_HEADER]
    out += [f"{_fmt(t)},{_fmt(z.real)},{_fmt(z.imag)}" for t, z in zip(ctrl.t, ctrl.f)]
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def read_control(path) -> BoundaryControl:
    grid, rows = _read_table(path, CONTROL_HEADER, 3)
    if rows.shape[0] not in (grid.N + 1, 2 * grid.N + 1):
        raise FormatError(
            f"expected N+1={grid.N + 1} or 2N+1={2 * grid.N + 1} rows, found {rows.shape[0]}", path=path
        )
    _check_nodes(rows[:, 0], grid.h, path)
    return BoundaryControl(grid, rows[:, 1] + 1j * rows[:, 2])


def write_wave_field(path, wf) -> None:
    """Row-major over the triangle: x outer, t inner, nodes with ``t <= 2T - x``."""
    g = wf.grid
    out = [_meta_line(g), FIELD_HEADER]
    for j, m in zip(*np.nonzero(wf.domain)):
        u1 = wf.u1[j, m]
        u2 = wf.u2[j, m]
        out.append(
            f"{_fmt(j * g.h)},{_fmt(m * g.h)},{_fmt(u1.real)},{_fmt(u1.imag)},{_fmt(u2.real)},{_fmt(u2.imag)}"
        )
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def format_diagnostics(result) -> str:
    lines = [DIAGNOSTICS_HEADER]
    for d in result.diagnostics:
        lines.append(
            f"{float(d.xi)!r},{d.residual:.6e},{d.cond_estimate:.6e},{d.reality_defect:.6e},{d.conj_defect:.6e}"
        )
    return "\n".join(lines) + "\n"
