"""Command-line front end.

    diracbc generate  --potential SPEC --T T --N N --out pot.csv
    diracbc forward   --potential SPEC|FILE [--T T --N N] --out resp.csv [--kernel-out w.csv]
    diracbc invert    --response resp.csv --out pot.csv [--gate on|off --theta --tol --workers]
    diracbc check     --response resp.csv [--theta]
    diracbc roundtrip --potential SPEC|FILE [--T T --N N] [--out table.csv]
    diracbc simulate  --potential SPEC|FILE --control f.csv --out field.csv [--oracle]

A potential SPEC is ``zero``, ``const:p0,q0``, ``gauss:a,center,width``
(adds ``a exp(-width (x-center)^2)`` to p), ``sine:b,freq`` (adds
``b sin(2 pi freq x)`` to q), or several of these joined with ``+``.
Anything else is read as a potential file.  ``--config cfg.json`` supplies
defaults for any flag (same names, without dashes); flags on the command
line win.

Exit codes: 0 success, 2 usage or format error, 3 ill-posed data,
4 numerical error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable

import numpy as np

from . import io
from .connecting import assemble_discrete_C, build_connecting_kernel, check_positive_definite
from .core import Grid, Potential, make_grid, sample_potential, trapezoid_weights
from .errors import DiracBCError, FormatError, IllPosedDataError, InvalidArgumentError, NumericalError
from .forward import apply_duhamel, fd_oracle, forward, response_from_kernel, solve_fundamental_kernel
from .inverse import InvertOptions, invert

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ILL_POSED = 3
EXIT_NUMERICAL = 4


class UsageError(DiracBCError):
    pass


# -- potential specs -------------------------------------------------------


def _floats(args: str, n: int, name: str) -> list[float]:
    parts = [s for s in args.split(",")] if args else []
    if len(parts) != n:
        raise UsageError(f"'{name}' takes {n} parameters, got {len(parts)}")
    try:
        vals = [float(s) for s in parts]
    except ValueError:
        raise UsageError(f"non-numeric parameter in '{name}:{args}'") from None
    if not all(np.isfinite(vals)):
        raise UsageError(f"non-finite parameter in '{name}:{args}'")
    return vals


def parse_potential_spec(spec: str) -> tuple[Callable, Callable]:
    """Turn a builtin spec string into a pair of functions ``(p, q)``."""
    ps: list[Callable] = []
    qs: list[Callable] = []
    for term in spec.split("+"):
        term = term.strip()
        name, _, args = term.partition(":")
        if name == "zero" and not args:
            continue
        if name == "const":
            p0, q0 = _floats(args, 2, name)
            ps.append(lambda x, p0=p0: np.full_like(x, p0))
            qs.append(lambda x, q0=q0: np.full_like(x, q0))
        elif name == "gauss":
            a, c, w = _floats(args, 3, name)
            ps.append(lambda x, a=a, c=c, w=w: a * np.exp(-w * (x - c) ** 2))
        elif name == "sine":
            b, fr = _floats(args, 2, name)
            qs.append(lambda x, b=b, fr=fr: b * np.sin(2 * np.pi * fr * x))
        else:
            raise UsageError(f"'{spec}' is neither a builtin potential spec nor an existing file (bad term '{term}')")

    def total(parts):
        return lambda x: sum((f(x) for f in parts), np.zeros_like(x))

    return total(ps), total(qs)


def is_builtin_spec(spec: str) -> bool:
    """Existing files win; everything else is parsed as a builtin spec."""
    return not Path(spec).is_file()


def resolve_potential(spec: str, T, N) -> Potential:
    if spec is None:
        raise UsageError("--potential is required")
    if is_builtin_spec(spec):
        if T is None or N is None:
            raise UsageError("--T and --N are required with a builtin potential")
        p, q = parse_potential_spec(spec)
        return sample_potential(make_grid(T, N), p, q)
    pot = io.read_potential(spec)
    _check_grid(pot.grid, T, N, spec)
    return pot


def _check_grid(grid: Grid, T, N, path):
    if N is not None and int(N) != grid.N:
        raise FormatError(f"file declares N={grid.N} but --N={N}", path=path)
    if T is not None and abs(float(T) - grid.T) > 1e-12 * max(1.0, abs(grid.T)):
        raise FormatError(f"file declares T={grid.T:g} but --T={T}", path=path)


# -- configuration ---------------------------------------------------------

DEFAULTS = {
    "T": None,
    "N": None,
    "potential": None,
    "response": None,
    "control": None,
    "out": None,
    "kernel_out": None,
    "gate": None,
    "theta": 0.05,
    "tol": 1e-10,
    "workers": 1,
    "oracle": False,
}


def _on_off(v: str) -> bool:
    if v in ("on", "off"):
        return v == "on"
    raise argparse.ArgumentTypeError("expected 'on' or 'off'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diracbc", description="Forward and inverse solver for the dynamical Dirac system.")
    parser.add_argument("command", choices=["generate", "forward", "invert", "check", "roundtrip", "simulate"])
    parser.add_argument("--T", type=float, help="final time T")
    parser.add_argument("--N", type=int, help="number of subintervals on [0,T]")
    parser.add_argument("--potential", help="builtin spec or potential file")
    parser.add_argument("--response", help="response file")
    parser.add_argument("--control", help="control file")
    parser.add_argument("--out", help="output file")
    parser.add_argument("--kernel-out", dest="kernel_out", help="forward: also dump the fundamental kernel")
    parser.add_argument("--gate", type=_on_off, help="positive-definiteness gate before inversion (default on)")
    parser.add_argument("--theta", type=float, help="positivity threshold (default 0.05)")
    parser.add_argument("--tol", type=float, help="residual tolerance of the per-xi solves (default 1e-10)")
    parser.add_argument("--workers", type=int, help="worker threads for the per-xi solves (default 1)")
    parser.add_argument("--oracle", action="store_true", default=None, help="simulate: compare against the finite-difference oracle")
    parser.add_argument("--config", help="JSON file with defaults for the flags above")
    return parser


def load_config(path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg}", line=exc.lineno, path=path) from None
    if not isinstance(data, dict):
        raise FormatError("config must be a JSON object", path=path)
    data = {k.replace("-", "_"): v for k, v in data.items()}
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise FormatError(f"unknown config keys: {sorted(unknown)}", path=path)
    if isinstance(data.get("gate"), str):
        if data["gate"] not in ("on", "off"):
            raise FormatError("config key 'gate' must be 'on' or 'off'", path=path)
        data["gate"] = data["gate"] == "on"
    return data


def merge_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(load_config(args.config))
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    return cfg


def _need(cfg, key):
    if cfg.get(key) is None:
        raise UsageError(f"--{key.replace('_', '-')} is required")
    return cfg[key]


# -- commands --------------------------------------------------------------


def cmd_generate(cfg, out) -> int:
    spec = _need(cfg, "potential")
    pot = resolve_potential(spec, cfg["T"], cfg["N"])
    io.write_potential(_need(cfg, "out"), pot)
    return EXIT_OK


def write_kernel(path, k) -> None:
    g = k.grid
    lines = [io._meta_line(g), "x,t,re_w1,im_w1,re_w2,im_w2"]
    js, ms = np.nonzero(k.mask)
    f = io._fmt
    for j, m in zip(js, ms):
        w1, w2 = k.w1[j, m], k.w2[j, m]
        lines.append(f"{f(j * g.h)},{f(m * g.h)},{f(w1.real)},{f(w1.imag)},{f(w2.real)},{f(w2.imag)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_forward(cfg, out) -> int:
    pot = resolve_potential(cfg["potential"], cfg["T"], cfg["N"])
    k = solve_fundamental_kernel(pot)
    r = response_from_kernel(k)
    io.write_response(_need(cfg, "out"), r)
    if cfg["kernel_out"]:
        write_kernel(cfg["kernel_out"], k)
    out.write(f"r(0)={r.r[0].real:.17g}{r.r[0].imag:+.17g}j p(0)+iq(0)={pot.p[0]:.17g}{pot.q[0]:+.17g}j\n")
    return EXIT_OK


def _read_response(cfg):
    r = io.read_response(_need(cfg, "response"))
    _check_grid(r.grid, cfg["T"], cfg["N"], cfg["response"])
    return r


def _options(cfg, gate_default: bool) -> InvertOptions:
    gate = gate_default if cfg["gate"] is None else bool(cfg["gate"])
    return InvertOptions(gate=gate, theta=float(cfg["theta"]), tol=float(cfg["tol"]), workers=int(cfg["workers"]))


def cmd_invert(cfg, out) -> int:
    r = _read_response(cfg)
    dest = _need(cfg, "out")
    res = invert(r, _options(cfg, gate_default=True))
    io.write_potential(dest, res.potential)
    if res.min_eigenvalue is not None:
        out.write(f"# min_eigenvalue={res.min_eigenvalue!r}\n")
    out.write(io.format_diagnostics(res))
    return EXIT_OK


def cmd_check(cfg, out) -> int:
    r = _read_response(cfg)
    rep = check_positive_definite(assemble_discrete_C(build_connecting_kernel(r)), float(cfg["theta"]))
    out.write(rep.format() + "\n")
    return EXIT_OK if rep.passed else EXIT_ILL_POSED


def _errors(rec: Potential, ref: Potential) -> dict:
    lam = trapezoid_weights(ref.grid.N + 1, ref.grid.h)
    dp = rec.p - ref.p
    dq = rec.q - ref.q
    return {
        "sup_p": float(np.max(np.abs(dp))),
        "sup_q": float(np.max(np.abs(dq))),
        "l2_p": float(np.sqrt(np.sum(lam * dp**2))),
        "l2_q": float(np.sqrt(np.sum(lam * dq**2))),
    }


def roundtrip_table(spec_or_pot, T, N, opts: InvertOptions) -> list[dict]:
    """Forward then invert at ``N, N/2, N/4``; rows carry errors and observed orders."""
    rows = []
    for n in (N // 4, N // 2, N):
        if n < 2:
            continue
        if isinstance(spec_or_pot, str):
            pot = resolve_potential(spec_or_pot, T, n)
        else:
            pot = spec_or_pot(n)
        res = invert(forward(pot), opts)
        row = {"N": n, "h": pot.grid.h, **_errors(res.potential, pot)}
        rows.append(row)
    for prev, cur in zip(rows, rows[1:]):
        for key in ("sup_p", "sup_q"):
            a, b = prev[key], cur[key]
            cur["order_" + key[-1]] = float(np.log2(a / b)) if a > 0 and b > 0 else float("nan")
    return rows


def cmd_roundtrip(cfg, out) -> int:
    spec = _need(cfg, "potential")
    if is_builtin_spec(spec):
        T, N = _need(cfg, "T"), int(_need(cfg, "N"))
        if N < 8 or N % 4:
            raise UsageError("roundtrip needs N divisible by 4 and at least 8")
        rows = roundtrip_table(spec, T, N, _options(cfg, gate_default=False))
    else:
        raise UsageError("roundtrip needs a builtin potential spec (it resamples at N, N/2, N/4)")
    header = "N,h,sup_p,sup_q,l2_p,l2_q,order_p,order_q"
    lines = [header]
    for row in rows:
        op = row.get("order_p")
        oq = row.get("order_q")
        lines.append(
            f"{row['N']},{row['h']:.6g},{row['sup_p']:.6e},{row['sup_q']:.6e},{row['l2_p']:.6e},{row['l2_q']:.6e},"
            f"{'' if op is None else f'{op:.3f}'},{'' if oq is None else f'{oq:.3f}'}"
        )
    text = "\n".join(lines) + "\n"
    out.write(text)
    if cfg["out"]:
        Path(cfg["out"]).write_text(text, encoding="utf-8")
    return EXIT_OK


def cmd_simulate(cfg, out) -> int:
    ctrl = io.read_control(_need(cfg, "control"))
    T = cfg["T"] if cfg["T"] is not None else ctrl.grid.T
    N = cfg["N"] if cfg["N"] is not None else ctrl.grid.N
    pot = resolve_potential(_need(cfg, "potential"), T, N)
    if not pot.grid.same_as(ctrl.grid):
        raise FormatError("control and potential grids differ", path=cfg["control"])
    k = solve_fundamental_kernel(pot)
    wf = apply_duhamel(k, ctrl)
    io.write_wave_field(_need(cfg, "out"), wf)
    if cfg["oracle"]:
        fd = fd_oracle(pot, ctrl)
        gap = max(float(np.max(np.abs(wf.u1 - fd.u1))), float(np.max(np.abs(wf.u2 - fd.u2))))
        out.write(f"oracle_gap={gap:.6e} h={pot.grid.h:.6g}\n")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "forward": cmd_forward,
    "invert": cmd_invert,
    "check": cmd_check,
    "roundtrip": cmd_roundtrip,
    "simulate": cmd_simulate,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = merge_config(args)
        return COMMANDS[args.command](cfg, out)
    except (UsageError, FormatError, InvalidArgumentError) as exc:
        err.write(f"diracbc: error: {exc}\n")
        return EXIT_USAGE
    except IllPosedDataError as exc:
        err.write(f"diracbc: ill-posed data: {exc}\n")
        return EXIT_ILL_POSED
    except NumericalError as exc:
        err.write(f"diracbc: numerical error: {exc}\n")
        return EXIT_NUMERICAL
    except OSError as exc:
        err.write(f"diracbc: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
