"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py            # kernel timings
    python3 benchmarks/bench_kernels.py --pipeline # also a full inversion per backend

Each kernel is timed on identical inputs with both backends; the last
column is the largest difference between their outputs.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from diracbc import _pykernels

try:
    from diracbc import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(rng, n_march, n_lu, n_eig):
    a = 0.5 * np.exp(-20 * (np.linspace(0, 1, n_march + 1) - 0.4) ** 2) + 0.3j * np.sin(
        2 * np.pi * np.linspace(0, 1, n_march + 1)
    )
    A = rng.normal(size=(n_lu, n_lu)) + 1j * rng.normal(size=(n_lu, n_lu)) + 4 * np.sqrt(n_lu) * np.eye(n_lu)
    B = rng.normal(size=(n_lu, 2)) + 0j
    H = rng.normal(size=(n_eig, n_eig)) + 1j * rng.normal(size=(n_eig, n_eig))
    H = H + H.conj().T

    def march(k):
        return lambda: np.concatenate(k.march_kernel(a, 1.0 / n_march))

    def lu(k):
        def run():
            M = A.copy()
            perm, _ = k.lu_factor(M)
            return k.lu_solve(M, perm, B)

        return run

    def eig(k):
        def run():
            d, e2 = k.hermitian_tridiag(H)
            lo = float(np.min(d)) - 2 * float(np.sqrt(e2.max())) - 1
            hi = float(np.max(d)) + 2 * float(np.sqrt(e2.max())) + 1
            return np.array(k.bisect_min(d, e2, lo, hi, 1e-12, 200)[0])

        return run

    return [
        (f"march_kernel N={n_march}", march),
        (f"lu_factor+solve n={n_lu}", lu),
        (f"tridiag+bisect n={n_eig}", eig),
    ]


def pipeline(N):
    code = (
        "import time, numpy as np, diracbc as d;"
        f"g=d.make_grid(1.0,{N});"
        "pot=d.sample_potential(g,lambda x:0.5*np.exp(-20*(x-0.4)**2),lambda x:0.3*np.sin(2*np.pi*x));"
        "r=d.forward(pot);t=time.perf_counter();d.invert(r);"
        "print(d.BACKEND, time.perf_counter()-t)"
    )
    rows = []
    for pure in ("0", "1"):
        env = dict(os.environ, DIRACBC_PURE=pure)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        name, secs = out.stdout.split()
        rows.append((name, float(secs)))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--march", type=int, default=400)
    ap.add_argument("--lu", type=int, default=200)
    ap.add_argument("--eig", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--pipeline", type=int, nargs="?", const=60, default=None, metavar="N")
    args = ap.parse_args(argv)

    if _ckernels is None:
        print("compiled extension not available; only the fallback can be timed")
    rng = np.random.default_rng(0)
    print(f"{'kernel':28s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s} {'max diff':>10s}")
    for name, make in cases(rng, args.march, args.lu, args.eig):
        tp, op = best_of(make(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:28s} {tp:11.4f} {'-':>11s}")
            continue
        tc, oc = best_of(make(_ckernels), args.repeat)
        diff = float(np.max(np.abs(op - oc)))
        print(f"{name:28s} {tp:11.4f} {tc:11.4f} {tp / tc:8.1f} {diff:10.2e}")

    if args.pipeline:
        print(f"\nfull inversion, N={args.pipeline}")
        for name, secs in pipeline(args.pipeline):
            print(f"  {name:8s} {secs:8.3f} s")


if __name__ == "__main__":
    main()
