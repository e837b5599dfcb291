import os
import subprocess
import sys

import numpy as np
import pytest
from conftest import gaussian_case

from diracbc import BACKEND, _pykernels

try:
    from diracbc import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_c = pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")


@needs_c
def test_march_agrees():
    pot = gaussian_case(60)
    py = _pykernels.march_kernel(pot.a, pot.grid.h)
    c = _ckernels.march_kernel(pot.a, pot.grid.h)
    for x, y in zip(py, c):
        np.testing.assert_allclose(x, y, rtol=0, atol=1e-14)


@needs_c
def test_lu_agrees():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(40, 40)) + 1j * rng.normal(size=(40, 40))
    B = rng.normal(size=(40, 2)) + 0j
    LUp, LUc = A.copy(), A.copy()
    pp, ip = _pykernels.lu_factor(LUp)
    pc, ic = _ckernels.lu_factor(LUc)
    assert ip == ic == -1
    np.testing.assert_array_equal(pp, pc)
    np.testing.assert_allclose(LUp, LUc, atol=1e-12)
    for ct in (False, True):
        np.testing.assert_allclose(
            _pykernels.lu_solve(LUp, pp, B, ct), _ckernels.lu_solve(LUc, pc, B, ct), atol=1e-11
        )


@needs_c
def test_eigen_kernels_agree():
    rng = np.random.default_rng(1)
    H = rng.normal(size=(30, 30)) + 1j * rng.normal(size=(30, 30))
    H = H + H.conj().T
    dp, ep = _pykernels.hermitian_tridiag(H.copy())
    dc, ec = _ckernels.hermitian_tridiag(H.copy())
    np.testing.assert_allclose(dp, dc, atol=1e-12)
    np.testing.assert_allclose(ep, ec, atol=1e-10)
    for x in (-5.0, 0.0, 3.0):
        assert _pykernels.sturm_count(dp, ep, x) == _ckernels.sturm_count(dc, ec, x)
    lp, _ = _pykernels.bisect_min(dp, ep, -100.0, 100.0, 1e-12, 200)
    lc, _ = _ckernels.bisect_min(dc, ec, -100.0, 100.0, 1e-12, 200)
    assert abs(lp - lc) <= 1e-10


def test_backend_name():
    assert BACKEND in ("cython", "python")
    if _ckernels is not None and os.environ.get("DIRACBC_PURE", "") in ("", "0"):
        assert BACKEND == "cython"


def test_pure_fallback_selected_by_environment():
    code = (
        "import diracbc, numpy as np;"
        "from diracbc import forward, invert, make_grid, sample_potential;"
        "pot = sample_potential(make_grid(1.0, 20), lambda x: 0.3*np.exp(-x), lambda x: 0*x);"
        "res = invert(forward(pot));"
        "print(diracbc.BACKEND, float(np.max(np.abs(res.potential.p - pot.p))))"
    )
    env = dict(os.environ, DIRACBC_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    name, err = out.stdout.split()
    assert name == "python"
    assert float(err) <= 0.02
