import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from diracbc import InvalidArgumentError, NumericalError, SingularMatrixError
from diracbc import _pykernels
from diracbc.linalg import hermitian_min_eig, lu_factor, lu_solve


def random_hermitian(rng, n):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return A + A.conj().T


def charpoly_min_root(A):
    """Smallest eigenvalue from the characteristic polynomial by sign-change bracketing."""
    coeffs = np.real(np.poly(A))
    bound = 1 + np.max(np.abs(coeffs[1:] / coeffs[0]))
    xs = np.linspace(-bound, bound, 200001)
    vals = np.polyval(coeffs, xs)
    k = int(np.argmax(np.sign(vals[:-1]) != np.sign(vals[1:])))
    lo, hi = xs[k], xs[k + 1]
    flo = np.polyval(coeffs, lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = np.polyval(coeffs, mid)
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_identity_solve_is_exact():
    b = np.array([1 + 2j, -3, 0.5j])
    sol = lu_solve(np.eye(3), b)
    np.testing.assert_array_equal(sol.x, b)
    assert sol.residual == 0.0


def test_permutation_solve():
    sol = lu_solve(np.array([[0.0, 1.0], [1.0, 0.0]]), np.array([1.0, 2.0]))
    np.testing.assert_array_equal(sol.x, [2.0, 1.0])


def test_random_well_conditioned_residual():
    rng = np.random.default_rng(1)
    A = rng.normal(size=(50, 50)) + 1j * rng.normal(size=(50, 50)) + 20 * np.eye(50)
    b = rng.normal(size=(50, 3)) + 1j * rng.normal(size=(50, 3))
    sol = lu_solve(A, b)
    assert sol.residual <= 1e-12
    assert not sol.flagged


def test_condition_estimate_matches_true_norm():
    rng = np.random.default_rng(2)
    A = rng.normal(size=(30, 30)) + 1j * rng.normal(size=(30, 30))
    true = np.linalg.norm(A, 1) * np.linalg.norm(np.linalg.inv(A), 1)
    est = lu_factor(A).cond_estimate()
    assert true / 10 <= est <= true * (1 + 1e-8)


def test_conjugate_transpose_solve():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    b = rng.normal(size=12) + 0j
    x = lu_factor(A).solve(b, conj_trans=True)
    np.testing.assert_allclose(A.conj().T @ x, b, atol=1e-12)


def test_exact_zero_pivot_raises():
    with pytest.raises(SingularMatrixError):
        lu_solve(np.array([[1.0, 2.0], [2.0, 4.0]]), np.array([1.0, 1.0]))


def test_bad_condition_is_flagged_not_raised():
    A = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-13]])
    sol = lu_solve(A, np.array([1.0, 2.0]), cond_cap=1e8)
    assert sol.flagged and sol.cond_estimate > 1e8


def test_non_square_rejected():
    with pytest.raises(InvalidArgumentError):
        lu_solve(np.ones((2, 3)), np.ones(2))


def test_min_eig_constant_diagonal():
    assert hermitian_min_eig(2.0 * np.eye(7)) == pytest.approx(2.0, abs=1e-12)


def test_min_eig_two_by_two():
    assert hermitian_min_eig(np.array([[2.0, 1.0], [1.0, 2.0]])) == pytest.approx(1.0, abs=1e-12)


def test_min_eig_matches_characteristic_polynomial():
    rng = np.random.default_rng(4)
    A = random_hermitian(rng, 8)
    assert hermitian_min_eig(A) == pytest.approx(charpoly_min_root(A), abs=1e-8)


def test_min_eig_one_by_one():
    assert hermitian_min_eig(np.array([[-3.5]])) == pytest.approx(-3.5, abs=1e-12)


def test_non_hermitian_rejected():
    with pytest.raises(InvalidArgumentError, match="not Hermitian"):
        hermitian_min_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_iteration_cap_raises():
    rng = np.random.default_rng(5)
    with pytest.raises(NumericalError):
        hermitian_min_eig(random_hermitian(rng, 6), maxit=3)


@given(st.integers(1, 9), st.integers(0, 2**32 - 1))
def test_rayleigh_quotient_bound(n, seed):
    rng = np.random.default_rng(seed)
    A = random_hermitian(rng, n)
    lam = hermitian_min_eig(A)
    scale = max(1.0, float(np.max(np.abs(A))))
    V = rng.normal(size=(n, 100)) + 1j * rng.normal(size=(n, 100))
    rq = np.real(np.einsum("ij,ik,kj->j", V.conj(), A, V)) / np.real(np.einsum("ij,ij->j", V.conj(), V))
    assert np.all(lam <= rq + 1e-10 * scale)
    assert lam == pytest.approx(np.linalg.eigvalsh(A)[0], abs=1e-9 * scale)


@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_lu_residual_property(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    b = rng.normal(size=n) + 1j * rng.normal(size=n)
    sol = lu_solve(A, b)
    eps = np.finfo(float).eps
    assert sol.residual <= 50 * n * eps * max(sol.cond_estimate, 1.0)


def test_fallback_kernels_agree_with_numpy():
    rng = np.random.default_rng(6)
    A = rng.normal(size=(20, 20)) + 1j * rng.normal(size=(20, 20))
    LU = A.copy()
    perm, info = _pykernels.lu_factor(LU)
    assert info == -1
    L = np.tril(LU, -1) + np.eye(20)
    U = np.triu(LU)
    np.testing.assert_allclose(L @ U, A[perm], atol=1e-12)
    H = random_hermitian(rng, 10)
    d, e2 = _pykernels.hermitian_tridiag(H)
    T = np.diag(d) + np.diag(np.sqrt(e2), 1) + np.diag(np.sqrt(e2), -1)
    np.testing.assert_allclose(np.linalg.eigvalsh(T), np.linalg.eigvalsh(H), atol=1e-10)
