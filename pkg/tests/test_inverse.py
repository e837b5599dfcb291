import numpy as np
import pytest
from conftest import gaussian_case
from hypothesis import given, settings
from hypothesis import strategies as st

from diracbc import (
    IllPosedDataError,
    InvalidArgumentError,
    InvertOptions,
    RecoveredDiagonal,
    ResponseFunction,
    build_connecting_kernel,
    forward,
    invert,
    make_grid,
    recover_diagonal,
    recover_potential,
    sample_potential,
    solve_fundamental_kernel,
    solve_glkm_at,
    trapezoid_weights,
)
from diracbc.inverse import nystrom_inverse_defect


def sup_error(a, b):
    return float(np.max(np.hypot(a.p - b.p, a.q - b.q)))


def test_zero_kernel_gives_zero_solution():
    ck = build_connecting_kernel(ResponseFunction.zero(make_grid(1.0, 8)))
    for j in (1, 4, 8):
        s = solve_glkm_at(ck, j, full=True)
        assert not s.corner.any() and not s.rows.any()
        assert s.residual == 0.0


@pytest.mark.parametrize("j", [0, 9, 2.5, True])
def test_node_index_range(j):
    ck = build_connecting_kernel(ResponseFunction.zero(make_grid(1.0, 8)))
    with pytest.raises(InvalidArgumentError):
        solve_glkm_at(ck, j)


@pytest.mark.parametrize("j", [1, 17, 35, 50])
def test_inverse_block_identity_against_dense_inverse(j):
    N = 50
    ck = build_connecting_kernel(forward(gaussian_case(N)))
    s = solve_glkm_at(ck, j, full=True)
    assert nystrom_inverse_defect(ck, s) <= 1e-8
    # dense oracle: (gamma I + C L)^-1 = gamma^-1 I + K L
    lam = np.tile(trapezoid_weights(j + 1, ck.grid.h), 2)
    A = 2.0 * np.eye(2 * j + 2) + ck.block(j) * lam[None, :]
    inv = np.linalg.inv(A)
    np.testing.assert_allclose(inv, 0.5 * np.eye(2 * j + 2) + s.rows * lam[None, :], atol=1e-8)


def test_row_solution_matches_full_solution():
    ck = build_connecting_kernel(forward(gaussian_case(30)))
    for j in (3, 30):
        a = solve_glkm_at(ck, j)
        b = solve_glkm_at(ck, j, full=True)
        np.testing.assert_allclose(a.corner, b.corner, atol=1e-13)


def test_residuals_within_tolerance():
    ck = build_connecting_kernel(forward(gaussian_case(40)))
    assert max(solve_glkm_at(ck, j).residual for j in range(1, 41)) <= 1e-10


def test_singular_block_is_ill_posed():
    # constant r = 10 drives the larger blocks to indefiniteness; a tiny cap trips the check
    ck = build_connecting_kernel(ResponseFunction(make_grid(1.0, 20), np.full(41, 10.0 + 0j)))
    with pytest.raises(IllPosedDataError) as exc:
        solve_glkm_at(ck, 20, cond_cap=10.0)
    assert exc.value.xi == pytest.approx(1.0)


def test_quadrature_name_checked():
    ck = build_connecting_kernel(ResponseFunction.zero(make_grid(1.0, 4)))
    with pytest.raises(InvalidArgumentError):
        solve_glkm_at(ck, 2, quadrature="simpson")
    with pytest.raises(InvalidArgumentError):
        solve_glkm_at(ck, 2, full=True, quadrature="one-sided")


def test_zero_diagonal_gives_zero_potential():
    g = make_grid(1.0, 5)
    pot = recover_potential(RecoveredDiagonal(g, np.zeros((6, 2, 2), complex)))
    assert not pot.p.any() and not pot.q.any()


def test_constant_diagonal_formula():
    g = make_grid(1.0, 5)
    w = np.zeros((6, 2, 2), complex)
    w[:, 1, 0] = 0.3 - 0.7j
    pot = recover_potential(RecoveredDiagonal(g, w))
    np.testing.assert_array_equal(pot.p, 0.3)
    np.testing.assert_array_equal(pot.q, -0.7)


def test_recover_diagonal_needs_every_node():
    r = forward(gaussian_case(6))
    ck = build_connecting_kernel(r)
    sols = [solve_glkm_at(ck, j) for j in (1, 2, 4, 5, 6)]
    with pytest.raises(InvalidArgumentError, match="missing"):
        recover_diagonal(r, sols)


def test_recovered_diagonal_at_origin_and_against_forward():
    N = 60
    pot = gaussian_case(N)
    k = solve_fundamental_kernel(pot)
    r = forward(pot)
    ck = build_connecting_kernel(r)
    d = recover_diagonal(r, [solve_glkm_at(ck, j) for j in range(1, N + 1)])
    assert d.w1[0] == 0 and d.w2[0] == r.r[0]
    jj = np.arange(N + 1)
    assert np.max(np.abs(d.w1 - k.w1[jj, jj])) <= 0.05
    assert np.max(np.abs(d.w2 - k.w2[jj, jj])) <= 0.05


def test_zero_response_inverts_to_zero():
    res = invert(ResponseFunction.zero(make_grid(1.0, 10)), InvertOptions(gate=True))
    assert not res.potential.p.any() and not res.potential.q.any()
    assert res.min_eigenvalue == pytest.approx(2.0, abs=1e-12)


def test_gate_aborts_on_invalid_data():
    r = ResponseFunction(make_grid(1.0, 50), np.full(101, 10.0 + 0j))
    with pytest.raises(IllPosedDataError, match="not positive definite"):
        invert(r, InvertOptions(gate=True))


def test_round_trip_and_endpoint_identity():
    N = 50
    pot = gaussian_case(N)
    res = invert(forward(pot))
    assert sup_error(res.potential, pot) <= 0.02
    a0 = res.potential.p[0] + 1j * res.potential.q[0]
    assert a0 == pot.a[0]
    assert max(d.reality_defect for d in res.diagnostics) <= 10 * pot.grid.h
    assert [d.xi for d in res.diagnostics] == list(pot.grid.x)


def test_truncation_locality_is_bitwise():
    N, n = 40, 17
    r = forward(gaussian_case(N))
    full = invert(r).potential
    part = invert(r.truncated(n)).potential
    np.testing.assert_array_equal(part.p, full.p[: n + 1])
    np.testing.assert_array_equal(part.q, full.q[: n + 1])


def test_parallel_map_is_deterministic():
    r = forward(gaussian_case(30))
    a = invert(r)
    b = invert(r, InvertOptions(workers=4))
    np.testing.assert_array_equal(a.potential.p, b.potential.p)
    np.testing.assert_array_equal(a.potential.q, b.potential.q)
    assert a.diagnostics == b.diagnostics


def test_worker_count_checked():
    with pytest.raises(InvalidArgumentError):
        invert(ResponseFunction.zero(make_grid(1.0, 4)), InvertOptions(workers=0))


def test_one_sided_quadrature_is_second_order():
    errs = []
    for N in (25, 50, 100):
        pot = gaussian_case(N)
        errs.append(sup_error(invert(forward(pot), InvertOptions(quadrature="one-sided")).potential, pot))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 1.7)


def test_literal_quadrature_is_first_order_with_offset():
    # Im r(0) != 0 exposes the diagonal jump of the kernel
    errs = []
    for N in (25, 50, 100):
        pot = sample_potential(make_grid(1.0, N), lambda x: 0.3 + 0.2 * np.cos(3 * x), lambda x: 0.2 + 0 * x)
        errs.append(sup_error(invert(forward(pot)).potential, pot))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 0.8)


@settings(max_examples=10)
@given(st.floats(-0.4, 0.4), st.floats(-0.4, 0.4), st.floats(0.1, 0.6))
def test_round_trip_property(p0, q0, amp):
    N = 24
    pot = sample_potential(
        make_grid(1.0, N), lambda x: p0 + amp * np.sin(2 * x), lambda x: q0 * np.cos(x)
    )
    res = invert(forward(pot))
    assert sup_error(res.potential, pot) <= 0.1
    assert max(d.residual for d in res.diagnostics) <= 1e-10
