"""Kernel-level checks: B-spline recursion values against hand-derived
uniform quadratic numbers, accumulator symmetry, and agreement between
the jit and numpy paths."""

import numpy as np
import pytest

from fcm import kernels

# Uniform quadratic B-spline on integer knots, piecewise t^2/2,
# -t^2+3t-3/2, (3-t)^2/2: value/derivative columns at the span midpoint
# and at the left knot, derived by direct evaluation of those pieces.
MID_VALUES = (0.125, 0.75, 0.125)
MID_D1 = (-0.5, 0.0, 0.5)
MID_D2 = (1.0, -2.0, 1.0)
KNOT_VALUES = (0.5, 0.5, 0.0)


def test_quadratic_basis_at_midpoint():
    knots = np.arange(8.0)
    ders = kernels.ders_basis_point(knots, 2, 2, 2.5)
    assert ders.shape == (3, 3)
    np.testing.assert_allclose(ders[0], MID_VALUES, atol=1e-15)
    np.testing.assert_allclose(ders[1], MID_D1, atol=1e-15)
    np.testing.assert_allclose(ders[2], MID_D2, atol=1e-14)


def test_quadratic_basis_at_knot():
    knots = np.arange(8.0)
    ders = kernels.ders_basis_point(knots, 2, 2, 2.0)
    np.testing.assert_allclose(ders[0], KNOT_VALUES, atol=1e-15)


@pytest.mark.parametrize("p", [2, 3, 4])
def test_partition_of_unity(p):
    rng = np.random.default_rng(3)
    h = 0.37
    pts = rng.uniform(0, h, size=(40, 2)) + np.array([4 * h, 2 * h])
    val, gx, gy, lap = kernels.element_blocks(pts, 0.0, 0.0, h, p, 4, 2)
    assert val.shape == (40, (p + 1) ** 2)
    np.testing.assert_allclose(val.sum(axis=1), 1.0, atol=1e-13)
    np.testing.assert_allclose(gx.sum(axis=1), 0.0, atol=1e-12 / h)
    np.testing.assert_allclose(gy.sum(axis=1), 0.0, atol=1e-12 / h)
    np.testing.assert_allclose(lap.sum(axis=1), 0.0, atol=1e-10 / h**2)


def test_element_blocks_match_1d_tensor_product():
    # one point, p=2: the 2D block is the outer product of 1D columns
    h = 0.25
    x, y = 4 * h + 0.3 * h, 2 * h + 0.8 * h
    val, gx, gy, lap = kernels.element_blocks(
        np.array([[x, y]]), 0.0, 0.0, h, 2, 4, 2)
    knots = np.arange(8.0)
    bx = kernels.ders_basis_point(knots, 2, 2, 2 + 0.3)
    by = kernels.ders_basis_point(knots, 2, 2, 2 + 0.8)
    expect_val = np.outer(by[0], bx[0]).ravel()
    expect_gx = np.outer(by[0], bx[1]).ravel() / h
    expect_lap = (np.outer(by[0], bx[2]).ravel()
                  + np.outer(by[2], bx[0]).ravel()) / h**2
    np.testing.assert_allclose(val[0], expect_val, rtol=1e-13)
    np.testing.assert_allclose(gx[0], expect_gx, rtol=1e-13)
    np.testing.assert_allclose(lap[0], expect_lap, rtol=1e-12)


def _random_blocks(rng, n=7, m=9):
    w = rng.uniform(0.1, 1.0, n)
    A = rng.standard_normal((n, m))
    B = rng.standard_normal((n, m))
    f = rng.standard_normal(n)
    return w, A, B, f


def test_accumulators_are_bitwise_symmetric():
    rng = np.random.default_rng(11)
    w, A, B, _ = _random_blocks(rng)
    K = np.zeros((9, 9))
    kernels.acc_same(w, A, 0.731, K)
    kernels.acc_pair(w, A, B, -0.413, K)
    assert np.array_equal(K, K.T)


def test_accumulators_match_einsum():
    rng = np.random.default_rng(12)
    w, A, B, f = _random_blocks(rng)
    K = np.zeros((9, 9))
    F = np.zeros(9)
    kernels.acc_same(w, A, 2.0, K)
    kernels.acc_pair(w, A, B, 0.5, K)
    kernels.acc_rhs(w, f, A, 1.5, F)
    M = np.einsum("q,qi,qj->ij", w, A, A)
    P = np.einsum("q,qi,qj->ij", w, A, B)
    np.testing.assert_allclose(K, 2.0 * M + 0.5 * (P + P.T), atol=1e-13)
    np.testing.assert_allclose(F, 1.5 * A.T @ (w * f), atol=1e-14)


def test_numpy_accumulators_bitwise_symmetric():
    rng = np.random.default_rng(14)
    w, A, B, _ = _random_blocks(rng)
    K = np.zeros((9, 9))
    kernels.acc_same_numpy(w, A, 0.731, K)
    kernels.acc_pair_numpy(w, A, B, -0.413, K)
    assert np.array_equal(K, K.T)


@pytest.mark.skipif(not kernels.USING_NUMBA, reason="jit path disabled")
def test_jit_and_numpy_paths_agree():
    rng = np.random.default_rng(13)
    h = 0.125
    pts = rng.uniform(0, h, size=(25, 2)) + np.array([3 * h, 5 * h])
    jit_blocks = kernels.element_blocks_numba(pts, 0.0, 0.0, h, 2, 3, 5)
    np_blocks = kernels.element_blocks_numpy(pts, 0.0, 0.0, h, 2, 3, 5)
    # identical recursion, identical arithmetic: values match bitwise
    for a, b in zip(jit_blocks, np_blocks):
        assert np.array_equal(a, b)

    # accumulators sum the q axis in different orders, so only
    # accumulation-level agreement holds
    w, A, B, f = _random_blocks(rng)
    K1 = np.zeros((9, 9)); K2 = np.zeros((9, 9))
    kernels.acc_same_numba(w, A, 0.7, K1)
    kernels.acc_same_numpy(w, A, 0.7, K2)
    kernels.acc_pair_numba(w, A, B, 1.3, K1)
    kernels.acc_pair_numpy(w, A, B, 1.3, K2)
    np.testing.assert_allclose(K1, K2, atol=1e-13, rtol=0)
    F1 = np.zeros(9); F2 = np.zeros(9)
    kernels.acc_rhs_numba(w, f, A, 0.9, F1)
    kernels.acc_rhs_numpy(w, f, A, 0.9, F2)
    np.testing.assert_allclose(F1, F2, atol=1e-13, rtol=0)
