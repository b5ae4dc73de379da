import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fhtsvd.checks import random_inner_tuple, sign_changes
from fhtsvd.oracle import (DiscretizedOperator, cauchy_ldu, cauchy_svd, exact_spectrum,
                           hilbert_schmidt_norm_squared, kernel_L, stp_determinant)


@pytest.fixture(scope="module")
def spectrum(system):
    return exact_spectrum(system, 22, order=256)


def test_kernel_symmetric_and_positive(system):
    x, y = -1.0, -0.5
    assert kernel_L(system, x, y) == kernel_L(system, y, x)
    assert kernel_L(system, x, y) > 0


def test_kernel_rejects_points_off_inner_arcs(system):
    with pytest.raises(ValueError):
        kernel_L(system, 0.5, -1.0)


def test_cauchy_svd_matches_dense(system):
    op = DiscretizedOperator(system, 40)
    dense = np.linalg.svd(op.B, compute_uv=False)
    fast = cauchy_svd(*op.generators).sigma
    k = 15
    assert np.allclose(fast[:k], dense[:k], rtol=1e-8, atol=1e-14)


def test_cauchy_ldu_reconstructs(system):
    op = DiscretizedOperator(system, 12)
    L, D, U, rows, cols = cauchy_ldu(*op.generators)
    B = op.B[rows][:, cols]
    assert np.allclose(L @ np.diag(D) @ U, B, atol=1e-15 * np.abs(B).max() * B.shape[0])


def test_spectrum_positive_simple_and_trusted(spectrum):
    lam = spectrum.lambdas
    assert np.all(lam > 0) and np.all(np.diff(lam) < 0)
    assert np.all(spectrum.trusted)


def test_oracle_values_frozen(spectrum):
    # frozen from numpy's dense SVD of the same order-256 Nystrom matrix
    frozen = [1.57517824, 3.05794514, 5.70373513, 7.27622894, 10.14041538, 11.72943674]
    assert np.allclose(spectrum.kappas[:6], frozen, atol=1e-7)


def test_oracle_sign_changes(spectrum):
    assert [sign_changes(spectrum.f_hat[:, n]) for n in range(11)] == list(range(11))


def test_singular_functions_orthonormal(spectrum):
    G = spectrum.f_hat.T @ (spectrum.weights_i[:, None] * spectrum.f_hat)
    assert np.allclose(G, np.eye(G.shape[0]), atol=1e-8)


def test_order_guard(system):
    with pytest.raises(ValueError):
        exact_spectrum(system, 100, order=64)


def test_hilbert_schmidt_trace(system):
    hs2 = hilbert_schmidt_norm_squared(system, order=256)
    sigma = DiscretizedOperator(system, 256).svd.sigma
    assert abs(hs2 - 2 * np.sum(sigma ** 2)) < 1e-2 * hs2


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2 ** 32 - 1))
def test_strict_total_positivity(system, size, seed):
    rng = np.random.default_rng(seed)
    xs = random_inner_tuple(system, size, rng)
    ys = random_inner_tuple(system, size, rng)
    assert stp_determinant(system, xs, ys) > 0


def test_stp_rejects_unsorted(system):
    with pytest.raises(ValueError):
        stp_determinant(system, [-0.5, -1.0], [-1.0, -0.5])


def test_kernel_against_adaptive_quadrature(system):
    from scipy.integrate import quad
    x, y = -1.0, -0.5
    w = lambda z: np.sqrt((z + 5) * (2 - z))
    opts = dict(epsabs=1e-15, epsrel=1e-13)
    left = quad(lambda z: 1 / ((z - x) * (z - y) * np.sqrt(2 - z)), -5, -3.3, weight="alg", wvar=(-0.5, 0), **opts)[0]
    right = quad(lambda z: 1 / ((z - x) * (z - y) * np.sqrt(z + 5)), 1, 2, weight="alg", wvar=(0, -0.5), **opts)[0]
    ref = np.sqrt(w(x) * w(y)) / (4 * np.pi ** 2) * (left + right)
    assert abs(kernel_L(system, x, y) - ref) < 1e-9


def test_kernel_diagonal_positive_at_inner_midpoints(system):
    for lo, hi in system.inner_arcs:
        assert kernel_L(system, 0.5 * (lo + hi), 0.5 * (lo + hi)) > 0


def test_spectrum_stable_under_order_doubling(system):
    coarse = exact_spectrum(system, 15, order=200)
    fine = exact_spectrum(system, 15, order=400)
    assert np.max(np.abs(coarse.kappas - fine.kappas)) < 1e-6


def test_hilbert_schmidt_stable_under_doubling(system):
    a, b = hilbert_schmidt_norm_squared(system, 256), hilbert_schmidt_norm_squared(system, 512)
    assert abs(a / b - 1) < 1e-6


def test_stp_single_and_clustered(system):
    assert stp_determinant(system, [-1.0], [-0.3]) > 0
    xs = [-1.0, -0.99, -0.98, -0.97]
    ys = [-0.5, -0.49, -0.48, -0.47]
    assert stp_determinant(system, xs, ys) > 0
