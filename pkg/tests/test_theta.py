import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fhtsvd.theta import ThetaContext, lattice_distance, reduce_to_cell

coords = st.floats(-2.0, 2.0)
vec = st.tuples(coords, coords, st.floats(-0.6, 0.6), st.floats(-0.6, 0.6))


def _z(v):
    return np.array([v[0] + 1j * v[2], v[1] + 1j * v[3]])


@settings(max_examples=60, deadline=None)
@given(vec)
def test_even(theta, v):
    z = _z(v)
    assert abs(theta.theta(-z) - theta.theta(z)) <= 1e-10 * abs(theta.theta(z))


@settings(max_examples=60, deadline=None)
@given(vec, st.integers(0, 1))
def test_quasi_periodic(theta, v, k):
    z = _z(v)
    tau = theta.tau
    assert abs(theta.theta(z + np.eye(2)[k]) - theta.theta(z)) <= 1e-10 * abs(theta.theta(z))
    factor = np.exp(-1j * np.pi * tau[k, k] - 2j * np.pi * z[k])
    assert abs(theta.theta(z + tau[:, k]) - factor * theta.theta(z)) <= 1e-10 * abs(factor * theta.theta(z))


@settings(max_examples=30, deadline=None)
@given(vec)
def test_gradient_matches_finite_differences(theta, v):
    z = _z(v)
    h = 1e-6
    fd = np.array([(theta.theta(z + h * e) - theta.theta(z - h * e)) / (2 * h) for e in np.eye(2)])
    assert np.allclose(theta.gradient(z), fd, rtol=1e-6, atol=1e-8)


def test_real_on_real_vectors(theta):
    z = np.array([[0.1, 0.7], [0.4, -0.3]])
    assert np.max(np.abs(theta.theta(z).imag)) < 1e-14


def test_odd_characteristic_vanishes_at_zero(theta):
    assert abs(theta.theta_char([1, 1], [1, 1], np.zeros(2))) > 0.1      # even: n.m = 2
    assert abs(theta.theta_char([1, 0], [1, 0], np.zeros(2))) < 1e-12    # odd: n.m = 1


def test_vanishes_at_W0(theta, abel):
    assert abs(theta.theta(abel.W0)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(vec)
def test_reduction_lands_in_cell_and_keeps_class(pd, v):
    z = _z(v) * 3
    r, n, m = reduce_to_cell(pd.tau, z)
    assert lattice_distance(pd.tau, r - z) < 1e-12
    assert np.all(np.abs(r.real) <= 0.5 + 1e-12)


def test_eps_validation(pd):
    with pytest.raises(ValueError):
        ThetaContext(pd.tau, eps=1.0)
    with pytest.raises(ValueError, match="positive definite"):
        ThetaContext(-pd.tau)
