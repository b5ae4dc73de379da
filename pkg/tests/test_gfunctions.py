import numpy as np
import pytest

from fhtsvd.checks import h_jump_factor
from fhtsvd.surface import ABOVE, BELOW, weight_w


def test_Omega_formulas_agree(gfun):
    assert np.allclose(gfun.Omega, gfun.Omega_from_T(), atol=1e-10)
    assert np.allclose(gfun.Omega, gfun.Omega_from_arcs(), atol=1e-10)


def test_delta_solves_moment_system(gfun):
    assert gfun.moment_residual() < 1e-10
    assert np.allclose(gfun.published_delta, 2 * gfun.delta)


def test_d_at_infinity_two_ways(gfun):
    assert abs(gfun.d_inf - gfun.d_inf_extrapolated()) < 1e-6


def test_g_at_infinity(gfun):
    assert abs(gfun.g_function(1e7j) - gfun.g_inf) < 1e-6


def test_C0_is_imaginary(gfun, theta):
    C0 = gfun.C0(theta)
    assert abs(C0.real) < 1e-12 and abs(C0.imag - 2.294818415231867) < 1e-9


def test_fay_identity(gfun, theta):
    z = np.array([0.3 + 0.5j, -4 + 1j, 5 + 2j, -1 - 0.2j])
    assert gfun.fay_residual(theta, z) < 1e-10


@pytest.mark.parametrize("x", [-4.2, -1.0, 1.5])
def test_arc_jumps(system, gfun, x):
    outer = x < -3.3 or x > 1
    gsum = gfun.g_function(x, ABOVE) + gfun.g_function(x, BELOW)
    assert abs(gsum - (1 if outer else -1)) < 1e-10
    dsum = gfun.d_function(x, ABOVE) + gfun.d_function(x, BELOW)
    assert abs(dsum + np.log(weight_w(system, x).real)) < 1e-9
    assert abs(gfun.h_prefactor(x, ABOVE) - h_jump_factor(system, x) * gfun.h_prefactor(x, BELOW)) < 1e-12


@pytest.mark.parametrize("k,x", [(1, -2.6), (2, 0.55)])
def test_gap_jumps(system, gfun, k, x):
    assert abs(gfun.g_function(x, ABOVE) - gfun.g_function(x, BELOW) - 1j * gfun.Omega[k - 1]) < 1e-10
    assert abs(gfun.d_function(x, ABOVE) - gfun.d_function(x, BELOW) - 1j * gfun.delta[k - 1]) < 1e-9
    assert abs(gfun.h_prefactor(x, ABOVE) - h_jump_factor(system, x) * gfun.h_prefactor(x, BELOW)) < 1e-12


def test_h_behaves_like_one_over_z(gfun):
    z = np.array([1e6j, 1e8j, -1e7 + 1e7j])
    assert np.allclose(gfun.h_prefactor(z) * z, 1.0, atol=1e-5)


def test_shore_required_inside_hull(gfun):
    with pytest.raises(ValueError):
        gfun.h_prefactor(-1.0)


def test_h_vanishes_at_a1_and_g_is_half_there(gfun):
    assert gfun.h_prefactor(np.array([-5.0]), ABOVE)[0] == 0
    assert gfun.g_function(np.array([-5.0]), ABOVE)[0] == pytest.approx(0.5, abs=1e-14)


def test_riemann_constants_and_W0_consistent(pd, abel):
    from fhtsvd.theta import lattice_distance
    J = np.array(abel.J) - 1
    total = 2 * abel.riemann_constants() + 2 * abel.upper_at_branch[J].sum(axis=0) - 2 * abel.W0
    assert lattice_distance(pd.tau, total) < 1e-10
