import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fhtsvd.surface import (ABOVE, BELOW, GeometryError, IntervalSystem, build_period_data,
                            differential_zero_locations, radical, radical_real, segment_integral,
                            weight_w)

from conftest import MAIN

increments = st.lists(st.floats(0.3, 3.0), min_size=6, max_size=6)


def test_rejects_unsorted_endpoints():
    with pytest.raises(GeometryError, match="endpoints must be strictly increasing"):
        IntervalSystem((1.0, 0.0, 2.0, 3.0, 4.0, 5.0))


def test_rejects_genus_one():
    with pytest.raises(GeometryError, match="genus >= 2"):
        IntervalSystem((0.0, 1.0, 2.0, 3.0))


def test_parse_and_arcs(system):
    assert IntervalSystem.parse("-5,-3.3,-2,0.1,1,2") == system
    assert system.genus == 2
    assert system.inner_arcs == [(-2.0, 0.1)]
    assert system.outer_arcs == [(-5.0, -3.3), (1.0, 2.0)]
    assert system.gap(1) == (-3.3, -2.0) and system.gap(0) == (0.1, 1.0)


def test_radical_squares_to_polynomial(system):
    z = np.array([0.3 + 0.2j, -7 - 1j, 4 + 3j])
    assert np.allclose(radical(system, z) ** 2, np.prod(z[:, None] - system.a, axis=1), rtol=1e-12)


def test_radical_at_three_matches_closed_form(system):
    # product over (3 - a_j) is 8 * 6.3 * 5 * 2.9 * 2 * 1 = 1461.6
    assert abs(abs(radical_real(system, 3.0)) - np.sqrt(1461.6)) < 1e-12


def test_radical_shores_are_opposite_on_arcs(system):
    x = np.array([-4.0, -1.0, 1.5])
    assert np.allclose(radical_real(system, x, ABOVE), -radical_real(system, x, BELOW))


def test_weight_is_positive_on_support(system):
    x = np.linspace(-4.99, 1.99, 50)
    assert np.all(weight_w(system, x).real > 0)


def test_segment_integrals_real_on_gaps_imaginary_on_arcs(system):
    assert abs(segment_integral(system, 0, 1).imag) < 1e-14
    assert abs(segment_integral(system, 0, 2).real) < 1e-14


def test_period_matrix_main_example(pd):
    assert abs(pd.tau11.imag - 1.39979989) < 1e-7
    assert np.allclose(pd.A_inv @ pd.A, np.eye(2), atol=1e-13)
    assert np.allclose(pd.T, pd.A.T @ pd.L, atol=1e-12)


def test_one_differential_zero_per_gap(pd):
    zeros = differential_zero_locations(pd)
    assert len(zeros) == pd.genus
    assert all(z.residual < 1e-10 for z in zeros)


def test_period_json_roundtrip(pd):
    import json
    doc = json.loads(pd.to_json())
    assert doc["endpoints"] == list(MAIN)
    assert doc["tau_im"][0][0] == pytest.approx(pd.tau11.imag)


@settings(max_examples=15, deadline=None)
@given(increments)
def test_period_matrix_structure_holds_for_random_genus2(incs):
    pd = build_period_data(IntervalSystem(tuple(np.cumsum(incs) - 5.0)))
    tau = pd.tau
    assert np.max(np.abs(tau - tau.T)) < 1e-9
    assert np.max(np.abs(tau.real)) < 1e-9
    assert np.all(np.linalg.eigvalsh(tau.imag) > 0)
    assert abs(pd.tau11 - pd.tau11_direct) < 1e-8


@settings(max_examples=10, deadline=None)
@given(st.floats(-10, 10), st.floats(0.5, 4.0))
def test_tau_invariant_under_affine_maps(shift, scale):
    pd0 = build_period_data(IntervalSystem(MAIN))
    pd1 = build_period_data(IntervalSystem(tuple(scale * np.array(MAIN) + shift)))
    assert np.allclose(pd0.tau, pd1.tau, atol=1e-9)


def test_weight_point_values(system):
    assert weight_w(system, -1.5) == pytest.approx(3.5, abs=1e-14)
    assert weight_w(system, -2.0) == pytest.approx(np.sqrt(12.0), abs=1e-14)
    assert weight_w(system, -5.0) == 0


def test_radical_vanishes_at_branch_points_and_respects_conjugation(system):
    assert np.all(radical(system, system.a + 0j) == 0)
    z = np.array([0.5 + 0.5j])
    assert np.allclose(radical(system, z.conj()), radical(system, z).conj(), atol=1e-14)
    assert radical_real(system, 3.0) > 0
