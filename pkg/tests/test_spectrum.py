import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fhtsvd.checks import chebyshev_inner_grid, sign_changes
from fhtsvd.spectrum import PhaseError, SpectrumError, SpectrumSolver
from fhtsvd.surface import ABOVE


def test_first_roots(roots):
    n, k = roots
    assert n[:4].tolist() == [0, 1, 2, 3]
    assert np.allclose(k[:4], [1.12106, 2.68799, 5.60401, 7.18300], atol=1e-4)


def test_indicator_is_real_on_the_line(solver, roots):
    assert solver.indicator_residual(roots[1]) < 1e-10
    grid = np.linspace(1, 30, 200)
    assert np.max(np.abs(np.imag(solver.real_line_indicator(grid, check=False)))) < 1e-8


def test_indicator_rejects_complex_kappa(solver):
    with pytest.raises(TypeError):
        solver.real_line_indicator(np.array([2.0]) + 0.5j)


def test_indicator_flags_a_wrong_phase(solver, monkeypatch):
    monkeypatch.setattr(solver, "_phase", lambda W: np.ones(np.shape(W)[:-1]))
    with pytest.raises(PhaseError):
        solver.real_line_indicator(np.linspace(1, 3, 7))


def test_roots_are_simple(solver, roots):
    assert np.all(np.abs([solver.line_derivative(k) for k in roots[1]]) > 1e-3)


@settings(max_examples=20, deadline=None)
@given(st.floats(1.0, 30.0), st.integers(1, 5))
def test_window_counting_bound(solver, roots, k0, N):
    width = N * (solver.genus - 1) * solver.period
    if k0 + width > 40:
        return
    m = np.count_nonzero((roots[1] >= k0) & (roots[1] < k0 + width))
    assert (N - 1) * (solver.genus - 1) <= m <= (N + 1) * (solver.genus - 1)


def test_kappa_min_validation(solver):
    with pytest.raises(ValueError):
        solver.find_eigenvalues(0.5, 10)


def test_divisor_solves_the_line(solver, roots):
    seed = None
    for k in roots[1][:10]:
        d = solver.solve_divisor(k, seed=seed)
        seed = d.params
        assert d.residual < 1e-9
        assert solver.divisor_residual(k, d.params) < 1e-9


def test_divisor_loop_winds_once(solver):
    assert abs(abs(solver.divisor_monodromy()) - 1) < 1e-6
    assert 0 < solver.max_excursion() < 0.5


def test_norm_constants_real_and_match_contour(solver, roots):
    for k in roots[1][2:6]:
        N = solver.norm_constants(k)
        assert np.all(N >= -1e-12) and N.max() > 0
        for j in (1, 2):
            c = solver.norm_constants_contour(k, j)
            assert abs(c.imag) < 1e-9 and abs(c.real - N[j - 1]) < 1e-8 * max(1, N.max())


def test_asymptotic_functions_nearly_normalized(solver, roots):
    nf, nh = solver.asymptotic_norms(roots[1][15])
    assert abs(nf - 1) < 0.05 and abs(nh - 1) < 0.05


def test_sign_changes_on_full_inner_arc(solver, system, roots):
    grid = chebyshev_inner_grid(system, 2000)
    for n, k in zip(*roots):
        f, _ = solver.asymptotic_singular_functions(k, grid, margin=0.0)
        assert sign_changes(f) == n


def test_margin_is_enforced(solver, roots):
    with pytest.raises(ValueError):
        solver.asymptotic_singular_functions(roots[1][3], np.array([-1.9999]), margin=0.01)
    with pytest.raises(ValueError):
        solver.asymptotic_singular_functions(roots[1][3], np.array([0.5]), margin=0.01)


def test_psi_unimodular_and_normalized(solver):
    z = np.array([0.3 + 0.7j, -4 + 0.2j, 3 - 2j])
    for kappa in (2.0, 4.1, 9.0):
        P = solver.build_model_Psi(z, kappa)
        assert np.allclose(np.linalg.det(P), 1, atol=1e-10)
        far = solver.build_model_Psi(np.array([1e6j]), kappa)[0]
        assert np.allclose(far, np.eye(2), atol=1e-4)


def test_psi_schwarz_symmetry(solver):
    z = np.array([0.3 + 0.7j, -4 + 0.2j])
    P, Q = solver.build_model_Psi(z, 4.1), solver.build_model_Psi(z.conj(), 4.1)
    assert np.allclose(P, Q.conj(), atol=1e-12)


def test_psi_jumps(solver):
    assert max(solver.psi_jump_residuals(4.1).values()) < 1e-10


def test_psi_fay_determinant(solver):
    lhs, rhs = solver.fay_determinant(np.array([0.3 + 0.5j]), np.array([-1 + 2j]), 5.0)
    assert np.allclose(lhs, rhs, rtol=1e-10)


def test_psi_refused_at_a_root(solver, roots):
    with pytest.raises(SpectrumError):
        solver.build_model_Psi(np.array([1j]), roots[1][2])


def test_theta_eps_validation(pd):
    with pytest.raises(ValueError):
        SpectrumSolver(pd, theta_eps=1e-3)


def test_asymptotics_summary(solver):
    summary = solver.asymptotics(1.0, 15.0)
    assert summary.kappas.size == summary.n.size == len(summary.divisors)
    assert np.all(summary.divisor_residuals < 1e-9)
    assert np.allclose(summary.lambdas, np.exp(-summary.kappas))


@pytest.mark.slow
def test_genus_three_divisor(solver3):
    n, k = solver3.find_eigenvalues(1.0, 12.0)
    assert solver3.counting_violations(k, 1.0, 12.0) == 0
    seed = None
    for kappa in k[:6]:
        d = solver3.solve_divisor(kappa, seed=seed)
        seed = d.params
        assert d.residual < 1e-8
        assert len(d.points) == 2
