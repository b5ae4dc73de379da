"""Period matrix near a collapsing arc, checked against arbitrary precision quadrature."""

import numpy as np
import pytest

mp = pytest.importorskip("mpmath")

from fhtsvd.checks import genus_one_ratio
from fhtsvd.surface import IntervalSystem, build_period_data, radical_real

BASE = (-5.0, -3.3, -2.0, 0.1)


def _finite(aa, lo, hi, k):
    # x = lo + (hi - lo)(1 - cos t)/2 absorbs the endpoint square roots
    def f(t):
        z = lo + (hi - lo) * (1 - mp.cos(t)) / 2
        return z ** k / mp.sqrt(abs(mp.fprod([z - x for x in aa if x not in (lo, hi)])))
    return mp.quad(f, mp.linspace(0, mp.pi, 9))


def _tail(aa, k, side):
    if side > 0:
        f = lambda s: 2 * (aa[-1] + s * s) ** k / mp.sqrt(abs(mp.fprod([aa[-1] + s * s - x for x in aa[:-1]])))
    else:
        f = lambda s: 2 * (aa[0] - s * s) ** k / mp.sqrt(abs(mp.fprod([aa[0] - s * s - x for x in aa[1:]])))
    return mp.quad(f, [0, 1, 10, 100, mp.inf])


def tau11_mpmath(endpoints):
    """tau_11 = 2 * (arc-2 integrals) . A^{-1} e_1 with A from the first gap and the unbounded gap."""
    system = IntervalSystem(endpoints)
    a = endpoints
    aa = [mp.mpf(x) for x in a]
    phase = lambda x: (lambda v: v / abs(v))(complex(radical_real(system, np.array([x]), 1)[0]))
    arc2 = [_finite(aa, aa[2], aa[3], k) / phase((a[2] + a[3]) / 2) for k in (0, 1)]
    gap1 = [_finite(aa, aa[1], aa[2], k) / phase((a[1] + a[2]) / 2) for k in (0, 1)]
    tail = [_tail(aa, k, 1) / phase(a[-1] + 1) + _tail(aa, k, -1) / phase(a[0] - 1) for k in (0, 1)]
    A = mp.matrix([[2 * gap1[0], 2 * gap1[1]], [-2 * tail[0], -2 * tail[1]]])
    Ai = A ** -1
    return complex(2 * (arc2[0] * Ai[0, 0] + arc2[1] * Ai[1, 0]))


@pytest.mark.slow
@pytest.mark.parametrize("eps", [1e-2, 1e-4])
def test_degenerate_tau11_matches_arbitrary_precision(eps):
    mp.mp.dps = 15
    endpoints = BASE + (1.5 - eps, 1.5 + eps)
    ref = tau11_mpmath(endpoints)
    got = build_period_data(IntervalSystem(endpoints)).tau11
    assert abs(abs(got.imag) - abs(ref)) < 1e-9 * abs(ref)


def test_genus_one_ratio_reference():
    # frozen from the same integral evaluated with mpmath at 30 digits
    assert genus_one_ratio(BASE) == pytest.approx(0.8688742721625163, rel=1e-12)


def test_error_shrinks_monotonically():
    target = genus_one_ratio(BASE)
    errs = [abs(build_period_data(IntervalSystem(BASE + (1.5 - e, 1.5 + e))).tau11.imag - target)
            for e in (1e-2, 1e-4, 1e-6)]
    assert np.all(np.diff(errs) < 0)
