"""Numerical acceptance checks.

Each ``check_*`` function returns a :class:`CheckResult`; the self test
and the acceptance tests call the same functions, so a failing criterion
looks identical in both places.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .oracle import DiscretizedOperator, hilbert_schmidt_norm_squared, stp_determinant
from .reports import MAIN_EXAMPLE, Pipeline, RunConfig, optimal_shift
from .surface import ABOVE, BELOW, IntervalSystem, build_period_data, weight_w


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = "; ".join(self.failures[:3])
        return f"[{status}] criterion {self.criterion}: {self.name}" + (f" ({extra})" if extra else "")


class _Collector:
    def __init__(self):
        self.failures: list[str] = []
        self.details: dict = {}

    def require(self, ok: bool, message: str):
        if not ok:
            self.failures.append(message)

    def result(self, criterion: int, name: str) -> CheckResult:
        return CheckResult(criterion, name, not self.failures, self.details, self.failures)


@lru_cache(maxsize=4)
def pipeline(endpoints=MAIN_EXAMPLE, n_max: int = 22, quad_order: int = 256) -> Pipeline:
    return Pipeline(RunConfig(endpoints=endpoints, n_max=n_max, quad_order=quad_order))


# ------------------------------------------------------------------ 1

def check_slope(endpoints=MAIN_EXAMPLE, fit=(5, 22), tol=0.02) -> CheckResult:
    """Fitted decay of ln lambda_n^exact against -pi / Im tau_11."""
    c = _Collector()
    start = time.perf_counter()
    pl = pipeline(endpoints, n_max=fit[1])
    spec = pl.oracle()
    n = spec.n[fit[0]:fit[1] + 1]
    slope, intercept = np.polyfit(n, np.log(spec.lambdas[n]), 1)
    predicted = -np.pi / pl.pd.tau11.imag
    rel = abs(slope - predicted) / abs(predicted)
    dual = abs(pl.pd.tau11 - pl.pd.tau11_direct)
    elapsed = time.perf_counter() - start
    c.details.update(slope_fit=float(slope), slope_predicted=float(predicted), relative_error=float(rel),
                     intercept=float(intercept), tau11_dual_gap=float(dual), seconds=elapsed)
    c.require(rel < tol, f"relative slope error {rel:.3g} >= {tol}")
    c.require(dual < 1e-8, f"tau11 formulas differ by {dual:.3g}")
    c.require(bool(np.all(spec.trusted[n])), "untrusted oracle values inside the fit range")
    c.require(elapsed < 120, f"took {elapsed:.1f} s")
    return c.result(1, "slope of ln lambda_n matches -pi/Im tau11")


# ------------------------------------------------------------------ 2

def check_gap(endpoints=MAIN_EXAMPLE, n_max=22, window=5) -> CheckResult:
    """|kappa_exact - kappa_approx| after index alignment: small and shrinking."""
    c = _Collector()
    pl = pipeline(endpoints, n_max=n_max)
    n, ka = pl.approximate_roots()
    spec = pl.oracle(n_max)
    approx = _by_index(n, ka, spec.n)
    shift = optimal_shift(spec.n, approx, spec.kappas)
    idx = np.arange(8, n_max + 1)
    idx = idx[idx + shift <= n_max]
    gaps = np.abs(spec.kappas[idx + shift] - approx[idx])
    c.details.update(shift=int(shift), n=idx.tolist(), gaps=gaps.tolist())
    c.require(bool(np.all(np.isfinite(gaps))), "missing approximate roots")
    c.require(bool(np.all(gaps < 0.5)), f"max gap {np.nanmax(gaps):.3g} >= 0.5")
    trend = idx <= 20
    meds = np.array([np.median(gaps[trend][i:i + window]) for i in range(np.count_nonzero(trend) - window + 1)])
    c.details["rolling_medians"] = meds.tolist()
    c.require(bool(np.all(np.diff(meds) <= 1e-12)), "rolling medians are not non-increasing")
    return c.result(2, "approximate and exact kappa_n converge")


def _by_index(n, values, wanted):
    out = np.full(len(wanted), np.nan)
    lookup = dict(zip(np.asarray(n).tolist(), np.asarray(values).tolist()))
    for i, m in enumerate(np.asarray(wanted).tolist()):
        out[i] = lookup.get(m, np.nan)
    return out


# ------------------------------------------------------------------ 3

def check_root_brackets(endpoints=MAIN_EXAMPLE, kappa_max=40.0, sub=64) -> CheckResult:
    """One root per sign-change bracket, and the window counting bound."""
    c = _Collector()
    sp = pipeline(endpoints).solver
    step = sp.period / sp.scan_fraction
    grid = np.arange(1.0, kappa_max + step, step)
    vals = sp.real_line_indicator(grid)
    n, roots = sp.find_eigenvalues(1.0, kappa_max)
    brackets = np.nonzero(vals[:-1] * vals[1:] < 0)[0]
    bad = 0
    for i in brackets:
        fine = np.linspace(grid[i], grid[i + 1], sub + 1)
        fv = sp.real_line_indicator(fine)
        inside = np.count_nonzero((roots >= grid[i]) & (roots <= grid[i + 1]))
        if np.count_nonzero(fv[:-1] * fv[1:] < 0) != 1 or inside != 1:
            bad += 1
    below = sp.find_eigenvalues(1.0, kappa_max)[0][0]
    violations = sp.counting_violations(roots, 1.0, kappa_max)
    c.details.update(brackets=int(brackets.size), roots=int(roots.size), bad_brackets=bad,
                     window_violations=violations, first_index=int(below),
                     indicator_imag=float(sp.indicator_residual(roots)))
    c.require(brackets.size == roots.size, f"{brackets.size} brackets but {roots.size} roots")
    c.require(bad == 0, f"{bad} brackets without exactly one root")
    c.require(violations == 0, f"{violations} counting windows out of bounds")
    return c.result(3, "exactly one root per bracket and window counts in bounds")


# ------------------------------------------------------------------ 4

def a_periods_by_quadpack(pd) -> np.ndarray:
    """A-periods of the normalized differentials via QUADPACK, independent of the period builder.

    Row j holds the integrals of omega_1..omega_g over A_{j+1}.
    """
    a = pd.system.a
    g = pd.genus
    out = np.empty((g, g))

    def finite(lo, hi, k):
        mid = 0.5 * (lo + hi)
        others = a[(a != lo) & (a != hi)]
        # sign of R on this gap, then the endpoint factors go into the QUADPACK weight
        sign = np.sign(pd.omega(mid + 0j)[k].real * pd.polynomial(k + 1, mid))
        f = lambda x: sign * pd.polynomial(k + 1, x) / np.sqrt(np.prod(np.abs(x - others)))
        return quad(f, lo, hi, weight="alg", wvar=(-0.5, -0.5), epsabs=1e-14, epsrel=1e-13, limit=200)[0]

    def tail(k):
        right = lambda s: (pd.omega(a[-1] + s * s + 0j)[k] * 2 * s).real
        left = lambda s: (pd.omega(a[0] - s * s + 0j)[k] * 2 * s).real
        opts = dict(epsabs=1e-14, epsrel=1e-13, limit=400)
        return quad(right, 0, np.inf, **opts)[0] + quad(left, 0, np.inf, **opts)[0]

    for k in range(g):
        for j in range(g - 1):
            out[j, k] = 2 * finite(a[2 * j + 1], a[2 * j + 2], k)
        out[g - 1, k] = -2 * tail(k)
    return out


def check_periods(endpoints=MAIN_EXAMPLE) -> CheckResult:
    c = _Collector()
    pd = pipeline(endpoints).pd
    tau = pd.tau
    sym = float(np.max(np.abs(tau - tau.T)))
    re = float(np.max(np.abs(tau.real)))
    eig = np.linalg.eigvalsh(0.5 * (tau.imag + tau.imag.T))
    norm = a_periods_by_quadpack(pd)
    a_err = float(np.max(np.abs(norm - np.eye(pd.genus))))
    dual = float(abs(pd.tau11 - pd.tau11_direct))
    c.details.update(symmetry=sym, real_part=re, im_eigs=eig.tolist(), a_normalization=a_err, tau11_dual=dual)
    c.require(sym < 1e-9, f"asymmetry {sym:.3g}")
    c.require(re < 1e-9, f"real part {re:.3g}")
    c.require(bool(np.all(eig > 0)), "Im tau not positive definite")
    c.require(a_err < 1e-8, f"A-normalization error {a_err:.3g}")
    c.require(dual < 1e-8, f"tau11 formulas differ by {dual:.3g}")
    return c.result(4, "period matrix structure")


# ------------------------------------------------------------------ 5

def check_theta(endpoints=MAIN_EXAMPLE, samples=100, seed=7) -> CheckResult:
    c = _Collector()
    sp = pipeline(endpoints).solver
    th = sp.theta
    tau = th.tau
    g = tau.shape[0]
    rng = np.random.default_rng(seed)
    z = rng.uniform(-1, 1, (samples, g)) + 1j * rng.uniform(-0.5, 0.5, (samples, g))
    scale = np.abs(th.theta(z))
    parity = float(np.max(np.abs(th.theta(-z) - th.theta(z)) / scale))
    quasi = 0.0
    for k in range(g):
        e = np.eye(g)[k]
        quasi = max(quasi, float(np.max(np.abs(th.theta(z + e) - th.theta(z)) / scale)))
        factor = np.exp(-1j * np.pi * tau[k, k] - 2j * np.pi * z[:, k])
        quasi = max(quasi, float(np.max(np.abs(th.theta(z + tau[:, k]) - factor * th.theta(z))
                                        / np.abs(factor * th.theta(z)))))
    h = 1e-5
    grad = th.gradient(z)
    fd = np.stack([(th.theta(z + h * np.eye(g)[k]) - th.theta(z - h * np.eye(g)[k])) / (2 * h)
                   for k in range(g)], axis=-1)
    grad_err = float(np.max(np.abs(grad - fd)) / np.max(np.abs(grad)))
    odd = float(abs(th.theta(sp.abel.W0)))
    c.details.update(parity=parity, quasi_periodicity=quasi, gradient=grad_err, theta_at_W0=odd)
    c.require(parity < 1e-10, f"parity residual {parity:.3g}")
    c.require(quasi < 1e-10, f"quasi-periodicity residual {quasi:.3g}")
    c.require(grad_err < 1e-6, f"gradient mismatch {grad_err:.3g}")
    c.require(odd < sp.theta_eps, f"Theta(W0) = {odd:.3g}")
    return c.result(5, "theta function identities")


# ------------------------------------------------------------------ 6

def h_jump_factor(system: IntervalSystem, x: float) -> complex:
    """Expected ratio h_+ / h_- at a real point off the branch points."""
    a = system.a
    g = system.genus
    k = int(np.searchsorted(a, x))
    if k % 2 == 1:                              # inside arc (k + 1) // 2
        arc = (k + 1) // 2
        return -1j if arc in (1, g + 1) else 1j
    gap = k // 2                                # positional gap between arcs gap and gap + 1
    return 1.0 if gap in (0, 1, g + 1) else -1.0


def generic_kappas(sp, count: int = 3) -> np.ndarray:
    """Midpoints between consecutive roots, as far from the theta divisor as the line gets."""
    _, roots = sp.find_eigenvalues(1.0, 1.0 + (count + 3) * sp.period)
    return 0.5 * (roots[:count] + roots[1:count + 1])


def check_jumps(endpoints=MAIN_EXAMPLE, kappas=None) -> CheckResult:
    c = _Collector()
    sp = pipeline(endpoints).solver
    kappas = generic_kappas(sp) if kappas is None else kappas
    gf = sp.gfun
    system = sp.system
    a = system.a
    g = sp.genus
    res = {}
    for k in range(1, g + 2):
        lo, hi = system.arc(k)
        x = 0.5 * (lo + hi)
        outer = k in (1, g + 1)
        gp, gm = gf.g_function(x, ABOVE), gf.g_function(x, BELOW)
        res[f"g arc{k}"] = abs(gp + gm - (1.0 if outer else -1.0))
        dp, dm = gf.d_function(x, ABOVE), gf.d_function(x, BELOW)
        res[f"d arc{k}"] = abs(dp + dm + np.log(weight_w(system, x).real))
        hp, hm = gf.h_prefactor(x, ABOVE), gf.h_prefactor(x, BELOW)
        res[f"h arc{k}"] = abs(hp - h_jump_factor(system, x) * hm) / abs(hp)
    for k in range(1, g + 1):
        x = 0.5 * (a[2 * k - 1] + a[2 * k])
        gp, gm = gf.g_function(x, ABOVE), gf.g_function(x, BELOW)
        res[f"g gap{k}"] = abs(gp - gm - 1j * gf.Omega[k - 1])
        dp, dm = gf.d_function(x, ABOVE), gf.d_function(x, BELOW)
        res[f"d gap{k}"] = abs(dp - dm - 1j * gf.delta[k - 1])
        hp, hm = gf.h_prefactor(x, ABOVE), gf.h_prefactor(x, BELOW)
        res[f"h gap{k}"] = abs(hp - h_jump_factor(system, x) * hm) / abs(hp)
    for kappa in kappas:
        for label, r in sp.psi_jump_residuals(kappa).items():
            res[f"Psi {label} kappa={kappa:.4f}"] = r
    worst = max(res, key=res.get)
    c.details["jumps"] = {k: float(v) for k, v in res.items()}
    c.require(res[worst] < 1e-6, f"{worst} residual {res[worst]:.3g}")

    pts = np.array([0.3 + 0.7j, -4.0 + 0.2j, 1.5 - 0.4j, -2.5 + 3j, 10 + 10j])
    det_err = 0.0
    for kappa in kappas:
        P = sp.build_model_Psi(pts, kappa)
        det_err = max(det_err, float(np.max(np.abs(np.linalg.det(P) - 1))))
    far = max(float(np.max(np.abs(sp.build_model_Psi(np.array([1e4j]), kappa)[0] - np.eye(2))))
              for kappa in kappas)
    c.details.update(det=det_err, infinity=far)
    c.require(det_err < 1e-7, f"det Psi - 1 = {det_err:.3g}")
    c.require(far < 1e-3, f"Psi(1e4 i) - I = {far:.3g}")
    return c.result(6, "jump relations of g, d, h and Psi")


# ------------------------------------------------------------------ 7

def sign_changes(values) -> int:
    v = np.asarray(values, float)
    v = v[np.isfinite(v) & (v != 0)]
    return int(np.count_nonzero(v[:-1] * v[1:] < 0))


def random_inner_tuple(system: IntervalSystem, size: int, rng, min_sep: float = 0.02):
    """Strictly increasing points in the inner arcs, pairwise at least min_sep apart."""
    arcs = system.inner_arcs
    lengths = np.array([hi - lo for lo, hi in arcs])
    while True:
        which = rng.choice(len(arcs), size=size, p=lengths / lengths.sum())
        pts = np.sort([rng.uniform(arcs[w][0] + min_sep, arcs[w][1] - min_sep) for w in which])
        if np.all(np.diff(pts) > min_sep):
            return pts


def check_operator(endpoints=MAIN_EXAMPLE, n_max=22, tuples=50, seed=11) -> CheckResult:
    c = _Collector()
    pl = pipeline(endpoints, n_max=n_max)
    system = pl.system
    spec = pl.oracle(n_max)
    lam = spec.lambdas
    rel_gap = float(np.min(-np.diff(lam) / lam[:-1]))
    c.require(bool(np.all(lam > 0)), "non-positive eigenvalue")
    c.require(rel_gap > 1e-6, f"eigenvalues not simple (relative gap {rel_gap:.3g})")
    counts = [sign_changes(spec.f_hat[:, n]) for n in range(11)]
    c.require(counts == list(range(11)), f"sign changes {counts}")

    rng = np.random.default_rng(seed)
    dets = []
    for _ in range(tuples):
        m = int(rng.integers(2, 5))
        dets.append(stp_determinant(system, random_inner_tuple(system, m, rng),
                                    random_inner_tuple(system, m, rng), order=pl.config.quad_order))
    c.require(min(dets) > 0, f"non-positive sTP determinant {min(dets):.3g}")

    hs2 = hilbert_schmidt_norm_squared(system, order=pl.config.quad_order)
    sigma = DiscretizedOperator(system, pl.config.quad_order).svd.sigma
    trace = 2 * float(np.sum(sigma ** 2))
    rel = abs(hs2 - trace) / hs2
    c.details.update(relative_gap=rel_gap, sign_changes=counts, min_det=float(min(dets)),
                     hs_squared=hs2, two_sum_lambda_sq=trace, hs_relative=rel)
    c.require(np.isfinite(hs2), "Hilbert-Schmidt norm is not finite")
    c.require(rel < 0.01, f"trace mismatch {rel:.3g}")
    return c.result(7, "operator theory: simple spectrum, sign changes, sTP, HS norm")


# ------------------------------------------------------------------ 8

def chebyshev_inner_grid(system: IntervalSystem, samples: int) -> np.ndarray:
    """Chebyshev points over the inner arcs, allocated by length, ordered left to right."""
    arcs = system.inner_arcs
    lengths = np.array([hi - lo for lo, hi in arcs])
    counts = np.maximum(8, np.round(samples * lengths / lengths.sum()).astype(int))
    parts = []
    for (lo, hi), m in zip(arcs, counts):
        t = np.cos(np.pi * (np.arange(m) + 0.5) / m)[::-1]
        parts.append(0.5 * (lo + hi) + 0.5 * (hi - lo) * t)
    return np.concatenate(parts)


def overlap(u, v, z, system) -> float:
    """|<u, v>| / (|u| |v|) in the sampled L^2(1/w) inner product."""
    ok = np.isfinite(u) & np.isfinite(v)
    w = 1.0 / weight_w(system, z[ok]).real
    u, v = u[ok], v[ok]
    return float(abs(np.sum(w * u * v)) / np.sqrt(np.sum(w * u * u) * np.sum(w * v * v)))


def check_eigenfunctions(endpoints=MAIN_EXAMPLE, indices=range(8, 16), threshold=0.95,
                         samples=2000) -> CheckResult:
    c = _Collector()
    pl = pipeline(endpoints, n_max=max(22, max(indices)))
    sp = pl.solver
    cheb = chebyshev_inner_grid(pl.system, samples)
    rows = {}
    for n in indices:
        kappa, z, f, _, fo = pl.eigenfunction_table(n)
        ov = overlap(f, fo, z, pl.system)
        f_full, _ = sp.asymptotic_singular_functions(kappa, cheb, margin=0.0)
        changes = sign_changes(f_full)
        rows[n] = {"kappa": float(kappa), "overlap": ov, "sign_changes": changes}
        c.require(ov >= threshold, f"n={n} overlap {ov:.4f}")
        c.require(changes == n, f"n={n} has {changes} sign changes")
    c.details["rows"] = rows
    return c.result(8, "asymptotic singular functions match the oracle")


# ------------------------------------------------------------------ 9

def genus_one_ratio(endpoints4) -> float:
    """Ratio of dzeta/R0 integrals over the first arc and the first gap of a genus 1 curve."""
    a = np.asarray(endpoints4, float)

    def integral(lo, hi):
        others = [x for x in a if x not in (lo, hi)]
        f = lambda t: 1.0 / np.sqrt(abs(np.prod([lo + (hi - lo) * (1 - np.cos(t)) / 2 - x for x in others])))
        return quad(f, 0.0, np.pi, epsabs=1e-14, epsrel=1e-13)[0]

    return integral(a[0], a[1]) / integral(a[1], a[2])


def check_degeneration(base=(-5.0, -3.3, -2.0, 0.1), centre=1.5, eps=(1e-2, 1e-4, 1e-6),
                       tol=0.05) -> CheckResult:
    c = _Collector()
    target = genus_one_ratio(base)
    tau11 = []
    for e in eps:
        pd = build_period_data(IntervalSystem(tuple(base) + (centre - e, centre + e)))
        tau11.append(pd.tau11.imag)
    err = [abs(t - target) / target for t in tau11]
    c.details.update(target=target, eps=list(eps), tau11_im=tau11, relative_errors=err)
    c.require(bool(np.all(np.diff(err) < 0)), "convergence is not monotone")
    c.require(err[-1] < tol, f"relative error {err[-1]:.3g} at eps={eps[-1]:g} (needs < {tol})")
    return c.result(9, "genus degeneration of tau11")


SUITES = {3: check_root_brackets, 4: check_periods, 5: check_theta, 6: check_jumps,
          7: check_operator, 8: check_eigenfunctions}
ALL = {1: check_slope, 2: check_gap, **SUITES, 9: check_degeneration}
