"""Approximate singular values from the real theta divisor and the model solution.

The approximate values kappa_n are the real zeros of Theta(W(kappa) - W0)
along the spectral line.  With the odd characteristic hidden in W0 the theta
value times a fixed phase is real on the line, so roots are bracketed by sign
changes.  At each root the line point is written as a sum of Abel images of
g - 1 real divisor points, one on each cycle A_2, ..., A_g, and the divisor
feeds the norm constants and the asymptotic singular functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from .abel import AbelMap
from .gfunctions import GFunctions
from .surface import ABOVE, BELOW, PeriodData, SurfacePoint, weight_w
from .theta import ThetaContext, reduce_to_cell


class SpectrumError(RuntimeError):
    """Root bracketing or a divisor solve failed."""


class PhaseError(SpectrumError):
    """The phase-normalized theta value is not real on the spectral line."""


@dataclass(frozen=True)
class Divisor:
    """Divisor points on the cycles A_2..A_g and their loop parameters.

    Each loop parameter lies in [0, 2): [0, 1) runs along the upper sheet,
    [1, 2) back along the lower sheet.
    """

    points: tuple
    params: np.ndarray
    residual: float


@dataclass(frozen=True)
class SpectralAsymptotics:
    """Approximate spectrum on a kappa window."""

    n: np.ndarray
    kappas: np.ndarray
    lambdas: np.ndarray
    divisors: list
    norm_constants: np.ndarray
    slope: float

    @property
    def divisor_residuals(self) -> np.ndarray:
        return np.array([np.nan if d is None else d.residual for d in self.divisors])


@dataclass
class SpectrumSolver:
    """Approximate singular values and functions for one interval system."""

    pd: PeriodData
    theta_eps: float = 1e-12
    abel: AbelMap | None = None
    gfun: GFunctions | None = None
    theta: ThetaContext | None = None
    scan_fraction: int = 16

    def __post_init__(self):
        self.abel = self.abel or AbelMap(self.pd)
        self.gfun = self.gfun or GFunctions(self.pd, self.abel)
        self.theta = self.theta or ThetaContext(self.pd.tau, eps=self.theta_eps)
        if not 1e-14 < self.theta_eps < 1e-4:
            raise ValueError("theta_eps must lie in (1e-14, 1e-4)")

    @property
    def genus(self) -> int:
        return self.pd.genus

    @property
    def system(self):
        return self.pd.system

    @property
    def period(self) -> float:
        """kappa-period pi / Im tau_11 of the first line coordinate."""
        return self.abel.line_period

    @property
    def slope(self) -> float:
        return self.period

    # ------------------------------------------------------------- the line

    def theta_line(self, kappa):
        """Theta(W(kappa) - W0)."""
        return self.theta.theta(self.abel.spectral_line(kappa) - self.abel.W0)

    def _phase(self, W):
        tau11 = self.pd.tau[0, 0]
        return np.exp(0.25j * np.pi * tau11 - 1j * np.pi * W[..., 0] - 0.5j * np.pi)

    def real_line_indicator(self, kappa, check: bool = True):
        """Phase-normalized theta value on the line; real for real kappa."""
        if np.iscomplexobj(kappa):
            raise TypeError("kappa must be real")
        W = self.abel.spectral_line(kappa)
        value = self._phase(W) * self.theta.theta(W - self.abel.W0)
        if check:
            scale = np.maximum(np.abs(value), 1.0)
            if np.max(np.abs(value.imag) / scale) > 1e-6:
                raise PhaseError("indicator has a non-negligible imaginary part")
        return value.real if np.ndim(value) else float(value.real)

    def indicator_residual(self, kappas) -> float:
        """Largest |Im| / max(1, |value|) of the indicator over ``kappas``."""
        W = self.abel.spectral_line(np.asarray(kappas, float))
        value = self._phase(W) * self.theta.theta(W - self.abel.W0)
        return float(np.max(np.abs(value.imag) / np.maximum(np.abs(value), 1.0)))

    def line_derivative(self, kappa) -> float:
        """d/dkappa of the indicator, from the theta gradient."""
        W = self.abel.spectral_line(kappa)
        val, grad = self.theta.value_and_gradient(W - self.abel.W0)
        dW = self.pd.tau[:, 0] / (1j * np.pi)
        phase = self._phase(W)
        dphase = -1j * np.pi * dW[0] * phase
        return float((phase * (grad @ dW) + dphase * val).real)

    # ------------------------------------------------------------- roots

    def _roots_between(self, lo: float, hi: float, step: float) -> np.ndarray:
        if hi <= lo:
            return np.empty(0)
        count = max(2, int(np.ceil((hi - lo) / step)) + 1)
        grid = np.linspace(lo, hi, count)
        values = self.real_line_indicator(grid)
        roots = []
        for i in np.nonzero(values[:-1] * values[1:] < 0)[0]:
            roots.append(brentq(lambda k: self.real_line_indicator(k), grid[i], grid[i + 1],
                                xtol=1e-13, rtol=4 * np.finfo(float).eps))
        roots.extend(grid[values == 0.0])
        return np.unique(np.asarray(roots, float))

    def find_eigenvalues(self, kappa_min: float, kappa_max: float):
        """Ascending roots in [kappa_min, kappa_max] and their indices.

        The index of a root counts the roots in (0, kappa), starting from 0,
        which matches the sign-change labelling of the exact singular
        functions.  The grid is refined when a window count violates the
        counting bound.
        """
        if kappa_min < 1:
            raise ValueError("kappa_min must be at least 1")
        if not np.isfinite(kappa_max) or kappa_max <= kappa_min:
            raise ValueError("kappa_max must be finite and larger than kappa_min")
        fraction = self.scan_fraction
        for _ in range(4):
            step = self.period / fraction
            below = self._roots_between(1e-9, kappa_min, step)
            roots = self._roots_between(kappa_min, kappa_max, step)
            if self.counting_violations(np.concatenate([below, roots]), 1e-9, kappa_max) == 0:
                n = np.arange(roots.size) + below.size
                return n, roots
            fraction *= 2
        raise SpectrumError("root count violates the counting bound after refinement")

    def counting_violations(self, roots, lo: float, hi: float, windows=range(1, 6)) -> int:
        """Number of windows [k0, k0 + N (g-1) period) breaking the counting bound."""
        g = self.genus
        roots = np.sort(np.asarray(roots))
        bad = 0
        for N in windows:
            width = N * (g - 1) * self.period
            starts = np.linspace(lo, max(lo, hi - width), 64) if hi - lo > width else []
            for k0 in starts:
                m = np.count_nonzero((roots >= k0) & (roots < k0 + width))
                if not (N - 1) * (g - 1) <= m <= (N + 1) * (g - 1):
                    bad += 1
        return bad

    # ------------------------------------------------------------- divisor

    def cycle_point(self, ell: int, theta: float):
        """Point on cycle A_{ell+1} (ell = 1..g-1) at loop parameter theta.

        Returns (x, sheet); x is +-inf at the point over infinity.
        """
        a = self.system.a
        g = self.genus
        theta = float(np.mod(theta, 2.0))
        sheet = 1 if theta < 1.0 else -1
        if ell < g - 1:
            lo, hi = a[2 * ell + 1], a[2 * ell + 2]
            x = 0.5 * (lo + hi) - 0.5 * (hi - lo) * np.cos(np.pi * theta)
            return float(x), sheet
        c = self.system.tail_center
        t1, t2 = 1.0 / (a[0] - c), 1.0 / (a[-1] - c)
        t = 0.5 * (t1 + t2) + 0.5 * (t2 - t1) * np.cos(np.pi * theta)
        return (np.inf if t == 0 else float(c + 1.0 / t)), sheet

    def _abel_real(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, float)
        out = np.empty(x.shape + (self.genus,), complex)
        inf = ~np.isfinite(x)
        out[inf] = self.abel.u_infinity
        if np.any(~inf):
            out[~inf] = self.abel.boundary_value(x[~inf], ABOVE)
        return out

    def _base_index(self, ell: int) -> int:
        """0-based branch index paired with cycle A_{ell+1}: a_{2 ell + 3}, or a_1 for A_g."""
        return 0 if ell == self.genus - 1 else 2 * ell + 2

    @cached_property
    def _base_sum(self) -> np.ndarray:
        idx = [self._base_index(ell) for ell in range(1, self.genus)]
        return self.abel.upper_at_branch[idx].sum(axis=0)

    def divisor_coordinates(self, params) -> np.ndarray:
        """X = sum_l s_l (u(p_l) - u(b_l)), a real vector, shape (m, g).

        b_l is the branch point paired with the cycle of p_l; each term is
        real because the differentials are real on the gaps.
        """
        params = np.atleast_2d(np.asarray(params, float))
        total = np.zeros((params.shape[0], self.genus))
        for ell in range(1, self.genus):
            pts = [self.cycle_point(ell, th) for th in params[:, ell - 1]]
            xs = np.array([p[0] for p in pts])
            sheets = np.array([p[1] for p in pts], float)
            rel = self._abel_real(xs) - self.abel.upper_at_branch[self._base_index(ell)]
            total += sheets[:, None] * rel.real
        return total

    def divisor_image(self, params) -> np.ndarray:
        """Sum of u(p_l) over the divisor points modulo the lattice, shape (m, g)."""
        return self.divisor_coordinates(params) + self._base_sum

    def coordinate_target(self, kappa: float) -> np.ndarray:
        """Real vector that X must match modulo Z^g at a root kappa."""
        T = (self.abel.spectral_line(kappa) - self.abel.W0 - self.abel.riemann_constants()
             - self._base_sum)
        r = reduce_to_cell(self.pd.tau, T)[0]
        return r.real, float(np.max(np.abs(r.imag)))

    @staticmethod
    def _wrap(x):
        return x - np.rint(x)

    def _mismatch(self, params, target) -> np.ndarray:
        return self._wrap(self.divisor_coordinates(params) - target)

    def solve_divisor(self, kappa: float, seed=None, tol: float = 1e-7) -> Divisor:
        """Divisor with sum u(p_l) + K = W(kappa) - W0 in the Jacobian."""
        target, off_line = self.coordinate_target(kappa)
        if off_line > 1e-6:
            raise SpectrumError("line point is not on the real divisor torus")
        g = self.genus
        params = self._solve_loop(target) if g == 2 else self._solve_newton(target, seed)
        resid = self.divisor_residual(kappa, params)
        if resid > 1e-5:
            raise SpectrumError(f"divisor residual {resid:.3g} at kappa={kappa:.6g}")
        points = tuple(SurfacePoint(*self._point_tuple(ell, params[ell - 1])) for ell in range(1, g))
        return Divisor(points=points, params=np.asarray(params, float), residual=resid)

    def divisor_residual(self, kappa: float, params) -> float:
        """Lattice-reduced norm of sum u(p_l) + K - (W(kappa) - W0)."""
        v = (self.divisor_image(params)[0] + self.abel.riemann_constants()
             - (self.abel.spectral_line(kappa) - self.abel.W0))
        return float(np.max(np.abs(reduce_to_cell(self.pd.tau, v)[0])))

    def _point_tuple(self, ell, theta):
        x, sheet = self.cycle_point(ell, theta)
        return complex(x) if np.isfinite(x) else complex(np.inf), sheet

    def _solve_loop(self, target) -> np.ndarray:
        # the last coordinate moves monotonically along the unbounded cycle and
        # gains one unit per loop, so exactly one parameter matches it mod 1
        g = self.genus
        grid = np.linspace(0.0, 2.0, 65)
        F = self.divisor_coordinates(grid[:, None])[:, g - 1] - target[g - 1]
        G = np.unwrap(2 * np.pi * F) / (2 * np.pi)
        for i in range(grid.size - 1):
            k = np.floor(max(G[i], G[i + 1]))
            if min(G[i], G[i + 1]) <= k:
                def local(th):
                    val = self.divisor_coordinates([[th]])[0, g - 1] - target[g - 1]
                    return float(self._wrap(val))
                th = brentq(local, grid[i], grid[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
                return np.array([th])
        raise SpectrumError("no divisor point on the unbounded cycle")

    def _torus_grid(self, samples: int) -> np.ndarray:
        g = self.genus
        m = max(4, int(round(samples ** (1.0 / (g - 1)))))
        axes = [np.linspace(0, 2, m, endpoint=False)] * (g - 1)
        return np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, g - 1)

    def _solve_newton(self, target, seed) -> np.ndarray:
        g = self.genus
        if seed is None or np.max(np.abs(self._mismatch(seed, target))) > 0.05:
            grid = self._torus_grid(4096 if g == 3 else 20000)
            err = np.max(np.abs(self._mismatch(grid, target)), axis=1)
            seed = grid[np.argmin(err)]
        x = np.asarray(seed, float).copy()
        h = 1e-7
        for _ in range(60):
            r = self._mismatch(x, target)[0]
            base = np.max(np.abs(r))
            if base < 1e-13:
                break
            J = np.empty((g, g - 1))
            for k in range(g - 1):
                xp = x.copy()
                xp[k] += h
                J[:, k] = self._wrap(self._mismatch(xp, target)[0] - r) / h
            step = np.linalg.lstsq(J, -r, rcond=None)[0]
            lam = 1.0
            while lam > 1e-6:
                trial = np.mod(x + lam * step, 2.0)
                if np.max(np.abs(self._mismatch(trial, target)[0])) < base:
                    break
                lam /= 2
            x = np.mod(x + lam * step, 2.0)
        return x

    def divisor_monodromy(self, params=None, samples: int = 257) -> float:
        """Increment of X_g while the last divisor point runs once around A_g."""
        g = self.genus
        params = np.zeros(g - 1) if params is None else np.asarray(params, float)
        grid = np.linspace(0.0, 2.0, samples)
        P = np.tile(params, (samples, 1))
        P[:, -1] = grid
        Xg = self.divisor_coordinates(P)[:, g - 1]
        turns = np.unwrap(2 * np.pi * Xg) / (2 * np.pi)
        return float(turns[-1] - turns[0])

    def max_excursion(self, samples: int = 1000) -> float:
        """Largest |X_1| over a sweep of the divisor torus."""
        X = self.divisor_coordinates(self._torus_grid(samples))
        return float(np.max(np.abs(X[:, 0])))

    # ------------------------------------------------------------- norms

    def f_vector(self, kappa: float) -> np.ndarray:
        return self.abel.spectral_line(kappa) - self.abel.W0

    @cached_property
    def C0(self) -> complex:
        return self.gfun.C0(self.theta)

    def norm_constants(self, kappa: float, check: bool = True) -> np.ndarray:
        """(N_1, N_2) at the root kappa; real and non-negative.

        N_j = Theta(f + 2 s u_inf) / Theta(W0 - 2 s u_inf) * C0 / (i tau_1 . grad Theta(f))
        with s = (-1)^j.  The sign of u_inf in the second theta factor follows
        the denominators of the model solution built here.
        """
        f = self.f_vector(kappa)
        u_inf = self.abel.u_infinity
        denom = 1j * (self.pd.tau[:, 0] @ self.theta.gradient(f))
        out = np.empty(2, complex)
        for j in (1, 2):
            s = (-1) ** j
            out[j - 1] = (self.theta.theta(f + 2 * s * u_inf)
                          / self.theta.theta(self.abel.W0 - 2 * s * u_inf) * self.C0 / denom)
        scale = np.max(np.abs(out))
        if check:
            if scale < 1e-10:
                raise SpectrumError("both norm constants vanish")
            if np.max(np.abs(out.imag)) > 1e-8 * max(1.0, scale):
                raise SpectrumError("norm constants are not real")
        return out.real

    def psi_residue_column(self, kappa: float, z, j: int, shore: int | None = ABOVE):
        """Residue at the root kappa of the first-column entry Psi_{j1}(z; .)."""
        return self.psi_residue_row(kappa, z, j, shore=shore)[0]

    def psi_residue_row(self, kappa: float, z, j: int, shore: int | None = ABOVE):
        """Residues of (Psi_{j1}, Psi_{j2}) at the root kappa."""
        s = (-1) ** j
        f = self.f_vector(kappa)
        slope = (self.pd.tau[:, 0] @ self.theta.gradient(f)) / (1j * np.pi)
        u = self.abel(z, shore=shore)
        shift = s * self.abel.u_infinity
        W0 = self.abel.W0
        h = self.gfun.h_prefactor(z, shore=shore)
        th = self.theta.theta
        first = th(u + shift + f) / th(u + shift - W0)
        second = th(-u + shift + f) / th(-u + shift - W0)
        return -s * self.C0 * h * first / slope, -s * self.C0 * h * second / slope

    def norm_constants_contour(self, kappa: float, j: int, order: int = 400) -> complex:
        """-(i / pi^2) times the B_1 loop integral of res Psi_{j1} res Psi_{j2}.

        The loop is collapsed onto I_i, where the integrand flips sign across
        the cut, so the loop integral is twice the upper-shore integral.
        """
        a = self.system.a
        total = 0.0j
        theta = (np.arange(order) + 0.5) * np.pi / order
        for k in range(1, self.genus):
            lo, hi = a[2 * k], a[2 * k + 1]
            mid, rad = 0.5 * (lo + hi), 0.5 * (hi - lo)
            x = mid - rad * np.cos(theta)
            r1, r2 = self.psi_residue_row(kappa, x, j, shore=ABOVE)
            # midpoint rule in theta after x = mid - rad cos(theta)
            total += np.sum(r1 * r2 * rad * np.sin(theta)) * np.pi / order
        # clockwise loop around I_i, upper shore traversed left to right
        return complex(-1j * 2 * total / np.pi ** 2)

    # ------------------------------------------------------------- Upsilon

    def upsilon(self, kappa: float, z, j: int | None = None, shore: int = ABOVE):
        """Upsilon_j(z) = res Psi_{j1} / sqrt(N_j); j defaults to argmax N_j."""
        N = self.norm_constants(kappa)
        if j is None:
            j = int(np.argmax(N)) + 1
        if N[j - 1] <= 0:
            raise SpectrumError(f"N_{j} is not positive")
        return self.psi_residue_column(kappa, z, j, shore=shore) / np.sqrt(N[j - 1])

    def _carrier(self, kappa: float, z, j: int | None):
        """sqrt(w) * 2 Upsilon_+ e^{-i kappa Im g_+ - i Im d_+} / pi on the upper shore."""
        ups = self.upsilon(kappa, z, j)
        gp = self.gfun.g_function(z, shore=ABOVE)
        dp = self.gfun.d_function(z, shore=ABOVE)
        sw = np.sqrt(weight_w(self.system, z).real)
        return sw * 2 * ups * np.exp(-1j * kappa * np.imag(gp) - 1j * np.imag(dp)) / np.pi

    def _classify(self, z, margin: float):
        a = self.system.a
        g = self.genus
        inner = np.zeros(z.shape, bool)
        outer = np.zeros(z.shape, bool)
        for k in range(g + 1):
            lo, hi = a[2 * k], a[2 * k + 1]
            pad = margin * (hi - lo)
            on = (z >= lo) & (z <= hi)
            if np.any(on & ((z < lo + pad) | (z > hi - pad))):
                raise ValueError("sample inside the endpoint margin")
            if k in (0, g):
                outer |= on
            else:
                inner |= on
        if not np.all(inner | outer):
            raise ValueError("samples must lie on the main arcs")
        return inner, outer

    def asymptotic_singular_functions(self, kappa: float, z, j: int | None = None,
                                      margin: float = 0.01, sign: int | None = None):
        """Asymptotic (f_n, h_n) samples; f_n on I_i, h_n on I_e, NaN elsewhere.

        Both are normalized in L^2(., 1/w).  Samples closer than ``margin``
        times the enclosing arc length to an endpoint are rejected.  The
        overall sign makes the first I_e sample of h_n positive unless
        ``sign`` is given.
        """
        z = np.asarray(z, float)
        inner, outer = self._classify(z, margin)
        carrier = self._carrier(kappa, z, j)
        f = np.where(inner, carrier.imag, np.nan)
        h = np.where(outer, carrier.real, np.nan)
        if sign is None:
            first = np.flatnonzero(outer)
            sign = -1 if first.size and h[first[0]] < 0 else 1
        return sign * f, sign * h

    def asymptotic_norms(self, kappa: float, j: int | None = None, order: int = 400):
        """Squared L^2(., 1/w) norms of the asymptotic f_n on I_i and h_n on I_e.

        Integrated over the whole arcs after x = mid - r cos(theta), which
        absorbs the inverse square roots at the endpoints.
        """
        a = self.system.a
        g = self.genus
        theta = (np.arange(order) + 0.5) * np.pi / order
        norms = np.zeros(2)
        for k in range(g + 1):
            lo, hi = a[2 * k], a[2 * k + 1]
            mid, rad = 0.5 * (lo + hi), 0.5 * (hi - lo)
            x = mid - rad * np.cos(theta)
            c = self._carrier(kappa, x, j)
            part = c.real if k in (0, g) else c.imag
            vals = part ** 2 / weight_w(self.system, x).real * rad * np.sin(theta)
            norms[0 if 0 < k < g else 1] += np.sum(vals) * np.pi / order
        return norms[0], norms[1]

    # ------------------------------------------------------------- Psi

    def _W(self, kappa_or_W):
        W = np.asarray(kappa_or_W)
        if W.ndim == 0:
            return self.abel.spectral_line(float(W))
        return W.astype(complex)

    def build_model_Psi(self, z, kappa, shore: int | None = None, min_theta: float = 1e-8):
        """Model solution Psi(z; W(kappa)), shape (..., 2, 2)."""
        W = self._W(kappa)
        W0 = self.abel.W0
        base = self.theta.theta(W - W0)
        if abs(base) < min_theta:
            raise SpectrumError("Theta(W - W0) vanishes: kappa is at a root")
        u = self.abel(z, shore=shore)
        ui = self.abel.u_infinity
        h = self.gfun.h_prefactor(z, shore=shore)
        th = self.theta.theta
        C0 = self.C0
        out = np.empty(np.shape(z) + (2, 2), complex)
        out[..., 0, 0] = th(u - ui - W0 + W) / th(u - ui - W0)
        out[..., 0, 1] = th(-u - ui - W0 + W) / th(-u - ui - W0)
        out[..., 1, 0] = -th(u + ui - W0 + W) / th(u + ui - W0)
        out[..., 1, 1] = -th(-u + ui - W0 + W) / th(-u + ui - W0)
        return out * (C0 * np.asarray(h)[..., None, None] / base)

    def fay_determinant(self, z, x, kappa):
        """(lhs, rhs) of the mixed-column determinant identity for Psi."""
        Pz = self.build_model_Psi(z, kappa)
        Px = self.build_model_Psi(x, kappa)
        lhs = (Pz[..., 0, 0] * Px[..., 1, 1] - Px[..., 0, 1] * Pz[..., 1, 0]) / (x - z)
        W = self._W(kappa)
        W0 = self.abel.W0
        du = self.abel(z) - self.abel(x)
        hz = self.gfun.h_prefactor(z)
        hx = self.gfun.h_prefactor(x)
        rhs = (self.C0 * hz * hx * self.theta.theta(du + W - W0)
               / (self.theta.theta(du - W0) * self.theta.theta(W - W0)))
        return lhs, rhs

    def jump_matrices(self):
        """Expected jumps of Psi: (label, x, matrix) at every arc and gap midpoint."""
        a = self.system.a
        g = self.genus
        out = []
        sigma1 = np.array([[0, 1], [1, 0]], complex)
        for k in range(g + 1):
            x = 0.5 * (a[2 * k] + a[2 * k + 1])
            sign = -1 if k in (0, g) else 1
            out.append((f"arc{k + 1}", x, sign * 1j * sigma1))
        return out

    def gap_jump(self, kappa, k: int) -> np.ndarray:
        """exp(i (kappa Omega_k + delta_k) sigma_3) for gap c_k, k = 1..g-1 or 0."""
        g = self.genus
        idx = g - 1 if k == 0 else k - 1
        phase = kappa * self.gfun.Omega[idx] + self.gfun.delta[idx]
        return np.diag([np.exp(1j * phase), np.exp(-1j * phase)])

    def psi_jump_residuals(self, kappa: float) -> dict:
        """max |Psi_+ - Psi_- J| / max|Psi| at every arc and gap midpoint."""
        a = self.system.a
        g = self.genus
        res = {}
        for label, x, J in self.jump_matrices():
            plus = self.build_model_Psi(x, kappa, shore=ABOVE)
            minus = self.build_model_Psi(x, kappa, shore=BELOW)
            res[label] = float(np.max(np.abs(plus - minus @ J)) / np.max(np.abs(plus)))
        for k in range(1, g + 1):
            x = 0.5 * (a[2 * k - 1] + a[2 * k])
            label = k if k < g else 0
            J = self.gap_jump(kappa, label)
            plus = self.build_model_Psi(x, kappa, shore=ABOVE)
            minus = self.build_model_Psi(x, kappa, shore=BELOW)
            res[f"gap{label}"] = float(np.max(np.abs(plus - minus @ J)) / np.max(np.abs(plus)))
        return res

    # ------------------------------------------------------------- summary

    def asymptotics(self, kappa_min: float, kappa_max: float) -> SpectralAsymptotics:
        n, kappas = self.find_eigenvalues(kappa_min, kappa_max)
        divisors, norms = [], []
        seed = None
        for k in kappas:
            try:
                d = self.solve_divisor(k, seed=seed)
                seed = d.params
                norms.append(self.norm_constants(k))
            except SpectrumError:
                d = None
                norms.append([np.nan, np.nan])
            divisors.append(d)
        return SpectralAsymptotics(n=n, kappas=kappas, lambdas=np.exp(-kappas), divisors=divisors,
                                   norm_constants=np.asarray(norms, float), slope=self.slope)
