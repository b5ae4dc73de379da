"""Abel map of the first sheet, its special values and the spectral line.

The map u(z) is the integral of the normalized differentials from a_1 to z in
the plane slit along [a_1, +inf).  Real boundary values are assembled from
whole-segment periods plus one short integral from the nearer branch point,
where the substitution zeta = a + s^2 removes the square-root singularity.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .quadrature import gauss_rule, graded_rule
from .surface import ABOVE, BELOW, PeriodData, SurfacePoint, tail_powers
from .theta import reduce_to_cell


class AbelError(RuntimeError):
    """Quadrature for the Abel map did not settle."""


@dataclass(frozen=True)
class AbelData:
    """Constants of the Abel map used by the theta-function formulas."""

    u_infinity: np.ndarray
    branch_values: np.ndarray
    riemann_constants: np.ndarray
    W0: np.ndarray


def _settle(evaluate, order: int, tol: float, max_order: int = 1024):
    prev = evaluate(order)
    while order < max_order:
        order *= 2
        cur = evaluate(order)
        if np.max(np.abs(cur - prev), initial=0.0) <= tol * max(1.0, np.max(np.abs(cur), initial=0.0)):
            return cur
        prev = cur
    raise AbelError("Abel-map quadrature did not converge")


class AbelMap:
    """Abel map u(z) on the first sheet for the normalized differentials of ``pd``."""

    def __init__(self, pd: PeriodData, order: int = 24, tol: float = 1e-13):
        self.pd = pd
        self.system = pd.system
        self.order = order
        self.tol = tol
        g = pd.genus
        steps = np.empty((2 * g + 1, g), complex)
        steps[0::2] = pd.arc_periods
        steps[1::2] = pd.gap_periods
        # u_+ at every branch point, accumulated along the upper shore
        self.upper_at_branch = np.vstack([np.zeros((1, g)), np.cumsum(steps, axis=0)])

    @property
    def genus(self) -> int:
        return self.pd.genus

    @property
    def tau(self) -> np.ndarray:
        return self.pd.tau

    # ---------------------------------------------------------------- real axis

    def _from_branch(self, base: np.ndarray, x: np.ndarray, order: int) -> np.ndarray:
        """Integral of omega_+ from branch point a[base] to x, zeta = a + sign s^2."""
        a = self.system.a
        g = self.genus
        start = a[base]
        sign = np.where(x >= start, 1.0, -1.0)
        span = np.sqrt(np.abs(x - start))
        nodes, weights = gauss_rule(order, 0.0, 1.0)
        s = span[:, None] * nodes
        offset = sign[:, None] * s ** 2
        zeta = start[:, None] + offset
        seg = np.where(sign > 0, base, base - 1)
        others = np.ones_like(zeta)
        for l, al in enumerate(a):
            diff = np.abs((start - al)[:, None] + offset)
            others = others * np.where((base == l)[:, None], 1.0, np.sqrt(diff))
        phase = 1j ** ((len(a) - 1 - seg) % 4)
        poly = (zeta[..., None] ** np.arange(g)) @ self.pd.P_coeffs.T
        integrand = 2.0 * sign[:, None, None] * poly / (phase[:, None, None] * others[..., None])
        return span[:, None] * np.einsum("k,xkj->xj", weights, integrand)

    def _tail_piece(self, t_from: np.ndarray, order: int) -> np.ndarray:
        """Integral over t in [0, t_from] of the t-form differentials (real t)."""
        nodes, weights = gauss_rule(order, 0.0, 1.0)
        t = t_from[:, None] * nodes
        q = np.einsum("jm,mxk->xkj", self.pd.P_coeffs, tail_powers(self.system, t))
        Q = np.ones_like(t)
        c = self.system.tail_center
        for al in self.system.a:
            Q = Q * np.sqrt(1.0 + t * (c - al))
        return t_from[:, None] * np.einsum("k,xkj->xj", weights, q / Q[..., None])

    def boundary_value(self, x, shore: int = ABOVE) -> np.ndarray:
        """u_{+} (shore=ABOVE) or u_{-} (shore=BELOW) at real x; shape (..., g)."""
        a = self.system.a
        c = self.system.tail_center
        x = np.asarray(x, float)
        flat = x.ravel()
        out = np.empty((flat.size, self.genus), complex)
        t1, t2 = 1.0 / (a[0] - c), 1.0 / (a[-1] - c)
        tvals = 1.0 / np.where(flat == c, np.nan, flat - c)
        far_left = (flat < a[0]) & (tvals > 0.5 * t1)
        far_right = (flat > a[-1]) & (tvals < 0.5 * t2)
        near = ~(far_left | far_right)

        if np.any(near):
            xs = flat[near]
            s = np.clip(np.searchsorted(a, xs, side="right") - 1, 0, len(a) - 2)
            lower_end = np.where(xs < a[0], 0, np.where(xs > a[-1], len(a) - 1, s))
            upper_end = np.minimum(lower_end + 1, len(a) - 1)
            inside = (xs >= a[0]) & (xs <= a[-1])
            pick_upper = inside & (a[upper_end] - xs < xs - a[lower_end])
            base = np.where(pick_upper, upper_end, lower_end)
            vals = _settle(lambda n: self._from_branch(base, xs, n), self.order, self.tol)
            out[near] = self.upper_at_branch[base] + vals
        if np.any(far_left):
            # u(x) = u(inf) + integral from -inf to x
            tx = tvals[far_left]
            out[far_left] = self.u_infinity - _settle(lambda n: self._tail_piece(tx, n), self.order, self.tol)
        if np.any(far_right):
            # u(x) = u(inf) - integral from x to +inf
            tx = tvals[far_right]
            out[far_right] = self.u_infinity - _settle(lambda n: self._tail_piece(tx, n), self.order, self.tol)
        if shore == BELOW:
            out = out.conj()
        return out.reshape(x.shape + (self.genus,))

    # ------------------------------------------------------------ complex plane

    def _ray_to_infinity(self, z: np.ndarray, order: int) -> np.ndarray:
        c = self.system.tail_center
        tz = 1.0 / (z - c)
        nodes, weights = gauss_rule(order, 0.0, 1.0)
        t = tz[:, None] * nodes
        q = np.einsum("jm,mxk->xkj", self.pd.P_coeffs, tail_powers(self.system, t))
        Q = np.ones_like(t)
        for al in self.system.a:
            Q = Q * np.sqrt(1.0 + t * (c - al))
        return tz[:, None] * np.einsum("k,xkj->xj", weights, q / Q[..., None])

    def _vertical(self, z: np.ndarray, order: int) -> np.ndarray:
        x, y = z.real, z.imag
        sign = np.sign(y)
        height = np.sqrt(np.abs(y))
        nodes, weights = graded_rule(order, 0.0, 1.0, levels=10)
        s = height[:, None] * nodes
        zeta = x[:, None] + 1j * sign[:, None] * s ** 2
        R = np.prod(np.sqrt(zeta[..., None] - self.system.a), axis=-1)
        poly = (zeta[..., None] ** np.arange(self.genus)) @ self.pd.P_coeffs.T
        integrand = (2j * sign[:, None] * s)[..., None] * poly / R[..., None]
        return height[:, None] * np.einsum("k,xkj->xj", weights, integrand)

    def __call__(self, z, sheet: int = 1, shore: int | None = None) -> np.ndarray:
        """u(z) on the requested sheet; real z needs ``shore`` on the cuts."""
        if isinstance(z, SurfacePoint):
            z, sheet = z.z, z.sheet
        z = np.asarray(z, complex)
        flat = z.ravel()
        out = np.empty((flat.size, self.genus), complex)
        real = flat.imag == 0
        if np.any(real):
            xs = flat.real[real]
            if shore is None and np.any(self.system.on_arc(xs)):
                raise ValueError("shore tag required for points on a main arc")
            out[real] = self.boundary_value(xs, shore or ABOVE)
        c = self.system.tail_center
        span = self.system.a[-1] - self.system.a[0]
        far = ~real & (np.abs(flat - c) >= span)
        if np.any(far):
            zf = flat[far]
            out[far] = self.u_infinity - _settle(lambda n: self._ray_to_infinity(zf, n), self.order, self.tol)
        close = ~real & ~far
        if np.any(close):
            zc = flat[close]
            start = np.where(zc.imag > 0, 0, 1)
            base = np.empty((zc.size, self.genus), complex)
            for side, tag in ((0, ABOVE), (1, BELOW)):
                pick = start == side
                if np.any(pick):
                    base[pick] = self.boundary_value(zc.real[pick], tag)
            out[close] = base + _settle(lambda n: self._vertical(zc, n), 16, self.tol)
        out = sheet * out
        return out.reshape(z.shape + (self.genus,))

    abel_map = __call__

    # ------------------------------------------------------------ constants

    def _left_infinity(self, order: int) -> np.ndarray:
        a = self.system.a
        c = self.system.tail_center
        t1 = 1.0 / (a[0] - c)
        nodes, weights = gauss_rule(order, 0.0, np.sqrt(-t1))
        t = t1 + nodes ** 2
        q = self.pd.P_coeffs @ tail_powers(self.system, t)
        rest = np.sqrt(c - a[0]) * np.prod(np.sqrt(1.0 + t[:, None] * (c - a[1:])), axis=1)
        return -(q * (2.0 * weights / rest)).sum(axis=1)

    def _right_infinity(self, order: int) -> np.ndarray:
        a = self.system.a
        c = self.system.tail_center
        t2 = 1.0 / (a[-1] - c)
        nodes, weights = gauss_rule(order, 0.0, np.sqrt(t2))
        t = t2 - nodes ** 2
        q = self.pd.P_coeffs @ tail_powers(self.system, t)
        rest = np.sqrt(a[-1] - c) * np.prod(np.sqrt(1.0 + t[:, None] * (c - a[:-1])), axis=1)
        return self.upper_at_branch[-1] + (q * (2.0 * weights / rest)).sum(axis=1)

    @cached_property
    def u_infinity(self) -> np.ndarray:
        """u(infinity) on sheet 1, integrated along (-inf, a_1]; a real vector."""
        return _settle(self._left_infinity, 32, 1e-14).real

    def abel_infinity(self) -> np.ndarray:
        return self.u_infinity

    def u_infinity_upper_path(self) -> np.ndarray:
        """Same constant reached through the upper shore and (a_{2g+2}, inf)."""
        return _settle(self._right_infinity, 32, 1e-14)

    def branch_values(self) -> np.ndarray:
        """u_+(a_j) by quadrature along the upper shore, shape (2g+2, g)."""
        return self.upper_at_branch.copy()

    def branch_values_closed_form(self) -> np.ndarray:
        g = self.genus
        e = np.eye(g)
        tau = self.tau
        out = np.zeros((2 * g + 2, g), complex)
        for k in range(1, g):
            out[2 * k] = e[:k].sum(axis=0) / 2 - (tau[:, k - 1] + tau[:, g - 1]) / 2      # a_{2k+1}
            out[2 * k - 1] = e[:k - 1].sum(axis=0) / 2 - (tau[:, k - 1] + tau[:, g - 1]) / 2  # a_{2k}
        out[2 * g - 1] = e[:g - 1].sum(axis=0) / 2 - tau[:, g - 1] / 2                 # a_{2g}
        out[2 * g] = (e[g - 1] - tau[:, g - 1]) / 2                                    # a_{2g+1}
        out[2 * g + 1] = e[g - 1] / 2                                                  # a_{2g+2}
        return out

    def riemann_constants(self) -> np.ndarray:
        """Sum of u(a_{2j+1}), j = 1..g, from the quadrature branch values."""
        return self.upper_at_branch[2:2 * self.genus + 1:2].sum(axis=0)

    def riemann_constants_doubled_closed_form(self) -> np.ndarray:
        """Closed form of 2K in terms of the columns of tau."""
        g = self.genus
        tau = self.tau
        e = np.eye(g)
        out = -g * tau[:, g - 1] - tau[:, : g - 1].sum(axis=1) + e[g - 1]
        for l in range(1, g):
            out = out + (g - l) * e[l - 1]
        return out

    @property
    def J(self) -> list[int]:
        """Branch indices {1, 5, 7, ..., 2g-1} (1-based)."""
        return [1] + list(range(5, 2 * self.genus, 2))

    @property
    def J_complement(self) -> list[int]:
        return [j for j in range(1, 2 * self.genus + 3) if j not in self.J]

    @cached_property
    def W0(self) -> np.ndarray:
        e = np.eye(self.genus)
        return self.tau[:, 0] / 2 - (e[0] + e[-1]) / 2

    def spectral_line(self, kappa):
        """W(kappa) = (kappa / i pi) tau_1 + u(inf) + e_1 / 2 + e_g / 4 (mod Z^g).

        The constant matches the gap jumps kappa Omega + delta of the model
        problem when delta is the bounded-d jump vector.  Real for real kappa.
        """
        return self._line(kappa, self.u_infinity + self._unit(0) / 2 + self._unit(-1) / 4)

    def published_spectral_line(self, kappa):
        """(kappa / i pi) tau_1 + 2 u(inf) + e_1 / 2, kept for comparison runs."""
        return self._line(kappa, 2 * self.u_infinity + self._unit(0) / 2)

    def _unit(self, k: int) -> np.ndarray:
        return np.eye(self.genus)[k]

    def _line(self, kappa, const):
        kappa = np.asarray(kappa, float)
        W = (kappa[..., None] / (1j * np.pi)) * self.tau[:, 0] + const
        return W.real if np.all(np.abs(self.tau.real) < 1e-12) else W

    @property
    def line_period(self) -> float:
        """Increment of kappa moving W by one unit in its first coordinate."""
        return float(np.pi / self.tau[0, 0].imag)

    def reduce(self, v) -> np.ndarray:
        return reduce_to_cell(self.tau, v)[0]

    def data(self) -> AbelData:
        return AbelData(u_infinity=self.u_infinity, branch_values=self.branch_values(),
                        riemann_constants=self.riemann_constants(), W0=self.W0)
