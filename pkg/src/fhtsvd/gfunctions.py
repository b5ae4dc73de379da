"""Scalar g- and d-functions, their jump constants, the prefactor h and C0.

The d-function is a Cauchy integral of the densities -ln w / R_+ (main arcs)
and i delta_j / R (finite gaps), multiplied by R(z).  Near the real axis the
integration path is bent away from the evaluation point into the half plane
where the densities continue analytically; this keeps boundary values exact
without any epsilon limits.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .abel import AbelMap
from .quadrature import graded_rule
from .surface import ABOVE, BELOW, PeriodData, radical, segment_nodes, weight_w
from .theta import ThetaContext


class JumpConstantError(RuntimeError):
    """Two independent formulas for a jump constant disagree."""


@dataclass(frozen=True)
class JumpData:
    """Jump constants ordered (c_1, ..., c_{g-1}, c_0) and constants at infinity."""

    Omega: np.ndarray
    delta: np.ndarray
    g_inf: float
    d_inf: complex
    C0: complex


def log_weight(system, z):
    """ln w(z) = ln(z - a_1)/2 + ln(a_{2g+2} - z)/2 with principal logarithms."""
    z = np.asarray(z, complex)
    return 0.5 * np.log(z - system.endpoints[0]) + 0.5 * np.log(system.endpoints[-1] - z)


class GFunctions:
    """g-function, d-function, h prefactor and the associated constants."""

    def __init__(self, pd: PeriodData, abel: AbelMap | None = None,
                 panel_order: int = 16, levels: int = 14, bulge: float = 0.5):
        self.pd = pd
        self.system = pd.system
        self.abel = abel or AbelMap(pd)
        self.panel_order = panel_order
        self.levels = levels
        self.bulge = bulge

    @property
    def genus(self) -> int:
        return self.pd.genus

    # ------------------------------------------------------------ g-function

    def g_function(self, z, shore: int | None = None):
        """g(z) = 1/2 - 2 u_1(z)."""
        out = 0.5 - 2.0 * self.abel(z, shore=shore)[..., 0]
        return out[()] if np.ndim(out) == 0 else out

    @cached_property
    def g_inf(self) -> float:
        return float(0.5 - 2.0 * self.abel.u_infinity[0])

    # ------------------------------------------------------------ jump constants

    @cached_property
    def Omega(self) -> np.ndarray:
        """Omega = -2i L^{-1} tau_1, checked against the T-matrix formula."""
        pd = self.pd
        main = (-2j * np.linalg.solve(pd.L, pd.tau[:, 0]))
        if np.max(np.abs(main.imag)) > 1e-8:
            raise JumpConstantError("Omega is not real")
        main = main.real
        if np.max(np.abs(main - self.Omega_from_T())) > 1e-6:
            raise JumpConstantError("Omega formulas disagree")
        return main

    def Omega_from_T(self) -> np.ndarray:
        """-4i T^{-1} times the inner-arc moments of zeta^m / R_+."""
        g = self.genus
        inner = self.pd.arc_moments[1:g].sum(axis=0)
        return (-4j * np.linalg.solve(self.pd.T, inner)).real

    def Omega_from_arcs(self) -> np.ndarray:
        """Cumulative arc integrals of omega_{1,+}, signed to match the g jumps."""
        g = self.genus
        arcs = self.pd.arc_periods[:, 0]
        out = np.empty(g)
        for j in range(1, g):
            out[j - 1] = (-4 / 1j * arcs[:j].sum()).real
        out[g - 1] = (-4 / 1j * arcs[:g].sum()).real
        return out

    @cached_property
    def delta(self) -> np.ndarray:
        """delta = pi T^{-1} (2 mu_inf - mu_{a_{2g+2}}), with mu = A^T u.

        This is the jump vector for which the d-function stays bounded at
        infinity; it is checked against a direct solve of the moment system
        built from quadrature of ln w.
        """
        out = self.published_delta / 2
        check = self.delta_from_log_moments()
        if np.max(np.abs(out - check)) > 1e-6 * max(1.0, np.max(np.abs(out))):
            raise JumpConstantError("delta formulas disagree")
        return out

    @cached_property
    def published_delta(self) -> np.ndarray:
        """2 pi T^{-1} (2 mu_inf - mu_end), twice the bounded-d value."""
        pd = self.pd
        mu_inf = pd.A.T @ self.abel.u_infinity
        mu_end = pd.A.T @ (np.eye(self.genus)[-1] / 2)
        out = 2 * np.pi * np.linalg.solve(pd.T, 2 * mu_inf - mu_end)
        alt = 2 * np.pi * np.linalg.solve(pd.L, 2 * self.abel.u_infinity - np.eye(self.genus)[-1] / 2)
        if np.max(np.abs(out - alt)) > 1e-6:
            raise JumpConstantError("delta formulas disagree")
        return out

    def moment_residual(self) -> float:
        """Residual of i T delta / 2 = sum over arcs of zeta^m ln w / R_+."""
        lhs = 0.5j * self.pd.T @ self.delta
        return float(np.max(np.abs(lhs - self.log_moments())))

    def log_moments(self, powers=None) -> np.ndarray:
        """Sum over main arcs of zeta^m ln w / R_+, by graded quadrature."""
        g = self.genus
        powers = np.arange(g) if powers is None else np.asarray(powers)
        total = np.zeros(len(powers), complex)
        for s in range(0, 2 * g + 1, 2):
            zeta, wt, from_lo, from_hi = segment_nodes(self.system, s, self.panel_order, graded=True,
                                                       levels=self.levels, offsets=True)
            lw = self._log_weight_on_segment(s, zeta, from_lo, from_hi).real
            total += (zeta[None, :] ** powers[:, None] * lw) @ wt
        return total

    def _log_weight_on_segment(self, s: int, zeta, from_lo, from_hi):
        # distances to a_1 and a_{2g+2} without cancellation on the end segments
        a = self.system.a
        left = from_lo if s == 0 else zeta - a[0]
        right = from_hi if s == len(a) - 2 else a[-1] - zeta
        return 0.5 * np.log(left + 0j) + 0.5 * np.log(right + 0j)

    def delta_from_log_moments(self) -> np.ndarray:
        """Solve the moment system i sum delta_j int_{c_j} zeta^m / R = log moments."""
        lm = self.log_moments()
        return (-2j * np.linalg.solve(self.pd.T, lm)).real

    # ------------------------------------------------------------ d-function

    def _contour(self, s: int, side: int):
        """Nodes and density weights on segment s bent into half plane ``side``.

        Returns (zeta, dens) with sum(dens / (zeta - z)) equal to the Cauchy
        integral of the segment density for z on the other side.
        """
        a = self.system.a
        lo, hi = a[s], a[s + 1]
        r = 0.5 * (hi - lo)
        height = side * self.bulge * r
        theta, wt = graded_rule(self.panel_order, 0.0, np.pi, levels=self.levels)
        c2 = np.cos(0.5 * theta) ** 2
        s2 = np.sin(0.5 * theta) ** 2
        from_lo = 2 * c2 * (r + 2j * height * s2)          # zeta - lo
        from_hi = 2 * s2 * (r - 2j * height * c2)          # hi - zeta
        zeta = np.where(theta < 0.5 * np.pi, hi - from_hi, lo + from_lo)
        # theta runs from hi to lo, so the orientation sign is folded in here
        dzeta = -np.sin(theta) * (-r + 2j * height * np.cos(theta))
        R = np.ones_like(zeta)
        for l, al in enumerate(a):
            if l < s:
                diff = (lo - al) + from_lo
            elif l == s:
                diff = from_lo
            elif l == s + 1:
                diff = -from_hi
            else:
                diff = (hi - al) - from_hi
            R = R * np.sqrt(diff)
        if s % 2 == 0:
            # -ln w / R_+ continues to +ln w / R below the cut and -ln w / R above it
            density = -side * self._log_weight_on_segment(s, zeta, from_lo, from_hi) / R
        else:
            label = s // 2 + 1 if s // 2 + 1 < self.genus else 0
            density = 1j * self.delta_labelled(label) / R
        return zeta, density * dzeta * wt

    def delta_labelled(self, label: int) -> float:
        """delta_j for gap c_j, j = 1..g-1 or 0."""
        g = self.genus
        return float(self.delta[g - 1 if label == 0 else label - 1])

    @cached_property
    def _contours(self):
        g = self.genus
        out = {}
        for side in (ABOVE, BELOW):
            parts = [self._contour(s, side) for s in range(2 * g + 1)]
            out[side] = (np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts]))
        return out

    def _cauchy(self, z: np.ndarray, side: np.ndarray) -> np.ndarray:
        g = self.genus
        big = np.abs(z) > 4 * np.max(np.abs(self.system.a))
        out = np.empty(z.shape, complex)
        for sd in (ABOVE, BELOW):
            pick = side == sd
            if not np.any(pick):
                continue
            zeta, dens = self._contours[sd]
            zz = z[pick][:, None]
            kernel = np.where(big[pick][:, None], (zeta / zz) ** g, 1.0) / (zeta - zz)
            out[pick] = kernel @ dens
        return out

    def d_function(self, z, shore: int | None = None):
        """d(z) off the cuts, or its boundary value on a shore for real z."""
        z = np.asarray(z, complex)
        flat = z.ravel()
        real = flat.imag == 0
        inside = real & (flat.real > self.system.a[0]) & (flat.real < self.system.a[-1])
        if shore is None and np.any(inside):
            raise ValueError("shore tag required inside [a_1, a_{2g+2}]")
        tag = ABOVE if shore is None else shore
        # bend the contour away from the evaluation point
        side = np.where(real, -tag, -np.sign(flat.imag)).astype(int)
        C = self._cauchy(flat, side)
        R = np.empty_like(flat)
        if np.any(real):
            R[real] = radical(self.system, flat[real].real.astype(complex), shore=tag)
        if np.any(~real):
            R[~real] = radical(self.system, flat[~real])
        out = (R * C / (2j * np.pi)).reshape(z.shape)
        return out[()] if out.ndim == 0 else out

    @cached_property
    def d_inf(self) -> complex:
        """d at infinity from the first non-vanishing moment of the density."""
        g = self.genus
        mu = -self.log_moments([g])[0]
        for s in range(1, 2 * g, 2):
            label = s // 2 + 1 if s // 2 + 1 < g else 0
            zeta, wt = segment_nodes(self.system, s, self.panel_order, graded=True, levels=self.levels)
            mu = mu + 1j * self.delta_labelled(label) * np.sum(wt * zeta ** g)
        return complex(-mu / (2j * np.pi))

    def d_inf_extrapolated(self, heights=(1e2, 1e3, 1e4)) -> complex:
        """Richardson extrapolation of d(iY) assuming an expansion in 1/Y."""
        Y = np.asarray(heights, float)
        vals = np.array([self.d_function(1j * y) for y in Y])
        # fit d(iY) = d_inf + c1/Y + c2/Y^2
        M = np.vstack([np.ones_like(Y), 1 / Y, 1 / Y ** 2]).T.astype(complex)
        return complex(np.linalg.solve(M, vals)[0])

    # ------------------------------------------------------------ h and C0

    def h_prefactor(self, z, shore: int | None = None):
        """Fourth-root prefactor with zeros at a_j, j in J, and h ~ 1/z at infinity."""
        a = self.system.a
        J = np.array(self.abel.J) - 1
        Jc = np.array(self.abel.J_complement) - 1
        z = np.asarray(z, complex)
        flat = z.ravel()
        real = flat.imag == 0
        out = np.empty_like(flat)
        if np.any(~real):
            zc = flat[~real][:, None]
            out[~real] = (np.prod((zc - a[J]) ** 0.25, axis=1) / np.prod((zc - a[Jc]) ** 0.25, axis=1))
        if np.any(real):
            x = flat[real].real[:, None]
            if shore is None and np.any((x > a[0]) & (x < a[-1])):
                raise ValueError("shore tag required inside [a_1, a_{2g+2}]")
            tag = ABOVE if shore is None else shore
            phase = np.where(a[None, :] > x, np.exp(0.25j * np.pi * tag), 1.0)
            factor = np.abs(x - a) ** 0.25 * phase
            out[real] = np.prod(factor[:, J], axis=1) / np.prod(factor[:, Jc], axis=1)
        out = out.reshape(z.shape)
        return out[()] if out.ndim == 0 else out

    def C0(self, theta: ThetaContext) -> complex:
        """g-th entry of A^{-1} grad Theta(W0); purely imaginary here since Im W0 != 0."""
        grad = theta.gradient(self.abel.W0)
        value = (self.pd.A_inv @ grad)[-1]
        if abs(value) < 1e-12:
            raise JumpConstantError("C0 vanishes")
        return complex(value)

    def fay_residual(self, theta: ThetaContext, z) -> float:
        """Relative mismatch between omega . grad Theta(W0) and C0 h^2."""
        grad = theta.gradient(self.abel.W0)
        lhs = self.pd.omega(z) @ grad
        rhs = self.C0(theta) * self.h_prefactor(z) ** 2
        return float(np.max(np.abs(lhs - rhs) / np.abs(rhs)))

    def jump_data(self, theta: ThetaContext) -> JumpData:
        return JumpData(Omega=self.Omega, delta=self.delta, g_inf=self.g_inf,
                        d_inf=self.d_inf, C0=self.C0(theta))
