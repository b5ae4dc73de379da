"""Interval geometry, the hyperelliptic radical and its period data.

The curve is R(z)^2 = prod_j (z - a_j) over the 2g+2 real endpoints, with the
branch of R chosen so that R(z) ~ z^(g+1) at infinity.  Main arcs
[a_1,a_2], [a_3,a_4], ... are the cuts.  Everything here is real-line
quadrature: cycle integrals collapse onto arcs or gaps, and the cosine
substitution removes the inverse square-root endpoint behaviour.

Labelling of finite gaps follows the convention used by the jump vectors:
positional gap p (0-based, between arcs p+1 and p+2) is labelled c_{p+1} for
p < g-1, and the last finite gap [a_{2g}, a_{2g+1}] is labelled c_0.  The
unbounded gap through infinity is c_g.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from .quadrature import converge, gauss_rule, graded_rule

ABOVE = 1
BELOW = -1


class GeometryError(ValueError):
    """Invalid endpoint configuration."""


class ShoreError(ValueError):
    """A boundary value on a cut was requested without a shore tag."""


@dataclass(frozen=True)
class SurfacePoint:
    """A point (z, +-R(z)) of the two-sheeted surface."""

    z: complex
    sheet: int = 1

    def __post_init__(self):
        if self.sheet not in (1, -1):
            raise ValueError("sheet must be +1 or -1")


@dataclass(frozen=True)
class IntervalSystem:
    """Ordered endpoints a_1 < ... < a_{2g+2} with g >= 2."""

    endpoints: tuple[float, ...]

    def __post_init__(self):
        pts = tuple(float(a) for a in self.endpoints)
        object.__setattr__(self, "endpoints", pts)
        if not all(np.isfinite(pts)):
            raise GeometryError("endpoints must be finite")
        if len(pts) % 2 or len(pts) < 6:
            raise GeometryError("need an even number of at least 6 endpoints (genus >= 2)")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise GeometryError("endpoints must be strictly increasing")

    @classmethod
    def parse(cls, text: str) -> "IntervalSystem":
        return cls(tuple(float(s) for s in text.split(",") if s.strip()))

    @property
    def genus(self) -> int:
        return len(self.endpoints) // 2 - 1

    @cached_property
    def a(self) -> np.ndarray:
        arr = np.array(self.endpoints)
        arr.setflags(write=False)
        return arr

    def arc(self, j: int) -> tuple[float, float]:
        """Main arc gamma_j = [a_{2j-1}, a_{2j}], j = 1..g+1."""
        return self.endpoints[2 * j - 2], self.endpoints[2 * j - 1]

    def gap(self, j: int) -> tuple[float, float]:
        """Finite gap c_j for j = 1..g-1, and c_0 = [a_{2g}, a_{2g+1}]."""
        g = self.genus
        p = g - 1 if j == 0 else j - 1
        if not 0 <= p < g or (j != 0 and j >= g):
            raise IndexError(f"no finite gap labelled c_{j}")
        return self.endpoints[2 * p + 1], self.endpoints[2 * p + 2]

    @property
    def inner_arcs(self) -> list[tuple[float, float]]:
        return [self.arc(j) for j in range(2, self.genus + 1)]

    @property
    def outer_arcs(self) -> list[tuple[float, float]]:
        return [self.arc(1), self.arc(self.genus + 1)]

    @property
    def tail_center(self) -> float:
        """Point c inside (a_1, a_{2g+2}) used by the t = 1/(z - c) map."""
        return 0.5 * (self.endpoints[0] + self.endpoints[-1])

    def segment_kind(self, s: int) -> str:
        """Kind of the s-th finite segment [a_{s+1}, a_{s+2}] (0-based)."""
        return "arc" if s % 2 == 0 else "gap"

    def on_arc(self, x) -> np.ndarray:
        """Mask of real x lying strictly inside a main arc."""
        x = np.asarray(x, float)
        k = np.searchsorted(self.a, x, side="right")
        inside = (x > self.a[0]) & (x < self.a[-1]) & ~np.isin(x, self.a)
        return inside & (k % 2 == 1)


# --------------------------------------------------------------------------
# radical and weight


def _count_above(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    return len(a) - np.searchsorted(a, x, side="right")


def radical_real(system: IntervalSystem, x, shore: int | None = None) -> np.ndarray:
    """Boundary value of R on the real axis.

    On gaps the value is real and the shore is irrelevant.  On main arcs the
    upper value is i^k |R| with k the number of endpoints to the right of x;
    the lower value is its conjugate.
    """
    a = system.a
    x = np.asarray(x, float)
    mag = np.prod(np.sqrt(np.abs(x[..., None] - a)), axis=-1)
    k = _count_above(a, x)
    if shore is None:
        if np.any(system.on_arc(x)):
            raise ShoreError("shore tag required for points on a main arc")
        shore = ABOVE
    phase = (1j * shore) ** k
    return mag * phase


def radical(system: IntervalSystem, z, sheet: int = 1, shore: int | None = None):
    """R(z) on the given sheet; real arguments are treated as boundary values."""
    if isinstance(z, SurfacePoint):
        z, sheet = z.z, z.sheet
    z_in = z
    z = np.atleast_1d(np.asarray(z, complex))
    out = np.prod(np.sqrt(z[..., None] - system.a), axis=-1)
    real = z.imag == 0
    if np.any(real):
        out[real] = radical_real(system, z.real[real], shore)
    out = sheet * out
    return out[0] if np.ndim(z_in) == 0 else out


def weight_w(system: IntervalSystem, z):
    """w(z) = sqrt(a_{2g+2} - z) sqrt(z - a_1), positive inside (a_1, a_{2g+2})."""
    z = np.asarray(z, complex)
    lo, hi = system.endpoints[0], system.endpoints[-1]
    out = np.sqrt(hi - z) * np.sqrt(z - lo)
    return out[()] if out.ndim == 0 else out


# --------------------------------------------------------------------------
# segment quadrature


def segment_nodes(system: IntervalSystem, s: int, n: int, graded: bool = False,
                  levels: int = 14, offsets: bool = False):
    """Nodes zeta and effective weights for integrals of f / R_+ over segment s.

    With zeta = m + r cos(theta) the factor sqrt((zeta-a_lo)(a_hi-zeta))
    cancels against dzeta, so sum(weights * f(zeta)) approximates the
    integral of f(zeta) / R_+(zeta) from a_lo to a_hi.  With ``graded`` the
    theta rule is composite and refined toward both ends (n is then the
    per-panel order).  With ``offsets`` the accurately computed distances
    zeta - a_lo and a_hi - zeta are returned as well.
    """
    a = system.a
    lo, hi = a[s], a[s + 1]
    half = 0.5 * (hi - lo)
    if graded:
        theta, wt = graded_rule(n, 0.0, np.pi, levels=levels)
    else:
        theta, wt = gauss_rule(n, 0.0, np.pi)
    near_lo = 2 * half * np.cos(0.5 * theta) ** 2      # zeta - a_lo
    near_hi = 2 * half * np.sin(0.5 * theta) ** 2      # a_hi - zeta
    zeta = np.where(theta < 0.5 * np.pi, hi - near_hi, lo + near_lo)
    others = np.ones_like(theta)
    for l, al in enumerate(a):
        if l < s:
            others = others * np.sqrt((lo - al) + near_lo)
        elif l > s + 1:
            others = others * np.sqrt((al - hi) + near_hi)
    k = len(a) - (s + 1)
    weights = wt / (others * (1j ** k))
    if offsets:
        return zeta, weights, near_lo, near_hi
    return zeta, weights


def tail_nodes(system: IntervalSystem, n: int, graded: bool = False,
               levels: int = 14):
    """Nodes t and weights for the unbounded gap in the variable t = 1/(zeta-c).

    For a numerator written in t-form, q(t) = f(c + 1/t) t^(g-1), the sum
    ``weights * q(t)`` approximates the integral of f / R over
    [a_{2g+2}, +inf) plus (-inf, a_1], both traversed left to right.
    """
    a = system.a
    c = system.tail_center
    t1, t2 = 1.0 / (a[0] - c), 1.0 / (a[-1] - c)
    half = 0.5 * (t2 - t1)
    if graded:
        theta, wt = graded_rule(n, 0.0, np.pi, levels=levels)
    else:
        theta, wt = gauss_rule(n, 0.0, np.pi)
    near_t1 = 2 * half * np.cos(0.5 * theta) ** 2
    near_t2 = 2 * half * np.sin(0.5 * theta) ** 2
    t = np.where(theta < 0.5 * np.pi, t2 - near_t2, t1 + near_t1)
    others = np.ones_like(theta)
    for al in a[1:-1]:
        others = others * np.sqrt(1.0 + t * (c - al))
    scale = np.sqrt((c - a[0]) * (a[-1] - c))
    return t, wt / (others * scale)


def tail_powers(system: IntervalSystem, t: np.ndarray) -> np.ndarray:
    """Rows (1 + c t)^m t^(g-1-m), m = 0..g-1: the t-form of zeta^m."""
    g = system.genus
    c = system.tail_center
    t = np.asarray(t)
    m = np.arange(g).reshape((g,) + (1,) * t.ndim)
    return (1.0 + c * t) ** m * t ** (g - 1 - m)


def segment_integral(system: IntervalSystem, power: int, segment, order: int = 128,
                     tol: float = 1e-11) -> complex:
    """Integral of zeta^power / R_+ over a finite segment or the unbounded gap.

    ``segment`` is a 0-based finite segment index s (arc when even, gap when
    odd) or the string ``"tail"`` for the unbounded gap, traversed left to
    right as in :func:`tail_nodes`.  The result is imaginary on arcs and real
    on gaps.
    """
    if segment == "tail":
        def evaluate(n):
            t, wt = tail_nodes(system, n)
            c = system.tail_center
            g = system.genus
            return np.sum(wt * (1.0 + c * t) ** power * t ** (g - 1 - power))
    else:
        def evaluate(n):
            zeta, wt = segment_nodes(system, int(segment), n)
            return np.sum(wt * zeta ** power)
    value, _ = converge(evaluate, order=order, tol=tol)
    return complex(value)


# --------------------------------------------------------------------------
# period data


@dataclass(frozen=True)
class PeriodData:
    """Period moments, normalized differentials and the period matrix.

    A[k, m] is the A_k-period of zeta^m / R; P_coeffs[j] holds the ascending
    coefficients of P_j with omega_j = P_j / R.  T and L relate the gap
    moments to A by T = A^T L.
    """

    system: IntervalSystem
    A: np.ndarray
    A_inv: np.ndarray
    P_coeffs: np.ndarray
    tau: np.ndarray
    tau11: complex
    tau11_direct: complex
    T: np.ndarray
    L: np.ndarray
    arc_moments: np.ndarray = field(repr=False)
    gap_moments: np.ndarray = field(repr=False)
    tail_moments: np.ndarray = field(repr=False)
    order: int = 128

    @property
    def genus(self) -> int:
        return self.system.genus

    @property
    def arc_periods(self) -> np.ndarray:
        """arc_periods[l, j] = integral of omega_{j,+} over arc l+1."""
        return self.arc_moments @ self.A_inv

    @property
    def gap_periods(self) -> np.ndarray:
        """Integrals of omega_j over positional finite gaps."""
        return self.gap_moments @ self.A_inv

    @property
    def tail_periods(self) -> np.ndarray:
        return self.tail_moments @ self.A_inv

    def omega(self, z, shore: int | None = None) -> np.ndarray:
        """Vector (omega_1, ..., omega_g)(z) on sheet 1, shape (..., g)."""
        z = np.asarray(z, complex)
        r = radical(self.system, z, shore=shore)
        powers = z[..., None] ** np.arange(self.genus)
        return (powers @ self.P_coeffs.T) / np.asarray(r)[..., None]

    def polynomial(self, j: int, z):
        """P_j(z), with j 1-based."""
        return np.polynomial.polynomial.polyval(z, self.P_coeffs[j - 1])

    def to_dict(self) -> dict:
        return {
            "endpoints": list(self.system.endpoints),
            "genus": self.genus,
            "A": self.A.tolist(),
            "A_inv": self.A_inv.tolist(),
            "P_coeffs": self.P_coeffs.tolist(),
            "tau_re": self.tau.real.tolist(),
            "tau_im": self.tau.imag.tolist(),
            "tau11": [self.tau11.real, self.tau11.imag],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


class PeriodError(RuntimeError):
    """Period matrix failed a structural check."""


def _all_moments(system: IntervalSystem, n: int) -> np.ndarray:
    g = system.genus
    rows = []
    for s in range(2 * g + 1):
        zeta, wt = segment_nodes(system, s, n)
        rows.append((zeta[None, :] ** np.arange(g)[:, None]) @ wt)
    t, wt = tail_nodes(system, n)
    rows.append(tail_powers(system, t) @ wt)
    return np.array(rows)


def build_period_data(system: IntervalSystem, order: int = 128,
                      tol: float = 1e-11) -> PeriodData:
    """Assemble A, its inverse, the differentials, tau, T and L."""
    g = system.genus
    moments, used = converge(lambda n: _all_moments(system, n), order=order, tol=tol)
    arcs = moments[0:2 * g + 1:2]
    gaps = moments[1:2 * g:2].real
    tail = moments[-1].real

    A = np.empty((g, g))
    A[: g - 1] = 2.0 * gaps[: g - 1]
    A[g - 1] = -2.0 * tail
    if np.linalg.cond(A) > 1e14:
        raise PeriodError("A-period matrix is singular")
    A_inv = np.linalg.inv(A)

    omega_arcs = arcs @ A_inv
    tau = np.empty((g, g), complex)
    for k in range(g - 1):
        tau[k] = 2.0 * omega_arcs[k + 1: g].sum(axis=0)
    tau[g - 1] = 2.0 * omega_arcs[g]
    im_eigs = np.linalg.eigvalsh(0.5 * (tau.imag + tau.imag.T))
    if np.all(im_eigs < 0):
        tau = -tau
    elif not np.all(im_eigs > 0):
        raise PeriodError("Im tau is indefinite")
    tau11_direct = -2.0 * (omega_arcs[0, 0] + omega_arcs[g, 0])

    L = np.eye(g, dtype=int)
    L[: g - 1, g - 1] = -1
    T = 2.0 * gaps.T
    return PeriodData(system=system, A=A, A_inv=A_inv, P_coeffs=A_inv.T.copy(),
                      tau=tau, tau11=complex(tau[0, 0]), tau11_direct=complex(tau11_direct),
                      T=T, L=L, arc_moments=arcs, gap_moments=gaps, tail_moments=tail,
                      order=used)


# --------------------------------------------------------------------------
# zeros of the P_j


@dataclass(frozen=True)
class DifferentialZero:
    """Zero of P_j (1-based j) in gap c_k; ``root`` may be +-inf."""

    j: int
    gap_label: int
    root: float
    residual: float


def _tail_polynomial(pd: PeriodData, j: int, t):
    return pd.P_coeffs[j] @ tail_powers(pd.system, np.atleast_1d(t))


def differential_zero_locations(pd: PeriodData) -> list[DifferentialZero]:
    """Locate the zero of each P_j in each A-cycle gap c_k, k != j.

    Finite gaps are bracketed directly.  The unbounded gap is searched in the
    variable t = 1/(zeta - c), where a root at t = 0 means deg P_j < g-1.
    The total count is checked against the roots of the polynomial itself.
    """
    system, g = pd.system, pd.genus
    a = system.a
    c = system.tail_center
    out = []
    for j in range(g):
        coeffs = pd.P_coeffs[j]
        for k in range(1, g + 1):
            if k == j + 1:
                continue
            if k < g:
                lo, hi = system.gap(k)
                f = lambda x: np.polynomial.polynomial.polyval(x, coeffs)
                if f(lo) * f(hi) >= 0:
                    raise PeriodError(f"P_{j + 1} has no sign change in c_{k}")
                root = brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
                resid = abs(f(root))
            else:
                t1, t2 = 1.0 / (a[0] - c), 1.0 / (a[-1] - c)
                q = lambda t: float(_tail_polynomial(pd, j, t)[0])
                if q(t1) * q(t2) > 0:
                    raise PeriodError(f"P_{j + 1} has no sign change in the unbounded gap")
                t0 = brentq(q, t1, t2, xtol=1e-15, rtol=4 * np.finfo(float).eps)
                scale = np.max(np.abs(coeffs))
                if abs(t0) < 1e-13 or abs(coeffs[-1]) < 1e-14 * scale:
                    root, resid = np.inf, abs(coeffs[-1])
                else:
                    root = c + 1.0 / t0
                    resid = abs(np.polynomial.polynomial.polyval(root, coeffs))
            out.append(DifferentialZero(j + 1, k, float(root), float(resid)))
        finite = [z.root for z in out if z.j == j + 1 and np.isfinite(z.root)]
        poly_roots = np.polynomial.polynomial.polyroots(np.trim_zeros(coeffs, "b"))
        if len(poly_roots) != len(finite) or np.any(np.abs(poly_roots.imag) > 1e-8 * (1 + np.abs(poly_roots))):
            raise PeriodError(f"P_{j + 1} zero count mismatch")
    return out
