"""Riemann theta function for a period matrix with positive definite imaginary part.

Evaluation reduces the argument into the fundamental cell first, so the
lattice sum only ever sees |Im z| of order one, and restores the exact
quasi-periodicity factor afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def reduce_to_cell(tau: np.ndarray, v: np.ndarray):
    """Split v = r + m + tau n with integer m, n and r in the centred cell.

    Returns ``(r, m, n)``.  Works on arrays of shape (..., g).
    """
    v = np.asarray(v, complex)
    n = np.rint(v.imag @ np.linalg.inv(tau.imag).T)
    shifted = v - n @ tau.T
    m = np.rint(shifted.real)
    return shifted - m, m.astype(int), n.astype(int)


def lattice_distance(tau: np.ndarray, v: np.ndarray) -> float:
    """Norm of v after reduction modulo Z^g + tau Z^g."""
    r, _, _ = reduce_to_cell(tau, v)
    return float(np.max(np.abs(r)))


@dataclass(frozen=True)
class ThetaContext:
    """Truncated lattice sum for Theta(z | tau).

    The box radius defaults to the larger of 12 and the Gaussian tail bound
    for the requested accuracy; arguments are first reduced so that the
    centre of the Gaussian lies within half a cell of the origin.
    """

    tau: np.ndarray
    eps: float = 1e-12
    lattice_radius: int | None = None
    _points: np.ndarray = field(init=False, repr=False)
    _quad: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        tau = np.array(self.tau, complex)
        if tau.ndim != 2 or tau.shape[0] != tau.shape[1]:
            raise ValueError("tau must be a square matrix")
        tau = 0.5 * (tau + tau.T)
        lam_min = float(np.linalg.eigvalsh(tau.imag)[0])
        if lam_min <= 0:
            raise ValueError("Im tau must be positive definite")
        g = tau.shape[0]
        # centre offset after reduction is at most 1/2 per coordinate
        bound = 0.5 * np.sqrt(g) + np.sqrt(-np.log(self.eps / 10) / (np.pi * lam_min)) + 1
        radius = self.lattice_radius
        if radius is None:
            radius = max(12, int(np.ceil(bound))) if g <= 3 else int(np.ceil(bound))
        rng = np.arange(-radius, radius + 1)
        pts = np.stack(np.meshgrid(*([rng] * g), indexing="ij"), -1).reshape(-1, g)
        quad = np.einsum("ki,ij,kj->k", pts, tau, pts)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "lattice_radius", radius)
        object.__setattr__(self, "_points", pts.astype(float))
        object.__setattr__(self, "_quad", quad)

    @property
    def genus(self) -> int:
        return self.tau.shape[0]

    @property
    def lambda_min(self) -> float:
        return float(np.linalg.eigvalsh(self.tau.imag)[0])

    def _series(self, z: np.ndarray, gradient: bool):
        # z has shape (B, g) and lies in the reduced cell
        expo = np.exp(1j * np.pi * self._quad[:, None] + 2j * np.pi * (self._points @ z.T))
        value = expo.sum(axis=0)
        if not gradient:
            return value, None
        grad = 2j * np.pi * (self._points.T @ expo)
        return value, grad.T

    def _evaluate(self, z, gradient: bool):
        z = np.asarray(z, complex)
        flat = z.reshape(-1, self.genus)
        r, m, n = reduce_to_cell(self.tau, flat)
        lattice_quad = np.einsum("bi,ij,bj->b", n, self.tau, n)
        factor = np.exp(-2j * np.pi * np.einsum("bi,bi->b", n, r) - 1j * np.pi * lattice_quad)
        value, grad = self._series(r, gradient)
        out = factor * value
        if not np.all(np.isfinite(out)):
            raise FloatingPointError("non-finite theta value")
        shape = z.shape[:-1]
        if not gradient:
            return out.reshape(shape)
        g = factor[:, None] * (grad - 2j * np.pi * n * value[:, None])
        return out.reshape(shape), g.reshape(z.shape)

    def theta(self, z):
        """Theta(z); z has shape (..., g)."""
        out = self._evaluate(z, False)
        return out[()] if out.ndim == 0 else out

    def gradient(self, z):
        """Gradient of Theta at z, shape (..., g)."""
        return self._evaluate(z, True)[1]

    def value_and_gradient(self, z):
        return self._evaluate(z, True)

    def char_shift(self, n, m) -> np.ndarray:
        """Half-period (m + tau n)/2 associated with the characteristic [n; m]."""
        return 0.5 * (np.asarray(m, float) + self.tau @ np.asarray(n, float))

    def char_prefactor(self, n, m, z):
        n = np.asarray(n, float)
        m = np.asarray(m, float)
        z = np.asarray(z, complex)
        return np.exp(1j * np.pi * (n @ self.tau @ n) / 4 - 1j * np.pi * (z @ n)
                      + 1j * np.pi * (n @ m) / 2)

    def theta_char(self, n, m, z):
        """Theta with integer characteristic [n; m] in the exponential form
        exp(i pi n.tau.n/4 - i pi n.z + i pi n.m/2) Theta(z - (m + tau n)/2).
        """
        z = np.asarray(z, complex)
        return self.char_prefactor(n, m, z) * self.theta(z - self.char_shift(n, m))
