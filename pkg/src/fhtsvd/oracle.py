"""Ground-truth singular values by Nystrom discretization.

The coupled system on I_i and I_e is discretized through its off-diagonal
block B(x, y) = sqrt(w(y)) / (2 pi sqrt(w(x)) (x - y)), x in I_e, y in I_i,
whose singular values are the lambda_n and whose Gram matrix B^T B is the
Nystrom matrix of the kernel L on I_i.  B is a Cauchy-like matrix, so an
LDU factorization with complete pivoting can be formed from its generators
without cancellation; a one-sided Jacobi SVD of the resulting well-scaled
factor then gives every singular value to high relative accuracy, including
those of order 1e-40 that an ordinary SVD would lose in rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg as sla
from scipy.linalg.lapack import dgejsv

from .quadrature import gauss_rule
from .surface import IntervalSystem


PIVOT_FLOOR = 1e-280


class OracleError(RuntimeError):
    """The discretization cannot deliver the requested eigenvalues."""


# ----------------------------------------------------------------- quadrature

def _outer_rule(system: IntervalSystem, order: int):
    """Nodes on I_e with s^2 substitutions at a_1 and a_{2g+2}.

    Returns (x, dx, scale) where dx is the measure weight and scale equals
    sqrt(dx) / sqrt(w(x)), finite at the hard ends.
    """
    a = system.a
    xs, dxs, scales = [], [], []
    s, ws = gauss_rule(order, 0.0, np.sqrt(a[1] - a[0]))
    x = a[0] + s ** 2
    xs.append(x)
    dxs.append(2 * s * ws)
    scales.append(np.sqrt(2 * ws) / (a[-1] - x) ** 0.25)
    s, ws = gauss_rule(order, 0.0, np.sqrt(a[-1] - a[-2]))
    x = a[-1] - s ** 2
    xs.append(x[::-1])
    dxs.append((2 * s * ws)[::-1])
    scales.append((np.sqrt(2 * ws) / (x - a[0]) ** 0.25)[::-1])
    return np.concatenate(xs), np.concatenate(dxs), np.concatenate(scales)


def _inner_rule(system: IntervalSystem, order: int):
    nodes, weights = [], []
    for lo, hi in system.inner_arcs:
        y, wy = gauss_rule(order, lo, hi)
        nodes.append(y)
        weights.append(wy)
    return np.concatenate(nodes), np.concatenate(weights)


def _w(system: IntervalSystem, x):
    a = system.a
    return np.sqrt((x - a[0]) * (a[-1] - x))


def _check_inner(system: IntervalSystem, x):
    x = np.asarray(x, float)
    ok = np.zeros(x.shape, bool)
    for lo, hi in system.inner_arcs:
        ok |= (x >= lo) & (x <= hi)
    if not np.all(ok):
        raise ValueError("kernel_L arguments must lie in the inner arcs")


def kernel_L(system: IntervalSystem, x, y, order: int = 128):
    """L(x, y) = sqrt(w(x) w(y)) / (4 pi^2) * integral over I_e of dz / (w(z)(z-x)(z-y))."""
    _check_inner(system, x)
    _check_inner(system, y)
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    z, _, scale = _outer_rule(system, order)
    xb, yb = np.broadcast_arrays(x, y)
    integrand = scale ** 2 / ((z - xb[..., None]) * (z - yb[..., None]))
    # the product over the two points is symmetric, so L(x, y) == L(y, x) bitwise
    out = np.sqrt(_w(system, xb) * _w(system, yb)) / (4 * np.pi ** 2) * integrand.sum(axis=-1)
    return out[()] if out.ndim == 0 else out


def stp_determinant(system: IntervalSystem, xs, ys, order: int = 128) -> float:
    """det[L(x_l, y_k)] for strictly increasing tuples in the inner arcs."""
    xs = np.asarray(xs, float)
    ys = np.asarray(ys, float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("tuples must be one-dimensional and of equal length")
    if xs.size > 6:
        raise ValueError("at most 6 points per tuple")
    if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
        raise ValueError("tuples must be strictly increasing")
    M = kernel_L(system, xs[:, None], ys[None, :], order)
    return float(np.linalg.det(M))


def hilbert_schmidt_norm_squared(system: IntervalSystem, order: int = 128) -> float:
    """(1 / 2 pi^2) * double integral of w(x) / (w(y) (x - y)^2), x in I_i, y in I_e.

    This is the squared Hilbert-Schmidt norm of the symmetric operator on
    I_i + I_e; its spectrum is {+lambda_n, -lambda_n}, so it equals
    2 * sum(lambda_n^2).
    """
    y, _, scale = _outer_rule(system, order)
    x, wx = _inner_rule(system, order)
    inner = (scale ** 2 / (x[:, None] - y[None, :]) ** 2).sum(axis=1)
    return float((wx * _w(system, x) * inner).sum() / (2 * np.pi ** 2))


def hilbert_schmidt_norm(system: IntervalSystem, order: int = 128) -> float:
    return float(np.sqrt(hilbert_schmidt_norm_squared(system, order)))


# ------------------------------------------------------------ structured SVD

def cauchy_ldu(p, q, r, c):
    """Complete-pivoting LDU of G_ij = r_i c_j / (p_i - q_j) from its generators.

    Returns (L, D, U, rows, cols) with G[rows][:, cols] = L @ diag(D) @ U,
    L unit lower trapezoidal and U unit upper trapezoidal.  Each Schur
    complement is again Cauchy-like, and its entries are updated by a
    product of differences of the original nodes, so no subtraction of
    computed quantities takes place.
    """
    p = np.array(p, float)
    q = np.array(q, float)
    G = np.asarray(r, float)[:, None] * np.asarray(c, float)[None, :] / (p[:, None] - q[None, :])
    m, n = G.shape
    K = min(m, n)
    rows, cols = np.arange(m), np.arange(n)
    L = np.zeros((m, K))
    U = np.zeros((K, n))
    D = np.zeros(K)
    for k in range(K):
        sub = np.abs(G[k:, k:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        i += k
        j += k
        G[[k, i]] = G[[i, k]]
        L[[k, i]] = L[[i, k]]
        p[[k, i]] = p[[i, k]]
        rows[[k, i]] = rows[[i, k]]
        G[:, [k, j]] = G[:, [j, k]]
        U[:, [k, j]] = U[:, [j, k]]
        q[[k, j]] = q[[j, k]]
        cols[[k, j]] = cols[[j, k]]
        pivot = G[k, k]
        if abs(pivot) < PIVOT_FLOOR:
            # the remaining Schur complement is below the floor entrywise
            return L[:, :k], D[:k], U[:k], rows, cols
        D[k] = pivot
        L[k:, k] = G[k:, k] / pivot
        U[k, k:] = G[k, k:] / pivot
        pk, qk = p[k], q[k]
        pi = p[k + 1:, None]
        qj = q[None, k + 1:]
        G[k + 1:, k + 1:] *= (pi - pk) * (qk - qj) / ((pi - qk) * (pk - qj))
    return L, D, U, rows, cols


@dataclass(frozen=True)
class StructuredSVD:
    """Singular triplets of a Cauchy-like matrix, singular values descending."""

    sigma: np.ndarray
    left: np.ndarray
    right: np.ndarray


def cauchy_svd(p, q, r, c) -> StructuredSVD:
    """High relative accuracy SVD of G_ij = r_i c_j / (p_i - q_j)."""
    L, D, U, rows, cols = cauchy_ldu(p, q, r, c)
    if D.size == 0:
        raise OracleError("matrix is numerically zero")
    Q, R, perm = sla.qr(L * D, pivoting=True, mode="economic")
    W = R @ U[perm, :]
    # Jacobi SVD of W^T: W^T = V S U^T, so its left factor holds the right vectors of W
    sva, u, v, work, _, info = dgejsv(W.T.copy(), joba=2, jobu=0, jobv=0, jobr=0, jobt=0, jobp=1)
    if info != 0:
        raise OracleError(f"Jacobi SVD failed with info={info}")
    sigma = sva * (work[0] / work[1])
    k = sigma.size
    left = np.empty((len(p), k))
    right = np.empty((len(q), k))
    left[rows] = Q @ v[:, :k]
    right[cols] = u[:, :k]
    order = np.argsort(-sigma)
    return StructuredSVD(sigma[order], left[:, order], right[:, order])


# --------------------------------------------------------------- the operator

@dataclass(frozen=True)
class DiscretizedOperator:
    """Nystrom data for the off-diagonal block B on I_e x I_i.

    ``order`` nodes per interval.  Rows of ``B`` are I_e nodes, columns are
    I_i nodes, both carrying square roots of their quadrature weights.
    """

    system: IntervalSystem
    order: int
    nodes_i: np.ndarray = field(init=False, repr=False)
    weights_i: np.ndarray = field(init=False, repr=False)
    nodes_e: np.ndarray = field(init=False, repr=False)
    weights_e: np.ndarray = field(init=False, repr=False)
    _scale_e: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.order < 4:
            raise ValueError("order must be at least 4")
        y, wy = _inner_rule(self.system, self.order)
        x, dx, scale = _outer_rule(self.system, self.order)
        object.__setattr__(self, "nodes_i", y)
        object.__setattr__(self, "weights_i", wy)
        object.__setattr__(self, "nodes_e", x)
        object.__setattr__(self, "weights_e", dx)
        object.__setattr__(self, "_scale_e", scale)

    @property
    def generators(self):
        """(p, q, r, c) with B_ij = r_i c_j / (p_i - q_j)."""
        c = np.sqrt(self.weights_i * _w(self.system, self.nodes_i)) / (2 * np.pi)
        return self.nodes_e, self.nodes_i, self._scale_e, c

    @cached_property
    def B(self) -> np.ndarray:
        p, q, r, c = self.generators
        return r[:, None] * c[None, :] / (p[:, None] - q[None, :])

    @cached_property
    def L_matrix(self) -> np.ndarray:
        """Symmetric Nystrom matrix sqrt(w_i w_j) L(x_i, x_j) on I_i."""
        M = self.B.T @ self.B
        return 0.5 * (M + M.T)

    @cached_property
    def svd(self) -> StructuredSVD:
        return cauchy_svd(*self.generators)


@dataclass(frozen=True)
class OracleSpectrum:
    """Exact singular values indexed from n = 0 (largest) upward.

    ``f_hat`` holds samples of the normalized singular functions on the
    I_i nodes and ``f`` = sqrt(w) f_hat; ``h`` holds sqrt(w) h_hat on the
    I_e nodes.
    """

    n: np.ndarray
    lambdas: np.ndarray
    kappas: np.ndarray
    trusted: np.ndarray
    nodes_i: np.ndarray
    weights_i: np.ndarray
    f_hat: np.ndarray
    f: np.ndarray
    nodes_e: np.ndarray
    h: np.ndarray
    order: int

    def gap_to_next(self) -> np.ndarray:
        out = np.full(self.kappas.size, np.nan)
        out[:-1] = np.diff(self.kappas)
        return out


def _spectrum_at(system: IntervalSystem, order: int, count: int):
    op = DiscretizedOperator(system, order)
    svd = op.svd
    sigma = svd.sigma[:count]
    if np.any(sigma <= 0):
        raise OracleError("non-positive singular value among the requested ones")
    f_hat = svd.right[:, :count] / np.sqrt(op.weights_i)[:, None]
    h = svd.left[:, :count] / op._scale_e[:, None]
    # first I_i node positive; h keeps B f = lambda h
    sign = np.where(f_hat[0] < 0, -1.0, 1.0)
    return op, sigma, f_hat * sign, h * sign


def exact_spectrum(system: IntervalSystem, n_max: int, order: int = 256,
                   check_order: int | None = None, trust_tol: float = 1e-8) -> OracleSpectrum:
    """Singular values lambda_0 > lambda_1 > ... of the system, n = 0..n_max.

    Trust is decided by comparing against a run at ``check_order`` (default
    order // 2); indices whose relative change exceeds ``trust_tol`` are
    flagged untrusted but still reported.
    """
    if order < 4 * n_max:
        raise ValueError("order must be at least 4 * n_max")
    count = n_max + 1
    op, sigma, f_hat, h = _spectrum_at(system, order, count)
    check_order = check_order or max(order // 2, 2 * count)
    _, coarse, _, _ = _spectrum_at(system, check_order, count)
    trusted = np.abs(coarse / sigma - 1) < trust_tol
    return OracleSpectrum(n=np.arange(count), lambdas=sigma, kappas=-np.log(sigma),
                          trusted=trusted, nodes_i=op.nodes_i, weights_i=op.weights_i,
                          f_hat=f_hat, f=f_hat * np.sqrt(_w(system, op.nodes_i))[:, None],
                          nodes_e=op.nodes_e, h=h, order=order)
