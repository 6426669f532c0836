"""Four-parameter orthogonal polynomials on the reference triangle.

The basis P_{n,k}(x, y) factors into a shifted Jacobi polynomial in x and a
homogenized shifted Jacobi polynomial in (y, 1-x).  The homogenized form
keeps evaluation division-free on the whole closed triangle, including the
corner line x = 1 where the classical quotient form y/(1-x) degenerates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jacobi import (
    JacobiParams,
    _check_degree,
    _eval_core,
    _homog_table,
    _shifted_table,
    shifted_jacobi_deriv,
    shifted_jacobi_eval,
)

__all__ = [
    "TriParams",
    "TriIndex",
    "TriPoint",
    "Jet2",
    "index_to_linear",
    "linear_to_index",
    "basis_size",
    "weight_eval",
    "tri_eval",
    "tri_eval_jet",
    "basis_eval_all",
    "jjp_residual",
    "jpj_residual",
]


@dataclass(frozen=True)
class TriParams:
    """Weight exponents (a, b, c, d) for x^a y^b z^c (1-x)^d with z = 1 - x - y."""

    a: float
    b: float
    c: float
    d: float = 0.0

    @property
    def t(self):
        return self.a + self.b + self.c + self.d

    def is_valid(self):
        return min(self.a, self.b, self.c, self.d) > -1.0

    def validate(self):
        if not self.is_valid():
            raise ValueError(
                f"parameters must all exceed -1, got ({self.a}, {self.b}, {self.c}, {self.d})"
            )

    def shifted(self, da, db, dc, dd):
        return TriParams(self.a + da, self.b + db, self.c + dc, self.d + dd)


@dataclass(frozen=True)
class TriIndex:
    """Degree pair (n, k) with 0 <= k <= n."""

    n: int
    k: int

    def validate(self):
        _check_degree(self.n)
        _check_degree(self.k)
        if self.n < 0 or self.k < 0 or self.k > self.n:
            raise ValueError(f"index must satisfy 0 <= k <= n, got (n={self.n}, k={self.k})")


@dataclass(frozen=True)
class TriPoint:
    """Point (x, y) in the reference triangle; z = 1 - x - y is derived."""

    x: object
    y: object

    @property
    def z(self):
        return 1.0 - np.asarray(self.x, dtype=float) - np.asarray(self.y, dtype=float)


@dataclass(frozen=True)
class Jet2:
    """Value and first-order partials of a bivariate function at a point."""

    u: object
    ux: object
    uy: object

    @property
    def uz(self):
        # derivative along the third barycentric direction
        return self.uy - self.ux


def index_to_linear(idx):
    """Linear position of (n, k) in the degree-graded ordering: n(n+1)/2 + k."""
    idx.validate()
    return idx.n * (idx.n + 1) // 2 + idx.k


def linear_to_index(i):
    """Inverse of index_to_linear."""
    if not isinstance(i, (int, np.integer)) or i < 0:
        raise ValueError(f"linear index must be a nonnegative integer, got {i!r}")
    n = int((np.sqrt(8 * i + 1) - 1) // 2)
    while n * (n + 1) // 2 > i:
        n -= 1
    while (n + 1) * (n + 2) // 2 <= i:
        n += 1
    return TriIndex(n, int(i - n * (n + 1) // 2))


def basis_size(N):
    """Number of basis elements of total degree at most N: (N+1)(N+2)/2."""
    _check_degree(N)
    if N < 0:
        return 0
    return (N + 1) * (N + 2) // 2


def weight_eval(params, pt):
    """Evaluate the weight x^a y^b z^c (1-x)^d at a point (interior for negative exponents)."""
    x = np.asarray(pt.x, dtype=float)
    y = np.asarray(pt.y, dtype=float)
    z = 1.0 - x - y
    return x**params.a * y**params.b * z**params.c * (1.0 - x) ** params.d


def point_rows(pts):
    """Coerce a point batch (TriPoint list or (npts, 2) array) to an array."""
    if not isinstance(pts, np.ndarray):
        pts = list(pts)
        if pts and hasattr(pts[0], "x"):
            pts = [(p.x, p.y) for p in pts]
    arr = np.asarray(pts, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"points must have shape (npts, 2), got {arr.shape}")
    return arr


def _second_factor_params(k, params):
    # first factor runs in x with exponent pair (2k + b + c + d + 1, a)
    return 2 * k + params.b + params.c + params.d + 1


def _tri_core(n, k, params, x, y, partials=False):
    """Evaluate one basis element (optionally with first partials) at raw arrays.

    No parameter validation: ladder targets legitimately leave the
    orthogonality family and remain polynomials.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    scalar = x.ndim == 0 and y.ndim == 0
    xx, yy = np.broadcast_arrays(np.atleast_1d(x), np.atleast_1d(y))
    shape = xx.shape
    xf, yf = xx.ravel(), yy.ravel()
    if n < 0 or k < 0 or k > n:
        zero = np.zeros(shape)
        if scalar:
            return (0.0, 0.0, 0.0) if partials else 0.0
        return (zero, zero.copy(), zero.copy()) if partials else zero
    A = _second_factor_params(k, params)
    sf = 1.0 - xf
    Ftab = _shifted_table(n - k, A, params.a, xf, nderiv=1 if partials else 0)
    H, Hy, Hs = _homog_table(k, params.c, params.b, yf, sf, partials=partials)
    F = Ftab[0, n - k]
    u = (F * H[k]).reshape(shape)
    if not partials:
        out = u
        return float(out.ravel()[0]) if scalar else out
    dF = Ftab[1, n - k]
    ux = (dF * H[k] - F * Hs[k]).reshape(shape)
    uy = (F * Hy[k]).reshape(shape)
    if scalar:
        return float(u.ravel()[0]), float(ux.ravel()[0]), float(uy.ravel()[0])
    return u, ux, uy


def tri_eval(idx, params, pt):
    """Evaluate P_{n,k} at a point of the closed triangle.

    Parameters
    ----------
    idx : TriIndex
        Degree pair (n, k).  Out-of-range pairs (n = -1, k = -1, k = n + 1)
        evaluate to zero per the boundary convention.
    params : TriParams
        Weight exponents, all required to exceed -1.
    pt : TriPoint
        Evaluation point; coordinates may be scalars or arrays.
    """
    params.validate()
    _check_degree(idx.n)
    _check_degree(idx.k)
    return _tri_core(idx.n, idx.k, params, pt.x, pt.y)


def tri_eval_jet(idx, params, pt):
    """Evaluate P_{n,k} together with its first-order partials.

    The x-partial uses the derivative of the first factor and the
    homogenization variable s = 1 - x, so no division by 1 - x occurs.
    """
    params.validate()
    _check_degree(idx.n)
    _check_degree(idx.k)
    u, ux, uy = _tri_core(idx.n, idx.k, params, pt.x, pt.y, partials=True)
    return Jet2(u, ux, uy)


def _tri_tables(N, params, x, y, partials=False):
    """Tables of all basis elements of degree <= N at raw coordinate arrays.

    Returns (U, UX, UY), each of shape (basis_size(N), npts); the partial
    tables are None unless requested.  No parameter validation (used on
    ladder-target families too).
    """
    xf = np.asarray(x, dtype=float).ravel()
    yf = np.asarray(y, dtype=float).ravel()
    sf = 1.0 - xf
    U = np.empty((basis_size(N), xf.size))
    UX = np.empty_like(U) if partials else None
    UY = np.empty_like(U) if partials else None
    H, Hy, Hs = _homog_table(N, params.c, params.b, yf, sf, partials=partials)
    for k in range(N + 1):
        A = _second_factor_params(k, params)
        Ftab = _shifted_table(N - k, A, params.a, xf, nderiv=1 if partials else 0)
        for n in range(k, N + 1):
            i = n * (n + 1) // 2 + k
            U[i] = Ftab[0, n - k] * H[k]
            if partials:
                UX[i] = Ftab[1, n - k] * H[k] - Ftab[0, n - k] * Hs[k]
                UY[i] = Ftab[0, n - k] * Hy[k]
    return U, UX, UY


def basis_eval_all(N, params, pts):
    """Evaluate every basis element of degree at most N at a batch of points.

    Parameters
    ----------
    N : int
        Maximum total degree.
    params : TriParams
    pts : list of TriPoint or ndarray of shape (npts, 2)
        Point coordinates (x, y).

    Returns
    -------
    ndarray of shape (npts, basis_size(N))
        Column j holds the element with linear index j.
    """
    params.validate()
    _check_degree(N)
    if N < 0:
        raise ValueError(f"maximum degree must be nonnegative, got {N}")
    pts = point_rows(pts)
    return _tri_tables(N, params, pts[:, 0], pts[:, 1])[0].T


def jjp_residual(idx, params, pt):
    """Two-route check of the y-derivative chain rule.

    Left route: first factor times (1-x)^k times the derivative of the
    second factor at y/(1-x), evaluated through explicit Jacobi calls.
    Right route: (1-x) times the y-partial from tri_eval_jet.  Returns the
    pair (left, right); interior points only (the left route divides).
    """
    params.validate()
    idx.validate()
    x = np.asarray(pt.x, dtype=float)
    y = np.asarray(pt.y, dtype=float)
    if np.any(np.asarray(1.0 - x) <= 0):
        raise ValueError("left route requires x < 1")
    n, k = idx.n, idx.k
    A = _second_factor_params(k, params)
    tau = y / (1.0 - x)
    F = _eval_core(n - k, A, params.a, x)
    dsecond = shifted_jacobi_deriv(k, JacobiParams(params.c, params.b), tau)
    left = F * (1.0 - x) ** k * dsecond
    jet = tri_eval_jet(idx, params, pt)
    right = (1.0 - x) * jet.uy
    return left, right


def jpj_residual(idx, params, pt):
    """Two-route check of the x-derivative chain rule.

    Left route: derivative of the first factor times (1-x)^{k+1} times the
    second factor at y/(1-x).  Right route: k u + (1-x) u_x - y u_y from
    tri_eval_jet.  Returns the pair (left, right); interior points only.
    """
    params.validate()
    idx.validate()
    x = np.asarray(pt.x, dtype=float)
    y = np.asarray(pt.y, dtype=float)
    if np.any(np.asarray(1.0 - x) <= 0):
        raise ValueError("left route requires x < 1")
    n, k = idx.n, idx.k
    A = _second_factor_params(k, params)
    tau = y / (1.0 - x)
    dF = (n - k + A + params.a + 1) * _eval_core(n - k - 1, A + 1, params.a + 1, x) if n - k > 0 else 0.0 * x
    second = shifted_jacobi_eval(k, JacobiParams(params.c, params.b), tau)
    left = dF * (1.0 - x) ** (k + 1) * second
    jet = tri_eval_jet(idx, params, pt)
    right = k * jet.u + (1.0 - x) * jet.ux - y * jet.uy
    return left, right
