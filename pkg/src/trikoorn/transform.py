"""Quadrature on the triangle and the analysis/synthesis transforms.

The triangle rule is a tensor Gauss rule pulled through the square-to-
triangle map x = s, y = (1-s)t.  The Jacobian and the four-parameter weight
both factorize in (s, t), so the two one-dimensional rules absorb the full
weight and the rule integrates (polynomial) * weight exactly up to the
stated strength.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gamma

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .koornwinder import (
    TriParams,
    TriPoint,
    basis_size,
    basis_eval_all,
    point_rows,
    weight_eval,
)
from .operators import BasisTag, CoeffVec

__all__ = [
    "QuadRule",
    "gauss_jacobi_rule",
    "duffy_rule",
    "norm_sq",
    "analyze",
    "synthesize",
    "gram_matrix",
    "save_coeffs_csv",
    "load_coeffs_csv",
    "save_values_csv",
    "load_values_csv",
]


@dataclass(frozen=True, eq=False)
class QuadRule:
    """Triangle quadrature rule: points (npts, 2), weights (npts,), and provenance.

    The weights absorb the full weight function of `params`; `strength` is
    the largest total degree integrated exactly against that weight.
    """

    points: np.ndarray
    weights: np.ndarray
    params: TriParams
    m: int
    strength: int


def gauss_jacobi_rule(m, alpha, beta):
    """Gauss rule with m nodes on (0, 1) for the weight x^beta (1-x)^alpha.

    Built from the symmetric tridiagonal recurrence matrix; weights come
    from the squared first components of the eigenvectors scaled by the
    zeroth moment, so they are positive by construction.  Exact for
    polynomials of degree <= 2m - 1; weights sum to B(beta+1, alpha+1).
    """
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ValueError(f"node count must be a positive integer, got {m!r}")
    if alpha <= -1 or beta <= -1:
        raise ValueError(f"weight exponents must exceed -1, got ({alpha}, {beta})")
    a, b = float(alpha), float(beta)
    diag = np.empty(m)
    off = np.empty(max(m - 1, 0))
    diag[0] = (b - a) / (a + b + 2)
    for i in range(1, m):
        diag[i] = (b * b - a * a) / ((2 * i + a + b) * (2 * i + a + b + 2))
    if m > 1:
        # the generic subdiagonal formula is 0/0 at i = 1 when a + b = -1
        off[0] = np.sqrt(4 * (1 + a) * (1 + b) / ((2 + a + b) ** 2 * (3 + a + b)))
        for i in range(2, m):
            num = 4 * i * (i + a) * (i + b) * (i + a + b)
            den = (2 * i + a + b) ** 2 * (2 * i + a + b + 1) * (2 * i + a + b - 1)
            off[i - 1] = np.sqrt(num / den)
    nodes, vecs = eigh_tridiagonal(diag, off)
    mu0 = gamma(a + 1) * gamma(b + 1) / gamma(a + b + 2)
    weights = mu0 * vecs[0, :] ** 2
    return (1 + nodes) / 2, weights


def duffy_rule(m, params):
    """Tensor Gauss rule on the triangle absorbing the weight of `params`.

    The s-direction rule carries exponents (b+c+d+1, a) and the
    t-direction rule carries (c, b); points are (s_i, (1-s_i) t_j) in
    s-major order.  Requires b + c + d + 2 > 0 for integrability of the
    s-factor (automatic on parameter grids bounded below by -1/2).
    """
    params.validate()
    if params.b + params.c + params.d + 2 <= 0:
        raise ValueError(
            f"s-direction exponent b+c+d+1 must exceed -1, got {params.b + params.c + params.d + 1}"
        )
    xs, ws = gauss_jacobi_rule(m, params.b + params.c + params.d + 1, params.a)
    xt, wt = gauss_jacobi_rule(m, params.c, params.b)
    S = np.repeat(xs, m)
    T = np.tile(xt, m)
    pts = np.column_stack([S, (1 - S) * T])
    wts = np.repeat(ws, m) * np.tile(wt, m)
    return QuadRule(pts, wts, params, int(m), 2 * int(m) - 1)


def norm_sq(idx, params):
    """Squared weighted norm of one basis element, by a rule exact for its square."""
    idx.validate()
    params.validate()
    rule = duffy_rule(idx.n + 1, params)
    vals = basis_eval_all(idx.n, params, rule.points)[:, idx.n * (idx.n + 1) // 2 + idx.k]
    return float(np.dot(rule.weights, vals * vals))


def analyze(f, N, params, m=None):
    """Project a function onto the basis of degree <= N by quadrature.

    Parameters
    ----------
    f : callable or array_like
        Either f(x, y) accepting coordinate arrays, or values already
        sampled at the nodes of the rule this transform uses.
    N : int
        Maximum degree of the expansion.
    params : TriParams
    m : int, optional
        Nodes per direction; defaults to N + 1, the smallest count whose
        strength 2m - 1 covers products of two degree-N polynomials.

    Returns
    -------
    CoeffVec
        Coefficients in ascending linear index order.  Each coefficient is
        the quadrature inner product divided by the quadrature norm of the
        same element, so rule-level bias cancels between the two.
    """
    if m is None:
        m = N + 1
    rule = duffy_rule(m, params)
    if callable(f):
        vals = np.asarray(f(rule.points[:, 0], rule.points[:, 1]), dtype=float)
        vals = np.broadcast_to(vals, (rule.points.shape[0],)).astype(float)
    else:
        vals = np.asarray(f, dtype=float)
        if vals.shape != (rule.points.shape[0],):
            raise ValueError(
                f"sampled values must match the rule nodes, expected {rule.points.shape[0]}, got {vals.shape}"
            )
    B = basis_eval_all(N, params, rule.points)
    num = B.T @ (rule.weights * vals)
    den = np.einsum("pi,p,pi->i", B, rule.weights, B)
    return CoeffVec(BasisTag(params, False, int(N)), num / den)


def synthesize(vec, pts):
    """Evaluate a coefficient vector at points (TriPoint list or (npts, 2) array).

    Weighted bases multiply the polynomial sum by x^a y^b z^c; negative
    exponents then require interior points.
    """
    pts = point_rows(pts)
    B = basis_eval_all(vec.basis.maxdeg, vec.basis.params, pts)
    out = B @ vec.values
    if vec.basis.weighted:
        out = out * weight_eval(vec.basis.params, TriPoint(pts[:, 0], pts[:, 1]))
    return out


def gram_matrix(N, params, m):
    """Weighted Gram matrix of the degree <= N basis under an m-point-per-direction rule.

    Requires m >= N + 1 so the rule strength covers every pairwise product;
    the result is then diagonal up to roundoff.
    """
    if m < N + 1:
        raise ValueError(f"rule size m = {m} is below the exactness requirement N + 1 = {N + 1}")
    rule = duffy_rule(m, params)
    B = basis_eval_all(N, params, rule.points)
    return B.T @ (B * rule.weights[:, None])


def coeffs_csv_text(vec):
    """Coefficient CSV text with header n,k,value in ascending linear index."""
    lines = ["n,k,value"]
    i = 0
    for n in range(vec.basis.maxdeg + 1):
        for k in range(n + 1):
            lines.append(f"{n},{k},{vec.values[i]:.17g}")
            i += 1
    return "\n".join(lines) + "\n"


def save_coeffs_csv(vec, path):
    """Write coefficients as CSV with header n,k,value in ascending linear index."""
    with open(str(path), "w") as fh:
        fh.write(coeffs_csv_text(vec))


def load_coeffs_csv(path, basis):
    """Read a coefficient CSV written by save_coeffs_csv for a known basis."""
    with open(str(path)) as fh:
        header = fh.readline().strip()
        if header != "n,k,value":
            raise ValueError(f"expected header 'n,k,value', got {header!r}")
        vals = np.zeros(basis.size)
        count = 0
        for line in fh:
            line = line.strip()
            if not line:
                continue
            n_s, k_s, v_s = line.split(",")
            n, k = int(n_s), int(k_s)
            if not 0 <= k <= n <= basis.maxdeg:
                raise ValueError(f"index ({n}, {k}) outside basis of degree {basis.maxdeg}")
            vals[n * (n + 1) // 2 + k] = float(v_s)
            count += 1
    if count != basis.size:
        raise ValueError(f"expected {basis.size} rows, got {count}")
    return CoeffVec(basis, vals)


def values_csv_text(pts, vals):
    """Point-value CSV text with header x,y,value."""
    lines = ["x,y,value"]
    for (x, y), v in zip(np.asarray(pts, dtype=float), np.asarray(vals, dtype=float)):
        lines.append(f"{x:.17g},{y:.17g},{v:.17g}")
    return "\n".join(lines) + "\n"


def save_values_csv(pts, vals, path):
    """Write point values as CSV with header x,y,value."""
    with open(str(path), "w") as fh:
        fh.write(values_csv_text(pts, vals))


def load_values_csv(path):
    """Read a CSV with header x,y,value; returns (points, values)."""
    pts = []
    vals = []
    with open(str(path)) as fh:
        header = fh.readline().strip()
        if header != "x,y,value":
            raise ValueError(f"expected header 'x,y,value', got {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            xs, ys, vs = line.split(",")
            pts.append((float(xs), float(ys)))
            vals.append(float(vs))
    return np.array(pts, dtype=float), np.array(vals, dtype=float)
