"""Ladder operators on the triangle family and their composed identities.

Each operator is carried in two forms that must agree: a pointwise
first-order differential expression applied to a jet, and an index-space
step (factor, target index, target parameters).  The composed identities
recover derivative, conversion, multiplication, and eigenvalue relations
from chains of at most two ladder applications.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .koornwinder import Jet2, TriIndex, TriParams, _tri_core
from .jacobi import _check_degree

__all__ = [
    "LadderId",
    "TriLadderStep",
    "CompositionId",
    "DegenerateParameterError",
    "all_ladder_ids",
    "ladder_factor",
    "ladder_step",
    "ladder_pointwise",
    "composition_residual",
]


class DegenerateParameterError(ValueError):
    """Parameter combination makes a required denominator vanish."""


@dataclass(frozen=True)
class LadderId:
    """Identifier of one of the 24 operators: axis ('x' or 'y'), label 1..6, dagger flag."""

    axis: str
    s: int
    dagger: bool = False

    def __post_init__(self):
        if self.axis not in ("x", "y"):
            raise ValueError(f"axis must be 'x' or 'y', got {self.axis!r}")
        if self.s not in (1, 2, 3, 4, 5, 6):
            raise ValueError(f"label must be in 1..6, got {self.s!r}")
        if not isinstance(self.dagger, (bool, np.bool_)):
            raise ValueError(f"dagger must be a bool, got {self.dagger!r}")

    @property
    def label(self):
        return f"{self.axis}{self.s}{'+' if self.dagger else ''}"


@dataclass(frozen=True)
class TriLadderStep:
    """Image data of a ladder application: factor times the element at (index, params)."""

    factor: float
    index: TriIndex
    params: TriParams


def all_ladder_ids():
    """The 24 operator ids in deterministic order (y family first, then x)."""
    return [
        LadderId(axis, s, dagger)
        for axis in ("y", "x")
        for s in range(1, 7)
        for dagger in (False, True)
    ]


# index/parameter moves: (dn, dk, da, db, dc, dd)
_MOVES = {
    ("y", 1, False): (-1, -1, 0, 1, 1, 0),
    ("y", 1, True): (1, 1, 0, -1, -1, 0),
    ("y", 2, False): (0, 0, 0, 0, 1, -1),
    ("y", 2, True): (0, 0, 0, 0, -1, 1),
    ("y", 3, False): (0, 0, 0, 1, 0, -1),
    ("y", 3, True): (0, 0, 0, -1, 0, 1),
    ("y", 4, False): (1, 1, 0, 0, -1, -1),
    ("y", 4, True): (-1, -1, 0, 0, 1, 1),
    ("y", 5, False): (1, 1, 0, -1, 0, -1),
    ("y", 5, True): (-1, -1, 0, 1, 0, 1),
    ("y", 6, False): (0, 0, 0, 1, -1, 0),
    ("y", 6, True): (0, 0, 0, -1, 1, 0),
    ("x", 1, False): (-1, 0, 1, 0, 0, 1),
    ("x", 1, True): (1, 0, -1, 0, 0, -1),
    ("x", 2, False): (0, 0, 0, 0, 0, 1),
    ("x", 2, True): (0, 0, 0, 0, 0, -1),
    ("x", 3, False): (0, 0, 1, 0, 0, 0),
    ("x", 3, True): (0, 0, -1, 0, 0, 0),
    ("x", 4, False): (1, 0, 0, 0, 0, -1),
    ("x", 4, True): (-1, 0, 0, 0, 0, 1),
    ("x", 5, False): (-1, 0, 1, 0, 0, 0),
    ("x", 5, True): (1, 0, -1, 0, 0, 0),
    ("x", 6, False): (0, 0, -1, 0, 0, 1),
    ("x", 6, True): (0, 0, 1, 0, 0, -1),
}

# operators whose coefficients divide by 1 - x
_SINGULAR = {
    ("y", 2, True),
    ("y", 3, True),
    ("y", 4, True),
    ("y", 5, True),
    ("x", 1, False),
    ("x", 2, False),
    ("x", 4, True),
    ("x", 6, False),
}


def ladder_factor(lid, idx, params):
    """Scalar factor multiplying the target element for one ladder application."""
    n, k = idx.n, idx.k
    a, b, c = params.a, params.b, params.c
    t = params.t
    key = (lid.axis, lid.s, bool(lid.dagger))
    table = {
        ("y", 1, False): k + b + c + 1,
        ("y", 1, True): k + 1.0,
        ("y", 2, False): k + b + c + 1,
        ("y", 2, True): k + c,
        ("y", 3, False): k + b + c + 1,
        ("y", 3, True): k + b,
        ("y", 4, False): k + 1.0,
        ("y", 4, True): k + b,
        ("y", 5, False): k + 1.0,
        ("y", 5, True): k + c,
        ("y", 6, False): k + c,
        ("y", 6, True): k + b,
        ("x", 1, False): n + k + t + 2,
        ("x", 1, True): n - k + 1.0,
        ("x", 2, False): n + k + t + 2,
        ("x", 2, True): n + k + t - a + 1,
        ("x", 3, False): n + k + t + 2,
        ("x", 3, True): n - k + a,
        ("x", 4, False): n - k + 1.0,
        ("x", 4, True): n - k + a,
        ("x", 5, False): n + k + t - a + 1,
        ("x", 5, True): n - k + 1.0,
        ("x", 6, False): n - k + a,
        ("x", 6, True): n + k + t - a + 1,
    }
    return float(table[key])


def ladder_step(lid, idx, params):
    """Index-space form of one ladder application.

    Applying the pointwise operator to P_{idx}^{params} equals
    factor * P_{index'}^{params'}.  Targets with k' < 0 or k' > n' name the
    zero polynomial; target parameters may leave the orthogonality family.
    """
    idx.validate()
    dn, dk, da, db, dc, dd = _MOVES[(lid.axis, lid.s, bool(lid.dagger))]
    return TriLadderStep(
        ladder_factor(lid, idx, params),
        TriIndex(idx.n + dn, idx.k + dk),
        params.shifted(da, db, dc, dd),
    )


def ladder_pointwise(lid, jet, pt, idx, params):
    """Apply one ladder operator to a jet of function data at a point.

    Operators whose coefficients contain 1/(1-x) raise on the line x = 1;
    everything else is polynomial in (x, y) and evaluates anywhere.
    """
    n, k = idx.n, idx.k
    _check_degree(n)
    _check_degree(k)
    a, b, c, d = params.a, params.b, params.c, params.d
    t = params.t
    x = np.asarray(pt.x, dtype=float)
    y = np.asarray(pt.y, dtype=float)
    z = 1.0 - x - y
    key = (lid.axis, lid.s, bool(lid.dagger))
    if key in _SINGULAR and np.any(1.0 - x == 0.0):
        raise ValueError(f"operator {lid.label} divides by 1 - x and cannot be evaluated at x = 1")
    u, ux, uy = jet.u, jet.ux, jet.uy
    if lid.axis == "y":
        if not lid.dagger:
            if lid.s == 1:
                return uy + 0.0 * x
            if lid.s == 2:
                return (k + b + c + 1) * u + y * uy
            if lid.s == 3:
                return (k + b + c + 1) * u - z * uy
            if lid.s == 4:
                return (y * c - z * (b + k + 1)) * u - y * z * uy
            if lid.s == 5:
                return (y * (c + k + 1) - z * b) * u - y * z * uy
            return c * u - z * uy
        if lid.s == 1:
            return (y * c - z * b) * u - y * z * uy
        if lid.s == 2:
            return (c + k - y * k / (1 - x)) * u - (y / (1 - x)) * z * uy
        if lid.s == 3:
            return (b + k * y / (1 - x)) * u + (y / (1 - x)) * z * uy
        if lid.s == 4:
            return -(k / (1 - x)) * u + (y / (1 - x)) * uy
        if lid.s == 5:
            return (k / (1 - x)) * u + (1 - y / (1 - x)) * uy
        return b * u + y * uy
    if not lid.dagger:
        if lid.s == 1:
            return (k / (1 - x)) * u + ux - (y / (1 - x)) * uy
        if lid.s == 2:
            return (n + k + t + 2 + x * k / (1 - x)) * u + x * ux - (x * y / (1 - x)) * uy
        if lid.s == 3:
            return (n + t + 2) * u - (1 - x) * ux + y * uy
        if lid.s == 4:
            return (x * (n + t + 2) - a - n + k - 1) * u - x * (1 - x) * ux + x * y * uy
        if lid.s == 5:
            return n * u + (1 - x) * ux - y * uy
        return (a + x * k / (1 - x)) * u + x * ux - (x * y / (1 - x)) * uy
    if lid.s == 1:
        return (x * (k + t + 1) - a) * u - x * (1 - x) * ux + x * y * uy
    if lid.s == 2:
        return (n + k + b + c + d + 1 - x * n) * u - x * (1 - x) * ux + x * y * uy
    if lid.s == 3:
        return (a + x * n) * u + x * (1 - x) * ux - x * y * uy
    if lid.s == 4:
        return (k / (1 - x) - n) * u + x * ux - (x * y / (1 - x)) * uy
    if lid.s == 5:
        return (x * (n + t + 2) - a) * u - x * (1 - x) * ux + x * y * uy
    return (k + b + c + d + 1) * u - (1 - x) * ux + y * uy


class CompositionId(enum.Enum):
    """The thirteen composed identities recoverable from ladder chains."""

    DX_IDENTITY = "dx"
    DZ_IDENTITY = "dz"
    WDX_IDENTITY = "wdx"
    WDY_IDENTITY = "wdy"
    WDZ_IDENTITY = "wdz"
    CONV_A = "conv_a"
    CONV_B = "conv_b"
    CONV_C = "conv_c"
    MULT_X = "mult_x"
    MULT_Y = "mult_y"
    MULT_Z = "mult_z"
    EIG_K = "eig_k"
    EIG_N = "eig_n"


# identities derived under the d = 0 restriction
_NEEDS_D0 = {
    CompositionId.DX_IDENTITY,
    CompositionId.DZ_IDENTITY,
    CompositionId.WDX_IDENTITY,
    CompositionId.WDZ_IDENTITY,
    CompositionId.EIG_N,
}


def _default_evaluator(x, y):
    def ev(n, k, p):
        return _tri_core(n, k, p, x, y, partials=True)

    return ev


def _in_range(n, k):
    return n >= 0 and 0 <= k <= n


def _chain(outer, inner, idx, params, ev, pt):
    """Evaluate outer(inner(P_idx)) pointwise, inner via its index-space step."""
    st = ladder_step(inner, idx, params)
    n1, k1 = st.index.n, st.index.k
    if st.factor == 0.0 or not _in_range(n1, k1):
        return 0.0
    u, ux, uy = ev(n1, k1, st.params)
    jet = Jet2(st.factor * u, st.factor * ux, st.factor * uy)
    return ladder_pointwise(outer, jet, pt, st.index, st.params)


def _single(lid, idx, params, ev, pt):
    u, ux, uy = ev(idx.n, idx.k, params)
    return ladder_pointwise(lid, Jet2(u, ux, uy), pt, idx, params)


def _y(s, dagger=False):
    return LadderId("y", s, dagger)


def _x(s, dagger=False):
    return LadderId("x", s, dagger)


def _ladder_gradient(n, k, params):
    """Gradient of P_{n,k} as ladder-step data: lists of (coef, n', k', params').

    Uses the d = 0 differentiation expansions; the x-expansion divides by
    2k + b + c + 1.
    """
    a, b, c = params.a, params.b, params.c
    den = 2 * k + b + c + 1
    if abs(den) < 1e-9:
        raise DegenerateParameterError(
            f"x-derivative expansion divides by 2k+b+c+1 = 0 at k={k}, b={b}, c={c}"
        )
    px = TriParams(a + 1, b, c + 1, 0.0)
    gx = [
        ((n + k + a + b + c + 2) * (k + b + c + 1) / den, n - 1, k, px),
        ((k + b) * (n + k + b + c + 1) / den, n - 1, k - 1, px),
    ]
    gy = [(k + b + c + 1, n - 1, k - 1, TriParams(a, b + 1, c + 1, 0.0))]
    return gx, gy


def composition_residual(cid, idx, params, pt, _evaluator=None):
    """Evaluate both sides of a composed ladder identity at a point.

    Parameters
    ----------
    cid : CompositionId
    idx : TriIndex
    params : TriParams
        Must be valid; identities derived under d = 0 reject other d.
    pt : TriPoint
        Coordinates may be scalars or arrays.

    Returns
    -------
    (left, right)
        The composed-ladder side and the closed-form side; callers form
        |left - right| against max(1, |left|, |right|).
    """
    idx.validate()
    params.validate()
    if cid in _NEEDS_D0 and params.d != 0.0:
        raise ValueError(f"{cid.name} is a d = 0 identity, got d = {params.d}")
    x = np.asarray(pt.x, dtype=float)
    y = np.asarray(pt.y, dtype=float)
    z = 1.0 - x - y
    n, k = idx.n, idx.k
    a, b, c = params.a, params.b, params.c
    t = params.t
    ev = _evaluator if _evaluator is not None else _default_evaluator(x, y)
    u, ux, uy = ev(n, k, params)
    D = 2 * k + b + c + 1
    E = 2 * n + t + 2

    if cid is CompositionId.DX_IDENTITY:
        left = _chain(_x(1), _y(2), idx, params, ev, pt) + _chain(_y(4, True), _x(6, True), idx, params, ev, pt)
        return left, D * ux
    if cid is CompositionId.DZ_IDENTITY:
        left = _chain(_x(1), _y(3), idx, params, ev, pt) - _chain(_y(5, True), _x(6, True), idx, params, ev, pt)
        return left, -D * (uy - ux)
    if cid is CompositionId.WDX_IDENTITY:
        left = _chain(_y(2, True), _x(1, True), idx, params, ev, pt) + _chain(_y(4), _x(6), idx, params, ev, pt)
        return left, D * ((c * x - a * z) * u - x * z * ux)
    if cid is CompositionId.WDY_IDENTITY:
        left = _single(_y(1, True), idx, params, ev, pt)
        return left, (c * y - b * z) * u - y * z * uy
    if cid is CompositionId.WDZ_IDENTITY:
        left = _chain(_y(3, True), _x(1, True), idx, params, ev, pt) - _chain(_y(5), _x(6), idx, params, ev, pt)
        return left, D * ((b * x - a * y) * u + x * y * (uy - ux))
    if cid is CompositionId.CONV_A:
        left = _single(_x(3), idx, params, ev, pt) + _single(_x(5), idx, params, ev, pt)
        return left, E * u
    if cid is CompositionId.CONV_B:
        left = (
            _chain(_y(3), _x(2), idx, params, ev, pt)
            - _chain(_y(3), _x(4, True), idx, params, ev, pt)
            + _chain(_y(5, True), _x(2, True), idx, params, ev, pt)
            - _chain(_y(5, True), _x(4), idx, params, ev, pt)
        )
        return left, D * E * u
    if cid is CompositionId.CONV_C:
        left = (
            _chain(_y(2), _x(2), idx, params, ev, pt)
            - _chain(_y(2), _x(4, True), idx, params, ev, pt)
            - _chain(_y(4, True), _x(2, True), idx, params, ev, pt)
            + _chain(_y(4, True), _x(4), idx, params, ev, pt)
        )
        return left, D * E * u
    if cid is CompositionId.MULT_X:
        left = _single(_x(3, True), idx, params, ev, pt) + _single(_x(5, True), idx, params, ev, pt)
        return left, E * x * u
    if cid is CompositionId.MULT_Y:
        left = (
            _chain(_y(3, True), _x(2, True), idx, params, ev, pt)
            - _chain(_y(3, True), _x(4), idx, params, ev, pt)
            + _chain(_y(5), _x(2), idx, params, ev, pt)
            - _chain(_y(5), _x(4, True), idx, params, ev, pt)
        )
        return left, D * E * y * u
    if cid is CompositionId.MULT_Z:
        left = (
            _chain(_y(2, True), _x(2, True), idx, params, ev, pt)
            - _chain(_y(2, True), _x(4), idx, params, ev, pt)
            + _chain(_y(4), _x(4, True), idx, params, ev, pt)
            - _chain(_y(4), _x(2), idx, params, ev, pt)
        )
        return left, D * E * z * u
    if cid is CompositionId.EIG_K:
        st1 = ladder_step(_y(1), idx, params)
        duy = 0.0
        duyy = 0.0
        if _in_range(st1.index.n, st1.index.k):
            duy = st1.factor * ev(st1.index.n, st1.index.k, st1.params)[0]
            st2 = ladder_step(_y(1), st1.index, st1.params)
            if _in_range(st2.index.n, st2.index.k):
                duyy = st1.factor * st2.factor * ev(st2.index.n, st2.index.k, st2.params)[0]
        left = z * y * duyy + ((1 + b) * (1 - x) - (2 + b + c) * y) * duy
        return left, -k * (k + b + c + 1) * u
    if cid is CompositionId.EIG_N:
        gx, gy = _ladder_gradient(n, k, params)
        dux = sum(cf * ev(n1, k1, p1)[0] for cf, n1, k1, p1 in gx if _in_range(n1, k1))
        duy = sum(cf * ev(n1, k1, p1)[0] for cf, n1, k1, p1 in gy if _in_range(n1, k1))
        duxx = duxy = duyy = 0.0
        for cf, n1, k1, p1 in gx:
            if not _in_range(n1, k1):
                continue
            g2x, g2y = _ladder_gradient(n1, k1, p1)
            duxx += cf * sum(c2 * ev(n2, k2, p2)[0] for c2, n2, k2, p2 in g2x if _in_range(n2, k2))
            duxy += cf * sum(c2 * ev(n2, k2, p2)[0] for c2, n2, k2, p2 in g2y if _in_range(n2, k2))
        for cf, n1, k1, p1 in gy:
            if not _in_range(n1, k1):
                continue
            _, g2y = _ladder_gradient(n1, k1, p1)
            duyy += cf * sum(c2 * ev(n2, k2, p2)[0] for c2, n2, k2, p2 in g2y if _in_range(n2, k2))
        left = (
            x * (1 - x) * duxx
            - 2 * x * y * duxy
            + y * (1 - y) * duyy
            + (a + 1 - (a + b + c + 3) * x) * dux
            + (b + 1 - (a + b + c + 3) * y) * duy
        )
        return left, -n * (n + a + b + c + 2) * u
    raise ValueError(f"unknown composition id {cid!r}")
