"""Jacobi polynomials, their shifted-interval variants, and the ladder operators.

Evaluation runs through a shifted-interval three-term recurrence with
derivative propagation.  Parameter values that make the recurrence
coefficients degenerate (they arise as ladder targets, which may leave the
a, b > -1 family) are routed to an explicit binomial-sum form that is a
polynomial in the parameters and has no singular denominators; points where
that sum cancels catastrophically are redone in extended precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp
import numpy as np

__all__ = [
    "JacobiParams",
    "Jet1",
    "LadderStep",
    "jacobi_eval",
    "jacobi_deriv",
    "shifted_jacobi_eval",
    "shifted_jacobi_deriv",
    "homog_shifted_eval",
    "jacobi_ladder_factor",
    "jacobi_ladder_pointwise",
    "jacobi_ladder_step",
    "shifted_ladder_factor",
    "shifted_ladder_pointwise",
    "shifted_ladder_step",
]


@dataclass(frozen=True)
class JacobiParams:
    """Exponent pair (a, b) of the weight (1-x)^a (1+x)^b.

    Instances may hold any real pair so that ladder targets outside the
    orthogonality family remain representable; validity is checked where
    orthogonality actually matters.
    """

    a: float
    b: float

    def is_valid(self):
        return self.a > -1.0 and self.b > -1.0

    def validate(self):
        if not self.is_valid():
            raise ValueError(f"parameters must satisfy a > -1 and b > -1, got ({self.a}, {self.b})")

    def shifted(self, da, db):
        return JacobiParams(self.a + da, self.b + db)


@dataclass(frozen=True)
class Jet1:
    """Value and first derivative of a univariate function at a point."""

    u: object
    du: object


@dataclass(frozen=True)
class LadderStep:
    """Image data of a ladder operator: factor times the polynomial at (n, params)."""

    factor: float
    n: int
    params: JacobiParams


def _binom_real(top, m):
    # binom(top, m) for real top and integer m >= 0
    r = 1.0
    for i in range(1, m + 1):
        r *= (top - m + i) / i
    return r


def _check_degree(n):
    if not isinstance(n, (int, np.integer)):
        raise ValueError(f"degree must be an integer, got {n!r}")


def _recurrence_safe(nmax, a, b):
    # forward recurrence denominators must stay away from zero
    for n in range(1, nmax):
        if abs(n + a + b + 1) < 0.25 or abs(2 * n + a + b) < 0.25:
            return False
    return True


def _rec_coeffs(n, a, b):
    # P_{n+1}(X) = (A X + B) P_n(X) - C P_{n-1}(X) on (-1, 1), n >= 1
    s = 2 * n + a + b
    den = 2 * (n + 1) * (n + a + b + 1)
    A = (s + 1) * (s + 2) / den
    B = (s + 1) * (a * a - b * b) / (den * s)
    C = 2 * (n + a) * (n + b) * (s + 2) / (den * s)
    return A, B, C


def _shifted_table(nmax, a, b, x, nderiv=0):
    """Values (and optional x-derivatives) of the shifted polynomials.

    Returns an array of shape (nderiv + 1, nmax + 1, npts) over degrees
    0..nmax at the points x in (0, 1) coordinates.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros((nderiv + 1, nmax + 1, x.size))
    if nmax < 0:
        return out
    if _recurrence_safe(nmax, a, b):
        out[0, 0] = 1.0
        if nmax >= 1:
            out[0, 1] = (a + 1) + (a + b + 2) * (x - 1)
            if nderiv >= 1:
                out[1, 1] = a + b + 2
        for n in range(1, nmax):
            A, B, C = _rec_coeffs(n, a, b)
            lin = A * (2 * x - 1) + B
            out[0, n + 1] = lin * out[0, n] - C * out[0, n - 1]
            if nderiv >= 1:
                out[1, n + 1] = 2 * A * out[0, n] + lin * out[1, n] - C * out[1, n - 1]
            if nderiv >= 2:
                out[2, n + 1] = 4 * A * out[1, n] + lin * out[2, n] - C * out[2, n - 1]
    else:
        for n in range(nmax + 1):
            for d in range(nderiv + 1):
                out[d, n] = _shifted_formal(n, a, b, x, d)
    return out


# Explicit sums alternate in sign, so their float64 error is bounded by the
# sum of term magnitudes times roundoff.  Points where that estimate exceeds
# the guard (relative to max(1, |value|)) are redone in high precision.
_FORMAL_GUARD = 1e-12


def _shifted_formal_mp(n, a, b, xv, deriv):
    with mp.workdps(40):
        am, bm, xm = mp.mpf(a), mp.mpf(b), mp.mpf(xv)
        tot = mp.mpf(0)
        for j in range(n + 1):
            coef = mp.binomial(n + am, n - j) * mp.binomial(n + bm, j)
            p, q = j, n - j
            term = mp.mpf(0)
            for i in range(deriv + 1):
                pi, qi = p - i, q - (deriv - i)
                if pi < 0 or qi < 0:
                    continue
                cf = mp.mpf(_binom_real(deriv, i))
                for r in range(i):
                    cf *= p - r
                for r in range(deriv - i):
                    cf *= q - r
                term += cf * (xm - 1) ** pi * xm**qi
            tot += coef * term
        return float(tot)


def _shifted_formal(n, a, b, x, deriv=0):
    # explicit sum: P~_n = sum_j binom(n+a, n-j) binom(n+b, j) (x-1)^j x^(n-j)
    x = np.asarray(x, dtype=float)
    tot = np.zeros_like(x)
    mag = np.zeros_like(x)
    for j in range(n + 1):
        coef = _binom_real(n + a, n - j) * _binom_real(n + b, j)
        p, q = j, n - j
        # derivative of (x-1)^p x^q of order `deriv` by Leibniz over the two powers
        term = np.zeros_like(x)
        tmag = np.zeros_like(x)
        for i in range(deriv + 1):
            pi, qi = p - i, q - (deriv - i)
            if pi < 0 or qi < 0:
                continue
            cf = _binom_real(deriv, i)
            for r in range(i):
                cf *= p - r
            for r in range(deriv - i):
                cf *= q - r
            piece = cf * (x - 1) ** pi * x**qi
            term += piece
            tmag += np.abs(piece)
        tot += coef * term
        mag += abs(coef) * tmag
    bad = mag * (n + 2) * 2.2e-16 > _FORMAL_GUARD * np.maximum(np.abs(tot), 1.0)
    if np.any(bad):
        tflat = tot.reshape(-1)
        xflat = x.reshape(-1)
        for i in np.nonzero(bad.reshape(-1))[0]:
            tflat[i] = _shifted_formal_mp(n, a, b, float(xflat[i]), deriv)
    return tot


def _homog_table(kmax, a, b, y, s, partials=False):
    """Homogenized second-factor table H_k(y, s) = s^k P~_k(y/s).

    Returns (H, Hy, Hs) arrays of shape (kmax + 1, npts); the partials are
    None unless requested.  Division-free, valid on the closed triangle.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    s = np.atleast_1d(np.asarray(s, dtype=float))
    y, s = np.broadcast_arrays(y, s)
    H = np.zeros((kmax + 1, y.size))
    Hy = np.zeros_like(H) if partials else None
    Hs = np.zeros_like(H) if partials else None
    if kmax < 0:
        return H, Hy, Hs
    yf = y.ravel()
    sf = s.ravel()
    if _recurrence_safe(kmax, a, b):
        H[0] = 1.0
        if kmax >= 1:
            H[1] = (a + 1) * sf + (a + b + 2) * (yf - sf)
            if partials:
                Hy[1] = a + b + 2
                Hs[1] = -(b + 1)
        for k in range(1, kmax):
            A, B, C = _rec_coeffs(k, a, b)
            lin = A * (2 * yf - sf) + B * sf
            H[k + 1] = lin * H[k] - C * sf**2 * H[k - 1]
            if partials:
                Hy[k + 1] = 2 * A * H[k] + lin * Hy[k] - C * sf**2 * Hy[k - 1]
                Hs[k + 1] = (B - A) * H[k] + lin * Hs[k] - C * (2 * sf * H[k - 1] + sf**2 * Hs[k - 1])
    else:
        for k in range(kmax + 1):
            H[k] = _homog_formal(k, a, b, yf, sf, 0, 0)
            if partials:
                Hy[k] = _homog_formal(k, a, b, yf, sf, 1, 0)
                Hs[k] = _homog_formal(k, a, b, yf, sf, 0, 1)
    return H, Hy, Hs


def _homog_formal_mp(k, a, b, yv, sv, dy, ds):
    with mp.workdps(40):
        am, bm = mp.mpf(a), mp.mpf(b)
        ym, sm = mp.mpf(yv), mp.mpf(sv)
        tot = mp.mpf(0)
        for j in range(k + 1):
            coef = mp.binomial(k + am, k - j) * mp.binomial(k + bm, j)
            p, q = j, k - j
            for _ in range(ds):
                coef *= -p
                p -= 1
            if p < 0:
                continue
            if dy == 0:
                tot += coef * (ym - sm) ** p * ym**q
            else:
                t = mp.mpf(0)
                if p > 0:
                    t += p * (ym - sm) ** (p - 1) * ym**q
                if q > 0:
                    t += q * (ym - sm) ** p * ym ** (q - 1)
                tot += coef * t
        return float(tot)


def _homog_formal(k, a, b, y, s, dy, ds):
    # explicit sum: H_k = sum_j binom(k+a, k-j) binom(k+b, j) (y-s)^j y^(k-j)
    tot = np.zeros_like(y)
    mag = np.zeros_like(y)
    for j in range(k + 1):
        coef = _binom_real(k + a, k - j) * _binom_real(k + b, j)
        p, q = j, k - j
        for _ in range(ds):
            coef *= -p
            p -= 1
        if p < 0:
            continue
        if dy == 0:
            tot += coef * (y - s) ** p * y**q
            mag += abs(coef) * np.abs((y - s) ** p * y**q)
        elif dy == 1:
            t = np.zeros_like(y)
            tm = np.zeros_like(y)
            if p > 0:
                piece = p * (y - s) ** (p - 1) * y**q
                t += piece
                tm += np.abs(piece)
            if q > 0:
                piece = q * (y - s) ** p * y ** (q - 1)
                t += piece
                tm += np.abs(piece)
            tot += coef * t
            mag += abs(coef) * tm
        else:
            raise ValueError(f"unsupported derivative order {dy}")
    bad = mag * (k + 2) * 2.2e-16 > _FORMAL_GUARD * np.maximum(np.abs(tot), 1.0)
    if np.any(bad):
        tflat = tot.reshape(-1)
        yflat = np.broadcast_to(y, tot.shape).reshape(-1)
        sflat = np.broadcast_to(s, tot.shape).reshape(-1)
        for i in np.nonzero(bad.reshape(-1))[0]:
            tflat[i] = _homog_formal_mp(k, a, b, float(yflat[i]), float(sflat[i]), dy, ds)
    return tot


def _eval_core(n, a, b, x, deriv=0):
    # shifted-interval evaluation for any real parameters; negative degree is zero
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    if n < 0:
        out = np.zeros_like(np.atleast_1d(x))
        return float(out[0]) if scalar else out
    tab = _shifted_table(n, a, b, np.atleast_1d(x).ravel(), nderiv=deriv)
    out = tab[deriv, n].reshape(np.atleast_1d(x).shape)
    return float(out[0]) if scalar else out


def jacobi_eval(n, p, x):
    """Evaluate P_n^{(a,b)} at x in [-1, 1].

    Parameters
    ----------
    n : int
        Degree.  Negative degrees evaluate to zero (boundary convention).
    p : JacobiParams
        Weight exponents, must satisfy a > -1 and b > -1.
    x : float or array_like
        Evaluation points.

    Returns
    -------
    float or ndarray
        Values, normalized so that P_n^{(a,b)}(1) = binom(n+a, n).
    """
    _check_degree(n)
    p.validate()
    X = np.asarray(x, dtype=float)
    return _eval_core(n, p.a, p.b, (X + 1) / 2)


def jacobi_deriv(n, p, x):
    """Derivative of P_n^{(a,b)}, computed as (n+a+b+1)/2 times the lifted polynomial."""
    _check_degree(n)
    p.validate()
    if n <= 0:
        X = np.asarray(x, dtype=float)
        return 0.0 if X.ndim == 0 else np.zeros_like(X)
    X = np.asarray(x, dtype=float)
    return (n + p.a + p.b + 1) / 2 * _eval_core(n - 1, p.a + 1, p.b + 1, (X + 1) / 2)


def shifted_jacobi_eval(n, p, x):
    """Evaluate the shifted polynomial on [0, 1], equal to jacobi_eval(n, p, 2x - 1)."""
    _check_degree(n)
    p.validate()
    return _eval_core(n, p.a, p.b, x)


def shifted_jacobi_deriv(n, p, x):
    """Derivative of the shifted polynomial: (n+a+b+1) times the lifted one."""
    _check_degree(n)
    p.validate()
    if n <= 0:
        xx = np.asarray(x, dtype=float)
        return 0.0 if xx.ndim == 0 else np.zeros_like(xx)
    return (n + p.a + p.b + 1) * _eval_core(n - 1, p.a + 1, p.b + 1, x)


def homog_shifted_eval(k, p, y, s):
    """Homogenized shifted polynomial s^k P~_k^{(a,b)}(y/s), polynomial in (y, s).

    Well-defined for all (y, s) including s = 0, where the direct quotient
    form breaks down.
    """
    _check_degree(k)
    p.validate()
    yy = np.asarray(y, dtype=float)
    ss = np.asarray(s, dtype=float)
    scalar = yy.ndim == 0 and ss.ndim == 0
    if k < 0:
        return 0.0 if scalar else np.zeros(np.broadcast(yy, ss).shape)
    H, _, _ = _homog_table(k, p.a, p.b, np.atleast_1d(yy), np.atleast_1d(ss))
    out = H[k].reshape(np.broadcast(np.atleast_1d(yy), np.atleast_1d(ss)).shape)
    return float(out[0]) if scalar else out


# ladder move table: (s, dagger) -> (dn, da, db); shared by both families
_MOVES = {
    (1, False): (-1, 1, 1),
    (1, True): (1, -1, -1),
    (2, False): (0, 1, 0),
    (2, True): (0, -1, 0),
    (3, False): (0, 0, 1),
    (3, True): (0, 0, -1),
    (4, False): (1, -1, 0),
    (4, True): (-1, 1, 0),
    (5, False): (1, 0, -1),
    (5, True): (-1, 0, 1),
    (6, False): (0, 1, -1),
    (6, True): (0, -1, 1),
}


def _check_ladder_args(s, dagger, n):
    if s not in (1, 2, 3, 4, 5, 6):
        raise ValueError(f"ladder label must be in 1..6, got {s!r}")
    if not isinstance(dagger, (bool, np.bool_)):
        raise ValueError(f"dagger must be a bool, got {dagger!r}")
    _check_degree(n)
    if n < 0:
        raise ValueError(f"degree must be nonnegative, got {n}")


def jacobi_ladder_factor(s, dagger, n, p):
    """Scalar factor multiplying the target polynomial for the (-1,1) family."""
    a, b = p.a, p.b
    table = {
        (1, False): (n + a + b + 1) / 2,
        (1, True): 2.0 * (n + 1),
        (2, False): n + a + b + 1,
        (2, True): 2.0 * (n + a),
        (3, False): n + a + b + 1,
        (3, True): 2.0 * (n + b),
        (4, False): 2.0 * (n + 1),
        (4, True): n + b,
        (5, False): 2.0 * (n + 1),
        (5, True): n + a,
        (6, False): n + b,
        (6, True): n + a,
    }
    return float(table[(s, bool(dagger))])


def shifted_ladder_factor(s, dagger, n, p):
    """Scalar factor for the shifted family: the (-1,1) factor with 1/2 and 2 dropped."""
    a, b = p.a, p.b
    table = {
        (1, False): n + a + b + 1,
        (1, True): n + 1.0,
        (2, False): n + a + b + 1,
        (2, True): n + a,
        (3, False): n + a + b + 1,
        (3, True): n + b,
        (4, False): n + 1.0,
        (4, True): n + b,
        (5, False): n + 1.0,
        (5, True): n + a,
        (6, False): n + b,
        (6, True): n + a,
    }
    return float(table[(s, bool(dagger))])


def jacobi_ladder_step(s, dagger, n, p):
    """Index-space form of a ladder application on the (-1,1) family.

    Returns the LadderStep (factor, n', params') such that applying the
    pointwise operator to P_n^{(a,b)} yields factor * P_{n'}^{(a',b')}.
    """
    _check_ladder_args(s, dagger, n)
    dn, da, db = _MOVES[(s, bool(dagger))]
    return LadderStep(jacobi_ladder_factor(s, dagger, n, p), n + dn, p.shifted(da, db))


def shifted_ladder_step(s, dagger, n, p):
    """Index-space form of a ladder application on the shifted family."""
    _check_ladder_args(s, dagger, n)
    dn, da, db = _MOVES[(s, bool(dagger))]
    return LadderStep(shifted_ladder_factor(s, dagger, n, p), n + dn, p.shifted(da, db))


def jacobi_ladder_pointwise(s, dagger, jet, n, p, x):
    """Apply a ladder operator to a jet of function data at x in (-1, 1).

    The jet need not come from a Jacobi polynomial; the operator is the
    first-order differential expression itself.
    """
    _check_ladder_args(s, dagger, n)
    a, b = p.a, p.b
    u, du = jet.u, jet.du
    X = np.asarray(x, dtype=float)
    if not dagger:
        if s == 1:
            return du + 0.0 * X
        if s == 2:
            return (a + b + n + 1) * u + (1 + X) * du
        if s == 3:
            return (a + b + n + 1) * u - (1 - X) * du
        if s == 4:
            return ((1 + X) * a - (1 - X) * (b + n + 1)) * u - (1 - X**2) * du
        if s == 5:
            return ((1 + X) * (a + n + 1) - (1 - X) * b) * u - (1 - X**2) * du
        return b * u + (1 + X) * du
    if s == 1:
        return ((1 + X) * a - (1 - X) * b) * u - (1 - X**2) * du
    if s == 2:
        return (2 * a + (1 - X) * n) * u - (1 - X**2) * du
    if s == 3:
        return (2 * b + (1 + X) * n) * u + (1 - X**2) * du
    if s == 4:
        return -n * u + (1 + X) * du
    if s == 5:
        return n * u + (1 - X) * du
    return a * u - (1 - X) * du


def shifted_ladder_pointwise(s, dagger, jet, n, p, x):
    """Apply a shifted-family ladder operator to a jet at x in (0, 1)."""
    _check_ladder_args(s, dagger, n)
    a, b = p.a, p.b
    u, du = jet.u, jet.du
    xx = np.asarray(x, dtype=float)
    if not dagger:
        if s == 1:
            return du + 0.0 * xx
        if s == 2:
            return (a + b + n + 1) * u + xx * du
        if s == 3:
            return (a + b + n + 1) * u - (1 - xx) * du
        if s == 4:
            return (xx * a - (1 - xx) * (b + n + 1)) * u - xx * (1 - xx) * du
        if s == 5:
            return (xx * (a + n + 1) - (1 - xx) * b) * u - xx * (1 - xx) * du
        return b * u + xx * du
    if s == 1:
        return (xx * a - (1 - xx) * b) * u - xx * (1 - xx) * du
    if s == 2:
        return (a + (1 - xx) * n) * u - xx * (1 - xx) * du
    if s == 3:
        return (b + xx * n) * u + xx * (1 - xx) * du
    if s == 4:
        return -n * u + xx * du
    if s == 5:
        return n * u + (1 - xx) * du
    return a * u - (1 - xx) * du
