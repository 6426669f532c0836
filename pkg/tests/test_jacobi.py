"""Tests for the Jacobi evaluation layer and its ladder operators."""

import numpy as np
import pytest
from scipy.special import eval_jacobi

import trikoorn as tk


def _rng(tag):
    return np.random.default_rng([1729, tag])


def _scipy_deriv(n, a, b, x):
    # classical parameter-shift derivative, independent of the package
    if n == 0:
        return np.zeros_like(np.asarray(x, dtype=float))
    return 0.5 * (n + a + b + 1) * eval_jacobi(n - 1, a + 1, b + 1, x)


# ---------------------------------------------------------------- evaluation


def test_interval_eval_frozen_values():
    # P_3^{(1,1)}(1/4) = -41/64, exact rational from the closed form
    got = tk.jacobi_eval(3, tk.JacobiParams(1.0, 1.0), 0.25)
    assert abs(got - (-41.0 / 64.0)) < 1e-14
    got = tk.jacobi_eval(5, tk.JacobiParams(0.5, -0.25), 0.3)
    assert abs(got - 0.3206758001327515) < 1e-13


def test_interval_eval_degree_zero_and_one():
    p = tk.JacobiParams(0.7, -0.3)
    x = np.linspace(-1, 1, 7)
    assert np.allclose(tk.jacobi_eval(0, p, x), 1.0, atol=0)
    lin = 0.5 * (p.a + p.b + 2) * (x - 1) + (p.a + 1)
    assert np.allclose(tk.jacobi_eval(1, p, x), lin, atol=1e-15)


@pytest.mark.parametrize("n", [2, 5, 11, 20])
def test_interval_eval_matches_scipy(n):
    rng = _rng(n)
    for _ in range(20):
        a, b = rng.uniform(-0.9, 3.0, 2)
        x = rng.uniform(-1.0, 1.0, 9)
        got = tk.jacobi_eval(n, tk.JacobiParams(a, b), x)
        ref = eval_jacobi(n, a, b, x)
        assert np.max(np.abs(got - ref) / np.maximum(1.0, np.abs(ref))) < 1e-12


def test_interval_eval_accepts_scalars_and_arrays():
    p = tk.JacobiParams(0.5, 0.5)
    xs = np.array([-0.4, 0.1, 0.9])
    batch = tk.jacobi_eval(4, p, xs)
    singles = [tk.jacobi_eval(4, p, float(x)) for x in xs]
    assert np.allclose(batch, singles, atol=0)


def test_interval_deriv_matches_parameter_shift():
    rng = _rng(2)
    for n in range(0, 13):
        a, b = rng.uniform(-0.9, 2.5, 2)
        x = rng.uniform(-1.0, 1.0, 8)
        got = tk.jacobi_deriv(n, tk.JacobiParams(a, b), x)
        ref = _scipy_deriv(n, a, b, x)
        assert np.max(np.abs(got - ref)) < 1e-10 * max(1.0, np.max(np.abs(ref)))


def test_shifted_eval_is_interval_at_doubled_argument():
    rng = _rng(3)
    for _ in range(30):
        n = int(rng.integers(0, 16))
        a, b = rng.uniform(-0.9, 3.0, 2)
        x = rng.uniform(0.0, 1.0, 6)
        got = tk.shifted_jacobi_eval(n, tk.JacobiParams(a, b), x)
        ref = eval_jacobi(n, a, b, 2.0 * x - 1.0)
        assert np.max(np.abs(got - ref) / np.maximum(1.0, np.abs(ref))) < 1e-12


def test_shifted_eval_frozen_value():
    # exact rational: -3177909/10000000 at x = 31/50
    got = tk.shifted_jacobi_eval(4, tk.JacobiParams(1.5, 0.5), 0.62)
    assert abs(got - (-0.3177909)) < 1e-14


def test_shifted_deriv_chain_rule():
    rng = _rng(4)
    for n in range(1, 10):
        a, b = rng.uniform(-0.9, 2.0, 2)
        x = rng.uniform(0.0, 1.0, 6)
        got = tk.shifted_jacobi_deriv(n, tk.JacobiParams(a, b), x)
        ref = 2.0 * _scipy_deriv(n, a, b, 2.0 * x - 1.0)
        assert np.max(np.abs(got - ref)) < 1e-10 * max(1.0, np.max(np.abs(ref)))


# ------------------------------------------------------- homogenized factor


def test_homog_matches_scaled_shifted_at_positive_scale():
    rng = _rng(5)
    for _ in range(40):
        k = int(rng.integers(0, 12))
        a, b = rng.uniform(-0.9, 2.5, 2)
        s = rng.uniform(0.2, 1.5)
        y = rng.uniform(0.0, s)
        got = tk.homog_shifted_eval(k, tk.JacobiParams(a, b), y, s)
        ref = s**k * eval_jacobi(k, a, b, 2.0 * y / s - 1.0)
        assert abs(got - ref) < 1e-12 * max(1.0, abs(ref))


def test_homog_finite_at_zero_scale():
    # s = 0 must evaluate without dividing; value is the leading-term limit
    p = tk.JacobiParams(0.0, 0.0)
    y = 0.7
    got = tk.homog_shifted_eval(3, p, y, 0.0)
    # lim s->0 s^3 Pt_3(y/s) = (leading coeff of Pt_3) y^3 = 20 y^3
    assert abs(got - 20.0 * y**3) < 1e-12


def test_homog_vectorized_scale():
    p = tk.JacobiParams(0.5, 1.5)
    y = np.array([0.1, 0.2, 0.3])
    s = np.array([0.9, 0.5, 1.0])
    batch = tk.homog_shifted_eval(4, p, y, s)
    singles = [tk.homog_shifted_eval(4, p, float(yv), float(sv)) for yv, sv in zip(y, s)]
    assert np.allclose(batch, singles, atol=0)


# ------------------------------------------------------------------ ladders

_INTERVAL_MOVES = {
    # s: (dn, da, db) for the undaggered direction
    1: (-1, 1, 1),
    2: (0, 1, 0),
    3: (0, 0, 1),
    4: (1, -1, 0),
    5: (1, 0, -1),
    6: (0, 1, -1),
}


@pytest.mark.parametrize("s", sorted(_INTERVAL_MOVES))
@pytest.mark.parametrize("dagger", [False, True])
def test_interval_ladder_step_family_moves(s, dagger):
    p = tk.JacobiParams(0.5, 0.5)
    st = tk.jacobi_ladder_step(s, dagger, 3, p)
    dn, da, db = _INTERVAL_MOVES[s]
    if dagger:
        dn, da, db = -dn, -da, -db
    assert st.n == 3 + dn
    assert st.params.a == p.a + da
    assert st.params.b == p.b + db


@pytest.mark.parametrize("s", sorted(_INTERVAL_MOVES))
@pytest.mark.parametrize("dagger", [False, True])
def test_interval_ladder_identity_against_scipy(s, dagger):
    # jet built from scipy values only, so both the factor and the
    # differential expression are checked against an external route
    rng = _rng(100 + s + 10 * dagger)
    for _ in range(25):
        n = int(rng.integers(1, 13))
        a, b = rng.choice([-0.5, 0.0, 0.5, 1.0, 2.5], 2)
        x = rng.uniform(-0.95, 0.95)
        jet = tk.Jet1(eval_jacobi(n, a, b, x), _scipy_deriv(n, a, b, x))
        p = tk.JacobiParams(a, b)
        st = tk.jacobi_ladder_step(s, dagger, n, p)
        if st.n < 0 or st.params.a <= -1.0 or st.params.b <= -1.0:
            continue
        lhs = tk.jacobi_ladder_pointwise(s, dagger, jet, n, p, x)
        rhs = st.factor * eval_jacobi(st.n, st.params.a, st.params.b, x)
        assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs), abs(rhs))


@pytest.mark.parametrize("s", sorted(_INTERVAL_MOVES))
@pytest.mark.parametrize("dagger", [False, True])
def test_shifted_ladder_identity_against_scipy(s, dagger):
    rng = _rng(200 + s + 10 * dagger)
    for _ in range(25):
        n = int(rng.integers(1, 13))
        a, b = rng.choice([-0.5, 0.0, 0.5, 1.0, 2.5], 2)
        x = rng.uniform(0.05, 0.95)
        t = 2.0 * x - 1.0
        jet = tk.Jet1(eval_jacobi(n, a, b, t), 2.0 * _scipy_deriv(n, a, b, t))
        p = tk.JacobiParams(a, b)
        st = tk.shifted_ladder_step(s, dagger, n, p)
        if st.n < 0 or st.params.a <= -1.0 or st.params.b <= -1.0:
            continue
        lhs = tk.shifted_ladder_pointwise(s, dagger, jet, n, p, x)
        rhs = st.factor * eval_jacobi(st.n, st.params.a, st.params.b, t)
        assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs), abs(rhs))


def test_shifted_factor_drops_interval_prefactors():
    # the shifted family replaces the 1/2 and 2 prefactors by 1, so the
    # factors can only differ from the interval ones by a power of 2
    p = tk.JacobiParams(0.5, 1.5)
    for s in range(1, 7):
        for dagger in (False, True):
            fi = tk.jacobi_ladder_factor(s, dagger, 4, p)
            fs = tk.shifted_ladder_factor(s, dagger, 4, p)
            if fi == 0.0:
                assert fs == 0.0
                continue
            ratio = fs / fi
            assert ratio in (0.5, 1.0, 2.0)


def test_ladder_factor_frozen_values():
    p = tk.JacobiParams(0.5, 0.5)
    # lowering both params and the degree: factor n + (a+b)/2 + 1... frozen
    assert tk.jacobi_ladder_factor(1, False, 3, p) == 2.5
    assert tk.jacobi_ladder_factor(1, True, 3, p) == 8.0
    assert tk.jacobi_ladder_factor(2, False, 3, p) == 5.0
    assert tk.jacobi_ladder_factor(6, True, 3, p) == 3.5


# --------------------------------------------- difficult parameter regimes


def test_eval_near_degenerate_parameter_sums_matches_scipy():
    # a + b near -1 stresses the recurrence constants; n + a + b + 1 near 0
    # forces the explicit fallback path
    rng = _rng(7)
    for a, b in [(-0.5, -0.5), (-0.9, -0.1), (-0.5, -0.51), (-0.999, 0.0)]:
        x = rng.uniform(-1.0, 1.0, 12)
        for n in (1, 2, 5, 13, 21):
            got = tk.jacobi_eval(n, tk.JacobiParams(a, b), x)
            ref = eval_jacobi(n, a, b, x)
            scale = max(1.0, np.max(np.abs(ref)))
            assert np.max(np.abs(got - ref)) < 1e-10 * scale


def test_eval_rejects_parameters_at_or_below_minus_one():
    with pytest.raises(ValueError):
        tk.jacobi_eval(3, tk.JacobiParams(-1.0, 0.0), 0.3)
    with pytest.raises(ValueError):
        tk.jacobi_eval(3, tk.JacobiParams(0.0, -1.5), 0.3)


def test_high_degree_stability():
    # relative error must stay near machine precision at n = 50
    p = tk.JacobiParams(0.5, -0.25)
    x = np.linspace(-0.99, 0.99, 21)
    got = tk.jacobi_eval(50, p, x)
    ref = eval_jacobi(50, 0.5, -0.25, x)
    assert np.max(np.abs(got - ref) / np.maximum(1.0, np.abs(ref))) < 1e-11
