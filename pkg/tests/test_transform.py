"""Tests for quadrature rules, transforms, norms, and CSV storage."""

import numpy as np
import pytest
from scipy.special import beta as beta_fn
from scipy.special import roots_jacobi

import trikoorn as tk


def _rng(tag):
    return np.random.default_rng([6173, tag])


def _interior(rng, m):
    pts = []
    while len(pts) < m:
        x, y = rng.uniform(0.05, 0.9, 2)
        if x + y <= 0.95:
            pts.append((x, y))
    return np.array(pts)


def _tri_moment(i, j, q):
    # exact integral of x^i y^j against the weight, by iterated Beta integrals
    return beta_fn(q.b + j + 1, q.c + 1) * beta_fn(q.a + i + 1, q.b + q.c + q.d + j + 2)


# --------------------------------------------------------- 1d segment rule


def test_segment_rule_frozen_two_point_values():
    pts, w = tk.gauss_jacobi_rule(2, 0.0, 0.0)
    r = 1.0 / (2.0 * np.sqrt(3.0))
    assert np.allclose(sorted(pts), [0.5 - r, 0.5 + r], atol=1e-15)
    assert np.allclose(w, [0.5, 0.5], atol=1e-15)


def test_segment_rule_weight_orientation():
    # first slot weights (1-t), second weights t
    pts, w = tk.gauss_jacobi_rule(4, 1.0, 0.0)
    assert abs(np.sum(w * pts) - 1.0 / 6.0) < 1e-14
    pts, w = tk.gauss_jacobi_rule(4, 0.0, 2.0)
    assert abs(np.sum(w) - 1.0 / 3.0) < 1e-14


def test_segment_rule_total_mass_is_beta_function():
    rng = _rng(1)
    for _ in range(12):
        a, b = rng.uniform(-0.9, 3.0, 2)
        pts, w = tk.gauss_jacobi_rule(5, a, b)
        assert abs(np.sum(w) - beta_fn(a + 1, b + 1)) < 1e-13


@pytest.mark.parametrize("m", [1, 2, 4, 7])
def test_segment_rule_polynomial_exactness(m):
    rng = _rng(10 + m)
    for _ in range(6):
        a, b = rng.uniform(-0.9, 2.5, 2)
        pts, w = tk.gauss_jacobi_rule(m, a, b)
        for p in range(2 * m):
            want = beta_fn(a + 1, b + p + 1)
            got = np.sum(w * pts**p)
            assert abs(got - want) < 1e-12 * max(1.0, want)


def test_segment_rule_matches_reference_roots():
    # map the reference interval rule to (0, 1)
    a, b = 1.5, 0.5
    m = 6
    pts, w = tk.gauss_jacobi_rule(m, a, b)
    xr, wr = roots_jacobi(m, a, b)
    order = np.argsort(xr)
    assert np.allclose(pts, (xr[order] + 1.0) / 2.0, atol=1e-12)
    assert np.allclose(w, wr[order] * 2.0 ** (-a - b - 1.0), atol=1e-13)


def test_segment_rule_rejects_bad_arguments():
    with pytest.raises(ValueError):
        tk.gauss_jacobi_rule(0, 0.0, 0.0)
    with pytest.raises(ValueError):
        tk.gauss_jacobi_rule(3, -1.0, 0.0)


# ------------------------------------------------------------ triangle rule


def test_triangle_rule_one_point_is_weighted_centroid():
    r = tk.duffy_rule(1, tk.TriParams(0, 0, 0, 0))
    assert np.allclose(r.points, [[1.0 / 3.0, 1.0 / 3.0]], atol=1e-15)
    assert np.allclose(r.weights, [0.5], atol=1e-15)


def test_triangle_rule_points_inside_weights_positive():
    rng = _rng(2)
    for _ in range(8):
        q = tk.TriParams(*rng.uniform(-0.5, 2.0, 4))
        r = tk.duffy_rule(4, q)
        x, y = r.points[:, 0], r.points[:, 1]
        assert np.all((x > 0) & (y > 0) & (x + y < 1))
        assert np.all(r.weights > 0)
        assert r.points.shape == (16, 2)


def test_triangle_rule_moments_match_beta_integrals():
    rng = _rng(3)
    for _ in range(10):
        q = tk.TriParams(*rng.uniform(-0.5, 2.0, 4))
        m = 5
        r = tk.duffy_rule(m, q)
        x, y = r.points[:, 0], r.points[:, 1]
        # strength 2m-1 in total degree
        for i, j in [(0, 0), (1, 0), (0, 1), (3, 2), (4, 4), (9, 0), (0, 9)]:
            want = _tri_moment(i, j, q)
            got = np.sum(r.weights * x**i * y**j)
            assert abs(got - want) < 1e-12 * max(1.0, want)


def test_triangle_rule_absorbs_full_weight():
    # the weights integrate the plain monomial times the weight function;
    # a second multiplication by the weight is never needed
    q = tk.TriParams(1.0, 2.0, 0.5, 0.25)
    r = tk.duffy_rule(3, q)
    assert abs(np.sum(r.weights) - _tri_moment(0, 0, q)) < 1e-13


def test_triangle_rule_rejects_nonintegrable_weight():
    # b + c + d + 2 <= 0 makes the collapsed-direction weight non-integrable
    with pytest.raises(ValueError):
        tk.duffy_rule(3, tk.TriParams(0.0, -0.9, -0.9, -0.5))


# ---------------------------------------------------------------- analysis


def test_round_trip_on_coefficient_space():
    rng = _rng(4)
    N = 8
    for pset in [(0.0, 0.0, 0.0, 0.0), (0.5, 1.5, 2.5, 0.0), (1.0, 0.0, 2.0, 0.5)]:
        q = tk.TriParams(*pset)
        basis = tk.BasisTag(q, False, N)
        v = tk.CoeffVec(basis, rng.standard_normal(tk.basis_size(N)))
        rule = tk.duffy_rule(N + 1, q)
        vals = tk.synthesize(v, rule.points)
        back = tk.analyze(vals, N, q)
        assert np.max(np.abs(back.values - v.values)) < 1e-11 * max(
            1.0, np.max(np.abs(v.values))
        )


def test_analyze_accepts_callables():
    q = tk.TriParams(0, 0, 0, 0)
    got = tk.analyze(lambda x, y: np.ones_like(x), 3, q)
    want = np.zeros(tk.basis_size(3))
    want[0] = 1.0
    assert np.max(np.abs(got.values - want)) < 1e-13


def test_analyze_resolves_exact_degree():
    # the quadratic mode is reproduced exactly at truncation 2 and leaves a
    # nonzero tail at truncation 1
    q = tk.TriParams(0, 0, 0, 0)

    def f(x, y):
        return 5 * x**2 + 10 * x * y - 6 * x - 2 * y + 1

    c2 = tk.analyze(f, 2, q)
    want = np.zeros(tk.basis_size(2))
    want[tk.index_to_linear(tk.TriIndex(2, 1))] = 1.0
    assert np.max(np.abs(c2.values - want)) < 1e-12
    c1 = tk.analyze(f, 1, q)
    rng = _rng(5)
    pts = _interior(rng, 12)
    resid = tk.synthesize(c1, pts) - f(pts[:, 0], pts[:, 1])
    assert np.max(np.abs(resid)) > 1e-3


def test_analyze_matches_multiplication_column():
    # f(x,y) = x analyzed in the lowered basis equals the first column of
    # the x-multiplication operator out of the raised basis
    q = tk.TriParams(1.0, 0.0, 0.0, 0.0)
    op = tk.build_mult_x(2, q)
    col = tk.to_dense(op)[:, 0]
    got = tk.analyze(lambda x, y: x, 3, tk.TriParams(0.0, 0.0, 0.0, 0.0))
    assert got.values.shape == col.shape
    assert np.max(np.abs(got.values - col)) < 1e-12


def test_weighted_synthesis_multiplies_by_weight():
    rng = _rng(6)
    q = tk.TriParams(0.5, 1.5, 1.0, 0.0)
    N = 4
    vals = rng.standard_normal(tk.basis_size(N))
    plain = tk.CoeffVec(tk.BasisTag(q, False, N), vals)
    weighted = tk.CoeffVec(tk.BasisTag(q, True, N), vals)
    pts = _interior(rng, 10)
    wfun = tk.weight_eval(q, tk.TriPoint(pts[:, 0], pts[:, 1]))
    assert np.allclose(
        tk.synthesize(weighted, pts), wfun * tk.synthesize(plain, pts), atol=1e-13
    )


# ------------------------------------------------------- norms and the Gram


def test_norm_frozen_values():
    q0 = tk.TriParams(0, 0, 0, 0)
    assert abs(tk.norm_sq(tk.TriIndex(0, 0), q0) - 0.5) < 1e-14
    assert abs(tk.norm_sq(tk.TriIndex(2, 1), q0) - 1.0 / 18.0) < 1e-14


def test_gram_is_diagonal_with_norms():
    rng = _rng(7)
    N, m = 5, 7
    for pset in [(0.0, 0.0, 0.0, 0.0), (0.5, 1.5, 2.5, 0.0), (1.0, 1.0, 1.0, 0.5)]:
        q = tk.TriParams(*pset)
        G = tk.gram_matrix(N, q, m)
        diag = np.diag(G)
        off = G - np.diag(diag)
        assert np.max(np.abs(off)) < 1e-10 * np.max(diag)
        for lin in range(tk.basis_size(N)):
            idx = tk.linear_to_index(lin)
            assert abs(diag[lin] - tk.norm_sq(idx, q)) < 1e-11 * max(1.0, diag[lin])


def test_gram_rejects_insufficient_rule():
    with pytest.raises(ValueError):
        tk.gram_matrix(5, tk.TriParams(0, 0, 0, 0), 5)


# -------------------------------------------------------------------- files


def test_coeff_csv_round_trip(tmp_path):
    rng = _rng(8)
    basis = tk.BasisTag(tk.TriParams(0.5, 0.0, 1.0, 0.0), False, 3)
    v = tk.CoeffVec(basis, rng.standard_normal(tk.basis_size(3)))
    path = tmp_path / "c.csv"
    tk.save_coeffs_csv(v, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "n,k,value"
    assert lines[1].startswith("0,0,")
    back = tk.load_coeffs_csv(path, basis)
    assert np.array_equal(back.values, v.values)


def test_coeff_csv_rejects_malformed_input(tmp_path):
    basis = tk.BasisTag(tk.TriParams(0, 0, 0, 0), False, 2)
    bad_header = tmp_path / "h.csv"
    bad_header.write_text("a,b,c\n0,0,1.0\n")
    with pytest.raises(ValueError):
        tk.load_coeffs_csv(bad_header, basis)
    out_of_range = tmp_path / "r.csv"
    out_of_range.write_text("n,k,value\n" + "3,0,1.0\n" * 6)
    with pytest.raises(ValueError):
        tk.load_coeffs_csv(out_of_range, basis)
    short = tmp_path / "s.csv"
    short.write_text("n,k,value\n0,0,1.0\n")
    with pytest.raises(ValueError):
        tk.load_coeffs_csv(short, basis)


def test_values_csv_round_trip(tmp_path):
    rng = _rng(9)
    pts = _interior(rng, 7)
    vals = rng.standard_normal(7)
    path = tmp_path / "v.csv"
    tk.save_values_csv(pts, vals, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y,value"
    back_pts, back_vals = tk.load_values_csv(path)
    assert np.array_equal(back_pts, pts)
    assert np.array_equal(back_vals, vals)
