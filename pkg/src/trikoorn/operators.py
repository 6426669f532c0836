"""Sparse coefficient-space operators between triangle bases at d = 0.

Columns encode images: column j of an operator holds the expansion
coefficients, in the range basis, of the operator applied to basis element
j of the domain basis.  Entries are stored as duplicate-free triplets
sorted by (column, row) so each column is a contiguous, binary-searchable
range.  Explicit zeros are never stored.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .koornwinder import TriIndex, TriParams, basis_size, index_to_linear
from .ladders import DegenerateParameterError

__all__ = [
    "BasisTag",
    "CoeffVec",
    "SparseOp",
    "OP_BUILDERS",
    "apply_op",
    "compose",
    "to_dense",
    "build_diff_x",
    "build_diff_y",
    "build_diff_z",
    "build_weighted_diff_x",
    "build_weighted_diff_y",
    "build_weighted_diff_z",
    "build_conv_a",
    "build_conv_b",
    "build_conv_c",
    "build_mult_x",
    "build_mult_y",
    "build_mult_z",
    "build_mult_same_x",
    "build_mult_same_y",
    "build_mult_same_z",
    "build_eigen_k",
    "build_eigen_n",
    "save_matrix_market",
    "load_matrix_market",
]


@dataclass(frozen=True)
class BasisTag:
    """Identifies a basis: weight exponents, weighted flag, maximum degree.

    weighted = True means coefficients multiply x^a y^b z^c P_{n,k} rather
    than the bare polynomial; that form only arises at d = 0.
    """

    params: TriParams
    weighted: bool
    maxdeg: int

    def __post_init__(self):
        self.params.validate()
        if not isinstance(self.maxdeg, (int, np.integer)) or self.maxdeg < 0:
            raise ValueError(f"maxdeg must be a nonnegative integer, got {self.maxdeg!r}")
        if self.weighted and self.params.d != 0.0:
            raise ValueError(f"weighted bases require d = 0, got d = {self.params.d}")

    @property
    def size(self):
        return basis_size(self.maxdeg)


@dataclass(frozen=True)
class CoeffVec:
    """Coefficient vector over a tagged basis, in ascending linear index order."""

    basis: BasisTag
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.shape != (self.basis.size,):
            raise ValueError(
                f"coefficient vector must have length {self.basis.size}, got shape {vals.shape}"
            )


@dataclass(frozen=True)
class SparseOp:
    """Sparse operator with triplet storage sorted by (column, row)."""

    domain: BasisTag
    range: BasisTag
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    name: str = ""

    @classmethod
    def from_triplets(cls, domain, range, triplets, name=""):
        rows = np.array([t[0] for t in triplets], dtype=np.int64)
        cols = np.array([t[1] for t in triplets], dtype=np.int64)
        vals = np.array([t[2] for t in triplets], dtype=float)
        if rows.size:
            if rows.min() < 0 or rows.max() >= range.size:
                raise ValueError("row index out of range")
            if cols.min() < 0 or cols.max() >= domain.size:
                raise ValueError("column index out of range")
            order = np.lexsort((rows, cols))
            rows, cols, vals = rows[order], cols[order], vals[order]
            key = cols * (range.size + 1) + rows
            if np.any(np.diff(key) == 0):
                raise ValueError("duplicate (row, col) entry")
        return cls(domain, range, rows, cols, vals, name)

    @property
    def shape(self):
        return (self.range.size, self.domain.size)

    @property
    def nnz(self):
        return int(self.rows.size)

    def column_nnz(self):
        """Entry count of every column."""
        out = np.zeros(self.domain.size, dtype=np.int64)
        np.add.at(out, self.cols, 1)
        return out


def to_dense(op):
    A = np.zeros(op.shape)
    A[op.rows, op.cols] = op.vals
    return A


def apply_op(op, vec):
    """Apply an operator to a coefficient vector.

    The accumulation runs over columns in ascending linear index so the
    floating-point result is deterministic.
    """
    if vec.basis != op.domain:
        raise ValueError(f"vector basis {vec.basis} does not match operator domain {op.domain}")
    out = np.zeros(op.range.size)
    np.add.at(out, op.rows, op.vals * vec.values[op.cols])
    return CoeffVec(op.range, out)


def compose(f, g):
    """Composition f after g; f.domain must equal g.range.

    Triplets are accumulated exactly per (row, column) pair and re-sorted
    into the canonical (column, row) order.
    """
    if f.domain != g.range:
        raise ValueError("inner bases do not match: f.domain != g.range")
    acc = {}
    for r1, c1, v1 in zip(g.rows, g.cols, g.vals):
        lo = np.searchsorted(f.cols, r1, side="left")
        hi = np.searchsorted(f.cols, r1, side="right")
        for j in range(lo, hi):
            key = (int(f.rows[j]), int(c1))
            acc[key] = acc.get(key, 0.0) + float(f.vals[j]) * float(v1)
    trips = [(r, c, v) for (r, c), v in acc.items() if v != 0.0]
    name = f"{f.name}*{g.name}" if f.name and g.name else ""
    return SparseOp.from_triplets(g.domain, f.range, trips, name)


class _Accum:
    """Collects stencil entries for one operator, dropping invalid targets."""

    def __init__(self, domain, range_, name):
        self.domain = domain
        self.range = range_
        self.trips = []
        self.name = name

    def add(self, n_row, k_row, col, val):
        if k_row < 0 or n_row < 0 or k_row > n_row or n_row > self.range.maxdeg:
            return
        if val == 0.0:
            return
        self.trips.append((index_to_linear(TriIndex(n_row, k_row)), col, val))

    def done(self):
        return SparseOp.from_triplets(self.domain, self.range, self.trips, self.name)


def _check_build_args(N, params):
    if not isinstance(N, (int, np.integer)) or N < 0:
        raise ValueError(f"maximum degree must be a nonnegative integer, got {N!r}")
    params.validate()
    if params.d != 0.0:
        raise ValueError(f"coefficient-space operators require d = 0, got d = {params.d}")


def _den_k(k, b, c):
    den = 2 * k + b + c + 1
    if abs(den) < 1e-12:
        raise DegenerateParameterError(f"2k+b+c+1 vanishes at k={k} for b={b}, c={c}")
    return den


def _den_n(n, a, b, c):
    den = 2 * n + a + b + c + 2
    if abs(den) < 1e-12:
        raise DegenerateParameterError(f"2n+a+b+c+2 vanishes at n={n} for ({a}, {b}, {c})")
    return den


def _columns(N):
    for n in range(N + 1):
        for k in range(n + 1):
            yield n, k, n * (n + 1) // 2 + k


def build_diff_y(N, params):
    """d/dy as a map into the (a, b+1, c+1) basis, degrees N -> N-1."""
    _check_build_args(N, params)
    a, b, c = params.a, params.b, params.c
    dom = BasisTag(params, False, N)
    ran = BasisTag(TriParams(a, b + 1, c + 1, 0.0), False, max(N - 1, 0))
    acc = _Accum(dom, ran, "diff_y")
    for n, k, col in _columns(N):
        acc.add(n - 1, k - 1, col, k + b + c + 1)
    return acc.done()


def build_diff_x(N, params):
    """d/dx as a map into the (a+1, b, c+1) basis, degrees N -> N-1."""
    _check_build_args(N, params)
    a, b, c = params.a, params.b, params.c
    dom = BasisTag(params, False, N)
    ran = BasisTag(TriParams(a + 1, b, c + 1, 0.0), False, max(N - 1, 0))
    acc = _Accum(dom, ran, "diff_x")
    for n, k, col in _columns(N):
        den = _den_k(k, b, c)
        acc.add(n - 1, k, col, (n + k + a + b + c + 2) * (k + b + c + 1) / den)
        acc.add(n - 1, k - 1, col, (k + b) * (n + k + b + c + 1) / den)
    return acc.done()


def build_diff_z(N, params):
    """Third-direction derivative (uy - ux) into the (a+1, b+1, c) basis."""
    _check_build_args(N, params)
    a, b, c = params.a, params.b, params.c
    dom = BasisTag(params, False, N)
    ran = BasisTag(TriParams(a + 1, b + 1, c, 0.0), False, max(N - 1, 0))
    acc = _Accum(dom, ran, "diff_z")
    for n, k, col in _columns(N):
        den = _den_k(k, b, c)
        acc.add(n - 1, k, col, -(n + k + a + b + c + 2) * (k + b + c + 1) / den)
        acc.add(n - 1, k - 1, col, (k + c) * (n + k + b + c + 1) / den)
    return acc.done()


def build_weighted_diff_x(N, params):
    """d/dx on the weighted basis, into the weighted (a-1, b, c-1) basis.

    Requires a > 0 and c > 0 so the range exponents stay valid.
    """
    _check_build_args(N, params)
    a, b, c = params.a, params.b, params.c
    if a <= 0 or c <= 0:
        raise ValueError(f"weighted x-derivative requires a > 0 and c > 0, got ({a}, {c})")
    dom = BasisTag(params, True, N)
    ran = BasisTag(TriParams(a - 1, b, c - 1, 0.0), True, N + 1)
    acc = _Accum(dom, ran, "weighted_diff_x")
    for n, k, col in _columns(N):
        den = _den_k(k, b, c)
        acc.add(n + 1, k, col, -(k + c) * (n - k + 1) / den)
        acc.add(n + 1, k + 1, col, -(k + 1) * (n - k + a) / den)
    return acc.done()


def build_weighted_diff_y(N, params):
    """d/dy on the weighted basis, into the weighted (a, b-1, c-1) basis."""
    _check_build_args(N, params)
    a, b, c = params.a, params.b, params.c
    if b <= 0 or c <= 0:
        raise ValueError(f"weighted y-derivative requires b > 0 and c > 0, got ({b}, {c})")
    dom = BasisTag(params, True, N)
    ran = BasisTag(TriParams(a, b - 1, c - 1, 0.0), True, N + 1)
    acc = _Accum(dom, ran, "weighted_diff_y")
    for n, k, col in _columns(N):
        acc.add(n + 1, k + 1, col, -(k + 1.0))
    return acc.done()


def build_weighted_diff_z(N, params):
    """Third-direction derivative on the weighted basis, into weighted (a-1, b-1, c)."""
    _check_build_args(N, params)
    a, b, c = params.a, params.b, params.c
    if a <= 0 or b <= 0:
        raise ValueError(f"weighted z-derivative requires a > 0 and b > 0, got ({a}, {b})")
    dom = BasisTag(params, True, N)
    ran = BasisTag(TriParams(a - 1, b - 1, c, 0.0), True, N + 1)
    acc = _Accum(dom, ran, "weighted_diff_z")
    for n, k, col in _columns(N):
        den = _den_k(k, b, c)
        acc.add(n + 1, k, col, (k + b) * (n - k + 1) / den)
        acc.add(n + 1, k + 1, col, -(k + 1) * (n - k + a) / den)
    return acc.done()


def build_conv_a(N, params):
    """Identity map re-expanded in the (a+1, b, c) basis."""
    _check_build_args(N, params)
    a, b, c = params.a, params.b, params.c
    dom = BasisTag(params, False, N)
    ran = BasisTag(TriParams(a + 1, b, c, 0.0), False, N)
    acc = _Accum(dom, ran, "conv_a")
    for n, k, col in _columns(N):
        den = _den_n(n, a, b, c)
        acc.add(n, k, col, (n + k + a + b + c + 2) / den)
        acc.add(n - 1, k, col, (n + k + b + c + 1) / den)
    return acc.done()


def build_conv_b(N, params):
    """Identity map re-expanded in the (a, b+1, c) basis."""
    _check_build_args(N, params)
    a, b, c = params.a, params.b, params.c
    dom = BasisTag(params, False, N)
    ran = BasisTag(TriParams(a, b + 1, c, 0.0), False, N)
    acc = _Accum(dom, ran, "conv_b")
    for n, k, col in _columns(N):
        den = _den_n(n, a, b, c) * _den_k(k, b, c)
        acc.add(n, k, col, (n + k + a + b + c + 2) * (k + b + c + 1) / den)
        acc.add(n - 1, k, col, -(n - k + a) * (k + b + c + 1) / den)
        acc.add(n - 1, k - 1, col, (k + c) * (n + k + b + c + 1) / den)
        acc.add(n, k - 1, col, -(k + c) * (n - k + 1) / den)
    return acc.done()


def build_conv_c(N, params):
    """Identity map re-expanded in the (a, b, c+1) basis."""
    _check_build_args(N, params)
    a, b, c = params.a, params.b, params.c
    dom = BasisTag(params, False, N)
    ran = BasisTag(TriParams(a, b, c + 1, 0.0), False, N)
    acc = _Accum(dom, ran, "conv_c")
    for n, k, col in _columns(N):
        den = _den_n(n, a, b, c) * _den_k(k, b, c)
        acc.add(n, k, col, (n + k + a + b + c + 2) * (k + b + c + 1) / den)
        acc.add(n - 1, k, col, -(n - k + a) * (k + b + c + 1) / den)
        acc.add(n - 1, k - 1, col, -(k + b) * (n + k + b + c + 1) / den)
        acc.add(n, k - 1, col, (k + b) * (n - k + 1) / den)
    return acc.done()


def build_mult_x(N, params):
    """Multiplication by x into the (a-1, b, c) basis; requires a > 0."""
    _check_build_args(N, params)
    a, b, c = params.a, params.b, params.c
    if a <= 0:
        raise ValueError(f"x-multiplication requires a > 0, got {a}")
    dom = BasisTag(params, False, N)
    ran = BasisTag(TriParams(a - 1, b, c, 0.0), False, N + 1)
    acc = _Accum(dom, ran, "mult_x")
    for n, k, col in _columns(N):
        den = _den_n(n, a, b, c)
        acc.add(n, k, col, (n - k + a) / den)
        acc.add(n + 1, k, col, (n - k + 1) / den)
    return acc.done()


def build_mult_y(N, params):
    """Multiplication by y into the (a, b-1, c) basis; requires b > 0."""
    _check_build_args(N, params)
    a, b, c = params.a, params.b, params.c
    if b <= 0:
        raise ValueError(f"y-multiplication requires b > 0, got {b}")
    dom = BasisTag(params, False, N)
    ran = BasisTag(TriParams(a, b - 1, c, 0.0), False, N + 1)
    acc = _Accum(dom, ran, "mult_y")
    for n, k, col in _columns(N):
        den = _den_n(n, a, b, c) * _den_k(k, b, c)
        acc.add(n, k, col, (k + b) * (n + k + b + c + 1) / den)
        acc.add(n, k + 1, col, -(k + 1) * (n - k + a) / den)
        acc.add(n + 1, k, col, -(k + b) * (n - k + 1) / den)
        acc.add(n + 1, k + 1, col, (k + 1) * (n + k + a + b + c + 2) / den)
    return acc.done()


def build_mult_z(N, params):
    """Multiplication by z into the (a, b, c-1) basis; requires c > 0."""
    _check_build_args(N, params)
    a, b, c = params.a, params.b, params.c
    if c <= 0:
        raise ValueError(f"z-multiplication requires c > 0, got {c}")
    dom = BasisTag(params, False, N)
    ran = BasisTag(TriParams(a, b, c - 1, 0.0), False, N + 1)
    acc = _Accum(dom, ran, "mult_z")
    for n, k, col in _columns(N):
        den = _den_n(n, a, b, c) * _den_k(k, b, c)
        acc.add(n, k, col, (k + c) * (n + k + b + c + 1) / den)
        acc.add(n, k + 1, col, (k + 1) * (n - k + a) / den)
        acc.add(n + 1, k, col, -(k + c) * (n - k + 1) / den)
        acc.add(n + 1, k + 1, col, -(k + 1) * (n + k + a + b + c + 2) / den)
    return acc.done()


def build_mult_same_x(N, params):
    """Multiplication by x staying in the same basis (via conversion back).

    Composes the conversion from (a-1, b, c) with x-multiplication; at most
    3 entries per column.
    """
    _check_build_args(N, params)
    mult = build_mult_x(N, params)
    conv = build_conv_a(N + 1, TriParams(params.a - 1, params.b, params.c, 0.0))
    out = compose(conv, mult)
    return SparseOp(out.domain, out.range, out.rows, out.cols, out.vals, "mult_same_x")


def build_mult_same_y(N, params):
    """Multiplication by y staying in the same basis; at most 9 entries per column.

    The composed stencil fills the full 3 x 3 index block
    {n-1, n, n+1} x {k-1, k, k+1}.
    """
    _check_build_args(N, params)
    mult = build_mult_y(N, params)
    conv = build_conv_b(N + 1, TriParams(params.a, params.b - 1, params.c, 0.0))
    out = compose(conv, mult)
    return SparseOp(out.domain, out.range, out.rows, out.cols, out.vals, "mult_same_y")


def build_mult_same_z(N, params):
    """Multiplication by z staying in the same basis; at most 9 entries per column."""
    _check_build_args(N, params)
    mult = build_mult_z(N, params)
    conv = build_conv_c(N + 1, TriParams(params.a, params.b, params.c - 1, 0.0))
    out = compose(conv, mult)
    return SparseOp(out.domain, out.range, out.rows, out.cols, out.vals, "mult_same_z")


def build_eigen_k(N, params):
    """Diagonal operator with entries -k(k+b+c+1) (the k-degree eigenvalues)."""
    _check_build_args(N, params)
    b, c = params.b, params.c
    dom = BasisTag(params, False, N)
    acc = _Accum(dom, dom, "eigen_k")
    for n, k, col in _columns(N):
        acc.add(n, k, col, -k * (k + b + c + 1))
    return acc.done()


def build_eigen_n(N, params):
    """Diagonal operator with entries -n(n+a+b+c+2) (the n-degree eigenvalues)."""
    _check_build_args(N, params)
    a, b, c = params.a, params.b, params.c
    dom = BasisTag(params, False, N)
    acc = _Accum(dom, dom, "eigen_n")
    for n, k, col in _columns(N):
        acc.add(n, k, col, -n * (n + a + b + c + 2))
    return acc.done()


OP_BUILDERS = {
    "diff_x": build_diff_x,
    "diff_y": build_diff_y,
    "diff_z": build_diff_z,
    "weighted_diff_x": build_weighted_diff_x,
    "weighted_diff_y": build_weighted_diff_y,
    "weighted_diff_z": build_weighted_diff_z,
    "conv_a": build_conv_a,
    "conv_b": build_conv_b,
    "conv_c": build_conv_c,
    "mult_x": build_mult_x,
    "mult_y": build_mult_y,
    "mult_z": build_mult_z,
    "mult_same_x": build_mult_same_x,
    "mult_same_y": build_mult_same_y,
    "mult_same_z": build_mult_same_z,
    "eigen_k": build_eigen_k,
    "eigen_n": build_eigen_n,
}


def _tag_lines(prefix, tag):
    p = tag.params
    return [
        f"{prefix}.a={p.a!r}",
        f"{prefix}.b={p.b!r}",
        f"{prefix}.c={p.c!r}",
        f"{prefix}.d={p.d!r}",
        f"{prefix}.weighted={'true' if tag.weighted else 'false'}",
        f"{prefix}.maxdeg={tag.maxdeg}",
    ]


def matrix_market_text(op):
    """Matrix Market coordinate text for the operator (1-based indices)."""
    lines = ["%%MatrixMarket matrix coordinate real general"]
    lines.append(f"{op.shape[0]} {op.shape[1]} {op.nnz}")
    for r, c, v in zip(op.rows, op.cols, op.vals):
        lines.append(f"{r + 1} {c + 1} {v:.17g}")
    return "\n".join(lines) + "\n"


def descriptor_text(op):
    """Sidecar descriptor text: builder name and both basis tags as key=value lines."""
    desc = [f"name={op.name}"]
    desc += _tag_lines("domain", op.domain)
    desc += _tag_lines("range", op.range)
    return "\n".join(desc) + "\n"


def save_matrix_market(op, path):
    """Write the operator in Matrix Market coordinate form plus a descriptor.

    The matrix goes to `path` (1-based indices); the basis tags and builder
    name go to `path + '.desc'` as key=value lines.
    """
    path = str(path)
    with open(path, "w") as fh:
        fh.write(matrix_market_text(op))
    with open(path + ".desc", "w") as fh:
        fh.write(descriptor_text(op))


def _parse_tag(kv, prefix):
    params = TriParams(
        float(kv[f"{prefix}.a"]),
        float(kv[f"{prefix}.b"]),
        float(kv[f"{prefix}.c"]),
        float(kv[f"{prefix}.d"]),
    )
    return BasisTag(params, kv[f"{prefix}.weighted"] == "true", int(kv[f"{prefix}.maxdeg"]))


def load_matrix_market(path):
    """Read an operator written by save_matrix_market (matrix plus descriptor)."""
    path = str(path)
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "%%MatrixMarket matrix coordinate real general":
            raise ValueError(f"unsupported matrix header: {header!r}")
        sizes = fh.readline().split()
        nr, nc, nnz = int(sizes[0]), int(sizes[1]), int(sizes[2])
        trips = []
        for _ in range(nnz):
            parts = fh.readline().split()
            trips.append((int(parts[0]) - 1, int(parts[1]) - 1, float(parts[2])))
    kv = {}
    with open(path + ".desc") as fh:
        for line in fh:
            line = line.strip()
            if line:
                key, _, val = line.partition("=")
                kv[key] = val
    dom = _parse_tag(kv, "domain")
    ran = _parse_tag(kv, "range")
    if (ran.size, dom.size) != (nr, nc):
        raise ValueError("matrix dimensions do not match the descriptor basis sizes")
    return SparseOp.from_triplets(dom, ran, trips, kv.get("name", ""))
