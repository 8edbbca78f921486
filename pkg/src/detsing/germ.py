"""Matrix germs, maximal minors, cofactors and the ideals built from them.

Matrix and variable indices in this module are 1-based, matching the usual
``m_ks`` / ``x_gamma`` notation.  A germ is an ``n x (n+1)`` matrix whose
entries vanish at the origin.

Sign conventions:

* ``f_j`` is the determinant of ``M`` with column ``j`` removed, with no
  extra ``(-1)^j`` factor.
* ``cof^j(m_ks)`` is the signed minor of ``m_ks`` inside ``M^j``, where the
  checkerboard sign uses the *local* column position of ``s`` in ``M^j``.
* ``cof^j_ki(m_su)`` likewise uses local positions inside ``M^j`` with row
  ``k`` and column ``i`` deleted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from typing import Iterator, Sequence

from .polycore import Polynomial, format_polynomial, parse_polynomial


class GermError(ValueError):
    pass


@dataclass(frozen=True)
class PolyMatrix:
    """Immutable row-major matrix of polynomials sharing one variable count."""

    entries: tuple
    nvars: int

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        if not rows or not rows[0]:
            raise GermError("matrix must have at least one row and one column")
        width = len(rows[0])
        for r in rows:
            if len(r) != width:
                raise GermError("ragged matrix rows")
            for p in r:
                if p.nvars != self.nvars:
                    raise GermError("entries do not share one variable count")
        object.__setattr__(self, "entries", rows)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def shape(self) -> tuple:
        return (self.rows, self.cols)

    @classmethod
    def zeros(cls, rows: int, cols: int, nvars: int) -> "PolyMatrix":
        z = Polynomial.zero(nvars)
        return cls(tuple((z,) * cols for _ in range(rows)), nvars)

    @classmethod
    def identity(cls, size: int, nvars: int) -> "PolyMatrix":
        return cls.from_function(size, size, nvars, lambda i, j: Polynomial.one(nvars) if i == j else 0)

    @classmethod
    def from_function(cls, rows, cols, nvars, fn) -> "PolyMatrix":
        out = []
        for i in range(1, rows + 1):
            row = []
            for j in range(1, cols + 1):
                v = fn(i, j)
                if not isinstance(v, Polynomial):
                    v = Polynomial.constant(v, nvars)
                row.append(v)
            out.append(tuple(row))
        return cls(tuple(out), nvars)

    def __getitem__(self, ij) -> Polynomial:
        i, j = ij
        return self.entries[i - 1][j - 1]

    def cells(self) -> Iterator:
        for i, row in enumerate(self.entries, 1):
            for j, p in enumerate(row, 1):
                yield i, j, p

    def column(self, j: int) -> tuple:
        return tuple(row[j - 1] for row in self.entries)

    def row(self, i: int) -> tuple:
        return self.entries[i - 1]

    def map(self, fn) -> "PolyMatrix":
        return PolyMatrix(tuple(tuple(fn(p) for p in row) for row in self.entries), self.nvars)

    def _check_shape(self, other: "PolyMatrix"):
        if self.shape != other.shape:
            raise GermError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check_shape(other)
        return PolyMatrix(
            tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)),
            self.nvars,
        )

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check_shape(other)
        return PolyMatrix(
            tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)),
            self.nvars,
        )

    def __neg__(self):
        return self.map(lambda p: -p)

    def scale(self, c) -> "PolyMatrix":
        """Multiply every entry by a polynomial or rational scalar."""
        return self.map(lambda p: p * c)

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise GermError(f"cannot multiply {self.shape} by {other.shape}")
        nv = self.nvars
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = Polynomial.zero(nv)
                for t in range(self.cols):
                    a = self.entries[i][t]
                    b = other.entries[t][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(tuple(row))
        return PolyMatrix(tuple(out), nv)

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(tuple(zip(*self.entries)), self.nvars)

    def derivative(self, var_index: int) -> "PolyMatrix":
        """Entrywise partial derivative; ``var_index`` is 0-based like Polynomial.derivative."""
        return self.map(lambda p: p.derivative(var_index))

    def truncate(self, d: int) -> "PolyMatrix":
        return self.map(lambda p: p.truncate(d))

    def is_zero(self) -> bool:
        return all(p.is_zero() for row in self.entries for p in row)

    def to_strings(self, varnames: Sequence[str]) -> list:
        return [[format_polynomial(p, varnames) for p in row] for row in self.entries]


def unit_matrix(n: int, p: int, k: int, l: int, nvars: int) -> PolyMatrix:
    """``E_kl``: the ``n x p`` matrix with a single 1 at position (k, l)."""
    if not (1 <= k <= n and 1 <= l <= p):
        raise GermError(f"unit position ({k},{l}) outside a {n}x{p} matrix")
    return PolyMatrix.from_function(n, p, nvars, lambda i, j: 1 if (i, j) == (k, l) else 0)


def determinant(rows: Sequence[Sequence[Polynomial]], nvars: int) -> Polynomial:
    """Leibniz-formula determinant; the empty matrix has determinant 1."""
    size = len(rows)
    if size == 0:
        return Polynomial.one(nvars)
    if size == 1:
        return rows[0][0]
    if size == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    # cofactor expansion along the first row
    total = Polynomial.zero(nvars)
    for c in range(size):
        a = rows[0][c]
        if not a:
            continue
        sub = [r[:c] + r[c + 1:] for r in rows[1:]]
        term = a * determinant(sub, nvars)
        total = total + term if c % 2 == 0 else total - term
    return total


def _permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = list(perm)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def leibniz_determinant(rows: Sequence[Sequence[Polynomial]], nvars: int) -> Polynomial:
    """Sum over permutations; an independent oracle for :func:`determinant`."""
    size = len(rows)
    total = Polynomial.zero(nvars)
    for perm in permutations(range(size)):
        term = Polynomial.constant(_permutation_sign(perm), nvars)
        for i, j in enumerate(perm):
            term = term * rows[i][j]
        total = total + term
    return total


@lru_cache(maxsize=65536)
def _submatrix_det(matrix: PolyMatrix, drop_rows: frozenset, drop_cols: frozenset) -> Polynomial:
    rows = [
        [matrix.entries[i][j] for j in range(matrix.cols) if j + 1 not in drop_cols]
        for i in range(matrix.rows)
        if i + 1 not in drop_rows
    ]
    return determinant(rows, matrix.nvars)


def _local_position(index: int, removed: Sequence[int]) -> int:
    """1-based position of ``index`` after deleting the ``removed`` indices."""
    return index - sum(1 for r in removed if r < index)


@dataclass(frozen=True)
class GermPresentation:
    """An ``n x (n+1)`` matrix with entries in the maximal ideal, plus variable names."""

    matrix: PolyMatrix
    varnames: tuple

    def __post_init__(self):
        names = tuple(self.varnames)
        object.__setattr__(self, "varnames", names)
        m = self.matrix
        if len(set(names)) != len(names):
            raise GermError("duplicate variable names")
        if m.nvars != len(names):
            raise GermError(f"matrix uses {m.nvars} variables but {len(names)} names were given")
        if m.cols != m.rows + 1:
            raise GermError(f"expected an n x (n+1) matrix, got {m.rows}x{m.cols}")
        for i, j, p in m.cells():
            if p.constant_term() != 0:
                raise GermError(f"entry ({i},{j}) has a nonzero constant term")

    @classmethod
    def from_strings(cls, rows: Sequence[Sequence[str]], varnames: Sequence[str]) -> "GermPresentation":
        names = tuple(varnames)
        entries = tuple(tuple(parse_polynomial(s, names) for s in row) for row in rows)
        return cls(PolyMatrix(entries, len(names)), names)

    @property
    def n(self) -> int:
        return self.matrix.rows

    @property
    def p(self) -> int:
        return self.matrix.cols

    @property
    def r(self) -> int:
        return len(self.varnames)

    def entry(self, k: int, s: int) -> Polynomial:
        return self.matrix[k, s]

    def to_strings(self) -> list:
        return self.matrix.to_strings(self.varnames)


@dataclass(frozen=True)
class MinorVector:
    minors: tuple

    def __getitem__(self, j: int) -> Polynomial:
        """``f_j`` (1-based: the minor with column ``j`` removed)."""
        return self.minors[j - 1]

    def __len__(self):
        return len(self.minors)

    def __iter__(self):
        return iter(self.minors)


@dataclass(frozen=True)
class DeltaMinor:
    q: int
    s: int
    gamma: int
    nu: int
    value: Polynomial


@dataclass(frozen=True)
class IdealGenerators:
    label: str
    generators: tuple
    nvars: int = 0
    origins: tuple = field(default=(), compare=False)

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)


def _check_column(g: GermPresentation, j: int, what: str = "column"):
    if not 1 <= j <= g.p:
        raise GermError(f"{what} index {j} outside 1..{g.p}")


def _check_row(g: GermPresentation, k: int):
    if not 1 <= k <= g.n:
        raise GermError(f"row index {k} outside 1..{g.n}")


def maximal_minors(g: GermPresentation) -> MinorVector:
    return MinorVector(
        tuple(_submatrix_det(g.matrix, frozenset(), frozenset({j})) for j in range(1, g.p + 1))
    )


def cofactor(g: GermPresentation, j: int, k: int, s: int) -> Polynomial:
    """``cof^j(m_ks)``: cofactor of ``m_ks`` inside ``M^j``."""
    _check_column(g, j)
    _check_column(g, s)
    _check_row(g, k)
    if s == j:
        raise GermError(f"entry m_{k}{s} is not present in M^{j}")
    sign = (k + _local_position(s, (j,))) % 2
    det = _submatrix_det(g.matrix, frozenset({k}), frozenset({j, s}))
    return -det if sign else det


def nested_cofactor(g: GermPresentation, j: int, k: int, i: int, s: int, u: int) -> Polynomial:
    """``cof^j_ki(m_su)``: cofactor of ``m_su`` inside ``M^j`` minus row ``k`` and column ``i``.

    Returns 1 when ``n = 1`` (the empty-matrix convention).
    """
    one = Polynomial.one(g.r)
    if g.n == 1:
        return one
    for c in (j, i, u):
        _check_column(g, c)
    for row in (k, s):
        _check_row(g, row)
    if i == j or u in (i, j) or s == k:
        raise GermError(f"invalid nested cofactor indices j={j} k={k} i={i} s={s} u={u}")
    local_row = _local_position(s, (k,))
    local_col = _local_position(u, (j, i))
    det = _submatrix_det(g.matrix, frozenset({k, s}), frozenset({j, i, u}))
    return -det if (local_row + local_col) % 2 else det


def jacobian(minors: MinorVector, g: GermPresentation) -> PolyMatrix:
    """``(n+1) x r`` matrix with entry ``(q, gamma) = d f_q / d x_gamma``."""
    return PolyMatrix(
        tuple(tuple(f.derivative(v) for v in range(g.r)) for f in minors.minors), g.r
    )


def delta_minor(minors: MinorVector, g: GermPresentation, q: int, s: int, gamma: int, nu: int) -> DeltaMinor:
    _check_column(g, q, "minor")
    _check_column(g, s, "minor")
    if q == s:
        raise GermError("delta minor needs q != s")
    if not (1 <= gamma <= g.r and 1 <= nu <= g.r) or gamma == nu:
        raise GermError(f"delta minor needs distinct variable indices in 1..{g.r}")
    fq, fs = minors[q], minors[s]
    value = fq.derivative(gamma - 1) * fs.derivative(nu - 1) - fq.derivative(nu - 1) * fs.derivative(gamma - 1)
    return DeltaMinor(q, s, gamma, nu, value)


def all_delta_minors(g: GermPresentation, minors: MinorVector | None = None) -> list:
    """Every ``Delta^{(q,s)}_{gamma nu}`` with ``q < s`` and ``gamma < nu``."""
    minors = minors or maximal_minors(g)
    return [
        delta_minor(minors, g, q, s, gamma, nu)
        for q, s in combinations(range(1, g.p + 1), 2)
        for gamma, nu in combinations(range(1, g.r + 1), 2)
    ]


def _dedup(polys_with_origin) -> tuple:
    seen = {}
    for poly, origin in polys_with_origin:
        if poly.is_zero() or poly in seen:
            continue
        seen[poly] = origin
    return tuple(seen), tuple(seen.values())


def ideal_minors(g: GermPresentation) -> IdealGenerators:
    minors = maximal_minors(g)
    gens, origins = _dedup((f, f"f{j}") for j, f in enumerate(minors, 1))
    return IdealGenerators("(f)", gens, g.r, origins)


def ideal_Jf(g: GermPresentation) -> IdealGenerators:
    gens, origins = _dedup(
        (d.value, f"Delta({d.q},{d.s};{d.gamma},{d.nu})") for d in all_delta_minors(g)
    )
    return IdealGenerators("J_f", gens, g.r, origins)


def ideal_IG(g: GermPresentation) -> IdealGenerators:
    """Generators of ``I_G(M) = J_f + (f_1, ..., f_{n+1})``, zero-free and deduplicated."""
    minors = maximal_minors(g)
    pairs = [(f, f"f{j}") for j, f in enumerate(minors, 1)]
    pairs += [
        (d.value, f"Delta({d.q},{d.s};{d.gamma},{d.nu})") for d in all_delta_minors(g, minors)
    ]
    gens, origins = _dedup(pairs)
    return IdealGenerators("I_G(M)", gens, g.r, origins)
