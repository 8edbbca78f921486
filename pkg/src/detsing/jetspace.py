"""Exact linear algebra in truncated matrix spaces ``Mat_{n,p} (x) O_r / M^{d+1}``.

Coordinates are indexed by (monomial of total degree <= d, matrix position).
Subspaces are kept in incremental row-echelon form: every stored row has its
smallest column as pivot, normalized to 1, so a vector is in the span iff
repeated elimination of its leading column empties it.

Two coefficient fields are available: exact rationals (``"qq"``) and a
single 61-bit prime field (``"fp"``) used only as a fast pre-screen.  Asking
for ``"both"`` builds the two in lockstep, compares ranks and keeps the
rational result.

Bulk spans are echelonized by FLINT (fraction-free integer RREF over Q,
word-size modular RREF over F_p).  The incremental pure-Python engine is
used when coordinates must be tracked, when explicitly requested, or when
FLINT is unavailable.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from math import comb, lcm
from typing import Iterable, Sequence

from gmpy2 import mpq

try:
    import flint
except ImportError:  # pragma: no cover - exercised only without python-flint
    flint = None

from .germ import PolyMatrix
from .polycore import Monomial, Polynomial, format_polynomial, monomials_of_degree, monomials_up_to

log = logging.getLogger(__name__)

PRIME = (1 << 61) - 1
MAX_BASIS = 250_000
FIELDS = ("qq", "fp", "both")
ENGINES = ("auto", "flint", "python")


class ResourceLimit(RuntimeError):
    """The requested truncated space is larger than the configured budget."""


class UnluckyPrime(ArithmeticError):
    """A denominator vanishes modulo the pre-screen prime."""


@dataclass
class PrescreenLog:
    """Running record of rank comparisons between the prime field and the rationals."""

    comparisons: int = 0
    disagreements: list = field(default_factory=list)
    escalations: int = 0

    def record(self, label: str, rank_fp, rank_qq: int):
        self.comparisons += 1
        if rank_fp is None:
            self.escalations += 1
            log.warning("prime-field pre-screen skipped for %s (unlucky prime); rational result used", label)
        elif rank_fp != rank_qq:
            self.disagreements.append((label, rank_fp, rank_qq))
            self.escalations += 1
            log.warning("rank disagreement for %s: F_p %d vs Q %d; rational result used", label, rank_fp, rank_qq)

    def reset(self):
        self.comparisons = 0
        self.disagreements = []
        self.escalations = 0


PRESCREEN = PrescreenLog()


class JetIndex:
    """Deterministic enumeration of the truncated matrix space basis.

    Monomials run by increasing total degree (decreasing lex inside a degree);
    matrix positions run row-major inside each monomial block.
    """

    def __init__(self, nvars: int, rows: int, cols: int, degree: int):
        if degree < 0:
            raise ValueError("truncation degree must be non-negative")
        self.nvars = nvars
        self.rows = rows
        self.cols = cols
        self.degree = degree
        size = comb(nvars + degree, nvars) * rows * cols
        if size > MAX_BASIS:
            raise ResourceLimit(f"basis of size {size} exceeds the limit {MAX_BASIS} (degree {degree})")
        self.monomials = tuple(monomials_up_to(nvars, degree))
        self._position = {m: i for i, m in enumerate(self.monomials)}
        self.block = rows * cols

    @property
    def size(self) -> int:
        return len(self.monomials) * self.block

    def column(self, mono: Monomial, i: int, j: int) -> int:
        """Column of ``x^mono E_ij`` (``i``, ``j`` 1-based)."""
        return self._position[mono] * self.block + (i - 1) * self.cols + (j - 1)

    def describe(self, col: int) -> tuple:
        mono = self.monomials[col // self.block]
        rest = col % self.block
        return mono, rest // self.cols + 1, rest % self.cols + 1

    def vector(self, matrix: PolyMatrix) -> dict:
        """Sparse coordinates of ``matrix`` truncated at the index degree."""
        if (matrix.rows, matrix.cols) != (self.rows, self.cols) or matrix.nvars != self.nvars:
            raise ValueError(
                f"matrix of shape {matrix.shape} in {matrix.nvars} variables does not fit "
                f"a {self.rows}x{self.cols} index in {self.nvars} variables"
            )
        out = {}
        d = self.degree
        for i, j, p in matrix.cells():
            for mono, c in p.items():
                if sum(mono) <= d:
                    out[self.column(mono, i, j)] = c
        return out


def _to_fp(value) -> int:
    q = mpq(value)
    den = int(q.denominator) % PRIME
    if den == 0:
        raise UnluckyPrime(str(q))
    return int(q.numerator) * pow(den, -1, PRIME) % PRIME


@dataclass
class Membership:
    member: bool
    coordinates: dict
    leading_column: int | None = None


class JetSubspace:
    """Row-echelon basis of a subspace of a :class:`JetIndex`.

    With ``track=True`` every echelon row remembers its expression in terms of
    the inserted vectors, so membership coordinates refer to those vectors.
    """

    def __init__(self, index: JetIndex, modulus: int | None = None, track: bool = False):
        self.index = index
        self.modulus = modulus
        self.track = track
        self.pivots: dict = {}
        self.origins: dict = {}
        self.labels: list = []

    @property
    def field(self) -> str:
        return "fp" if self.modulus else "qq"

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def _convert(self, vec: dict) -> dict:
        if self.modulus:
            out = {}
            for c, v in vec.items():
                x = _to_fp(v)
                if x:
                    out[c] = x
            return out
        return {c: mpq(v) for c, v in vec.items() if v}

    def _reduce(self, v: dict, origin: dict | None):
        """Eliminate pivots from ``v`` in place; return the first non-pivot leading column."""
        p = self.modulus
        pivots = self.pivots
        heap = list(v)
        heapq.heapify(heap)
        coords = {}
        while heap:
            c = heapq.heappop(heap)
            a = v.get(c)
            if not a:
                continue
            row = pivots.get(c)
            if row is None:
                return c, coords
            coords[c] = a
            for col, val in row.items():
                old = v.get(col)
                if old is None:
                    nv = -a * val
                    heapq.heappush(heap, col)
                else:
                    nv = old - a * val
                if p:
                    nv %= p
                if nv:
                    v[col] = nv
                else:
                    v.pop(col, None)
            if origin is not None:
                for lab, val in self.origins[c].items():
                    nv = origin.get(lab, 0) - a * val
                    if p:
                        nv %= p
                    if nv:
                        origin[lab] = nv
                    else:
                        origin.pop(lab, None)
        return None, coords

    def add(self, vec: dict, label=None) -> bool:
        """Insert a vector; returns True when the rank grows."""
        v = self._convert(vec)
        origin = None
        if self.track:
            self.labels.append(label)
            origin = {len(self.labels) - 1: 1}
        lead, _ = self._reduce(v, origin)
        if lead is None:
            return False
        a = v[lead]
        if self.modulus:
            inv = pow(a, -1, self.modulus)
            row = {c: x * inv % self.modulus for c, x in v.items()}
            if origin is not None:
                origin = {k: x * inv % self.modulus for k, x in origin.items()}
        else:
            row = {c: x / a for c, x in v.items()}
            if origin is not None:
                origin = {k: x / a for k, x in origin.items()}
        self.pivots[lead] = row
        if origin is not None:
            self.origins[lead] = origin
        return True

    def membership(self, vec: dict) -> Membership:
        v = self._convert(vec)
        lead, coords = self._reduce(v, None)
        if lead is not None:
            return Membership(False, {}, lead)
        if not self.track:
            return Membership(True, coords)
        combo: dict = {}
        for piv, a in coords.items():
            for lab_idx, val in self.origins[piv].items():
                nv = combo.get(lab_idx, 0) + a * val
                if self.modulus:
                    nv %= self.modulus
                if nv:
                    combo[lab_idx] = nv
                else:
                    combo.pop(lab_idx, None)
        return Membership(True, {self.labels[i]: c for i, c in combo.items()})

    def contains_matrix(self, matrix: PolyMatrix) -> Membership:
        return self.membership(self.index.vector(matrix))

    def basis_vector(self, pivot: int) -> dict:
        return dict(self.pivots[pivot])


def _sparse_matrix(matrix: PolyMatrix) -> list:
    return [(mono, i, j, c) for i, j, p in matrix.cells() for mono, c in p.items()]


def _multiplier_vectors(index: JetIndex, gens: Sequence[PolyMatrix], min_degree: int):
    d = index.degree
    for gi, G in enumerate(gens):
        terms = _sparse_matrix(G)
        if not terms:
            continue
        low = min(sum(t[0]) for t in terms)
        for mono in monomials_up_to(index.nvars, d - low, low=min_degree) if d >= low else ():
            vec = {}
            for tm, i, j, c in terms:
                m = tuple(a + b for a, b in zip(tm, mono))
                if sum(m) <= d:
                    vec[index.column(m, i, j)] = c
            if vec:
                yield (gi, mono), vec


def _insert_all(space: JetSubspace, items: list):
    for label, vec in items:
        space.add(vec, label)


def _flint_space(index: JetIndex, items: list, modulus: int | None) -> JetSubspace:
    """Echelon basis from FLINT's reduced row echelon form of the stacked vectors."""
    space = JetSubspace(index, modulus)
    m, n = len(items), index.size
    if m == 0:
        return space
    if modulus:
        A = flint.nmod_mat(m, n, modulus)
        for i, (_, vec) in enumerate(items):
            for c, v in vec.items():
                A[i, c] = _to_fp(v)
        R, rank = A.rref()
        entries = [int(x) for x in R.entries()[: rank * n]]
        for i in range(rank):
            row = {c: v for c, v in enumerate(entries[i * n : (i + 1) * n]) if v}
            space.pivots[min(row)] = row
        return space
    A = flint.fmpz_mat(m, n)
    for i, (_, vec) in enumerate(items):
        # clearing denominators row by row leaves the span unchanged
        scale = lcm(*(int(mpq(v).denominator) for v in vec.values()))
        for c, v in vec.items():
            A[i, c] = int(mpq(v) * scale)
    R, den, rank = A.rref()
    den = int(den)
    flat = R.entries()[: rank * n]
    for i in range(rank):
        row = {c: mpq(int(v), den) for c, v in enumerate(flat[i * n : (i + 1) * n]) if v}
        space.pivots[min(row)] = row
    return space


def _assemble(index: JetIndex, items: list, modulus: int | None, track: bool, engine: str) -> JetSubspace:
    if engine == "flint" and flint is None:
        raise RuntimeError("python-flint is not installed")
    if engine == "python" or track or flint is None:
        space = JetSubspace(index, modulus, track)
        _insert_all(space, items)
        return space
    return _flint_space(index, items, modulus)


def span_from_generators(
    gens: Sequence[PolyMatrix],
    degree: int,
    min_multiplier_degree: int = 0,
    *,
    field: str = "qq",
    track: bool = False,
    shape: tuple | None = None,
    nvars: int | None = None,
    label: str = "span",
    engine: str = "auto",
) -> JetSubspace:
    """Span of ``x^a G`` truncated at ``degree``, for every generator and ``|a| >= min_multiplier_degree``.

    ``min_multiplier_degree`` of 1 or 2 realizes the ``M``- and ``M^2``-multiples
    of the generated module.  ``shape``/``nvars`` are needed only when ``gens``
    is empty.
    """
    return span_from_families(
        [(gens, min_multiplier_degree)],
        degree,
        field=field,
        track=track,
        shape=shape,
        nvars=nvars,
        label=label,
        engine=engine,
    )


def span_from_families(
    families: Sequence[tuple],
    degree: int,
    *,
    field: str = "qq",
    track: bool = False,
    shape: tuple | None = None,
    nvars: int | None = None,
    label: str = "span",
    engine: str = "auto",
) -> JetSubspace:
    """Sum of spans, one per ``(generators, min_multiplier_degree)`` family.

    With several families the tracking labels are ``(family, generator, monomial)``.
    """
    if field not in FIELDS:
        raise ValueError(f"unknown field {field!r}; expected one of {FIELDS}")
    every = [G for gens, _ in families for G in gens]
    if every:
        shape = every[0].shape
        nvars = every[0].nvars
        for G in every:
            if G.shape != shape or G.nvars != nvars:
                raise ValueError("generators do not share one shape and variable count")
    elif shape is None or nvars is None:
        raise ValueError("shape and nvars are required for an empty generator list")
    index = JetIndex(nvars, shape[0], shape[1], degree)
    items = []
    for fi, (gens, low) in enumerate(families):
        for (gi, mono), vec in _multiplier_vectors(index, gens, low):
            items.append(((fi, gi, mono) if len(families) > 1 else (gi, mono), vec))
    # sparsest vector first for each leading column limits fill-in
    items.sort(key=lambda item: (min(item[1]), len(item[1])))
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; expected one of {ENGINES}")
    if field == "qq":
        return _assemble(index, items, None, track, engine)
    try:
        fp_space = _assemble(index, items, PRIME, track, engine)
    except UnluckyPrime:
        fp_space = None
    if field == "fp":
        if fp_space is None:
            qq = _assemble(index, items, None, track, engine)
            PRESCREEN.record(label, None, qq.rank)
            return qq
        return fp_space
    qq = _assemble(index, items, None, track, engine)
    PRESCREEN.record(label, None if fp_space is None else fp_space.rank, qq.rank)
    return qq


def membership(target: PolyMatrix, space: JetSubspace) -> Membership:
    return space.contains_matrix(target)


def quotient_dimension(degree: int, space: JetSubspace) -> int:
    if degree != space.index.degree:
        raise ValueError(f"subspace was built at degree {space.index.degree}, not {degree}")
    return space.index.size - space.rank


def first_missing_power_element(space: JetSubspace, k: int):
    """First ``x^a E_ij`` with ``|a| = k`` outside ``space``, or None if all lie inside."""
    idx = space.index
    if k > idx.degree:
        raise ValueError(f"power {k} exceeds truncation degree {idx.degree}")
    for mono in monomials_of_degree(idx.nvars, k):
        for i in range(1, idx.rows + 1):
            for j in range(1, idx.cols + 1):
                if not space.membership({idx.column(mono, i, j): 1}).member:
                    return mono, i, j
    return None


def monomial_text(mono: Monomial, varnames: Sequence[str]) -> str:
    return format_polynomial(Polynomial.monomial(mono), varnames)


def scalar_matrices(polys: Iterable[Polynomial], nvars: int) -> list:
    """Wrap scalar ideal generators as ``1 x 1`` matrices."""
    return [PolyMatrix(((p,),), nvars) for p in polys]
