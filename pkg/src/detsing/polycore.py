"""Sparse multivariate polynomials over the rationals.

A :class:`Polynomial` maps exponent tuples to nonzero ``gmpy2.mpq``
coefficients.  Instances are immutable and hashable.  Variable names are not
stored on the polynomial; parsing and printing take an ordered name list.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from operator import add
from typing import Iterable, Mapping, Sequence, Union

from gmpy2 import mpq

Monomial = tuple  # tuple[int, ...] of non-negative exponents
Scalar = Union[int, Fraction, type(mpq())]
_SCALARS = (int, Fraction, type(mpq()))

INFINITY = math.inf


def monomial_degree(mono: Monomial) -> int:
    return sum(mono)


def weighted_degree(mono: Monomial, weights: Sequence[int]) -> int:
    return sum(a * e for a, e in zip(weights, mono))


def monomial_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def grlex_key(mono: Monomial) -> tuple:
    """Sort key for graded lexicographic order (larger key = larger monomial)."""
    return (sum(mono), mono)


def monomials_of_degree(nvars: int, degree: int) -> list[Monomial]:
    """All monomials of exact total degree ``degree``, in decreasing grlex order."""
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        exps = [0] * nvars
        for v in combo:
            exps[v] += 1
        out.append(tuple(exps))
    out.sort(key=grlex_key, reverse=True)
    return out


def monomials_up_to(nvars: int, degree: int, low: int = 0) -> list[Monomial]:
    """Monomials with ``low <= total degree <= degree``, lowest degree first."""
    out: list[Monomial] = []
    for d in range(low, degree + 1):
        out.extend(monomials_of_degree(nvars, d))
    return out


@dataclass(frozen=True)
class WeightSystem:
    weights: tuple

    def __post_init__(self):
        w = tuple(int(a) for a in self.weights)
        if not w or any(a < 1 for a in w):
            raise ValueError(f"weights must be positive integers, got {self.weights!r}")
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights)

    def degree(self, mono: Monomial) -> int:
        return weighted_degree(mono, self.weights)

    def scaled(self, m: int) -> "WeightSystem":
        return WeightSystem(tuple(m * a for a in self.weights))


class Polynomial:
    """Exact polynomial in ``nvars`` variables with rational coefficients."""

    __slots__ = ("_terms", "nvars", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None, nvars: int = 0):
        clean: dict = {}
        if terms:
            for mono, c in terms.items():
                mono = tuple(int(e) for e in mono)
                if len(mono) != nvars:
                    raise ValueError(f"monomial {mono} does not have {nvars} exponents")
                if any(e < 0 for e in mono):
                    raise ValueError(f"negative exponent in {mono}")
                c = mpq(c)
                if c:
                    clean[mono] = clean.get(mono, mpq(0)) + c
            clean = {m: c for m, c in clean.items() if c}
        self._terms = clean
        self.nvars = nvars
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, nvars: int) -> "Polynomial":
        # terms must already be clean: tuple keys, nonzero mpq values
        p = cls.__new__(cls)
        p._terms = terms
        p.nvars = nvars
        p._hash = None
        return p

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._raw({}, nvars)

    @classmethod
    def constant(cls, c: Scalar, nvars: int) -> "Polynomial":
        c = mpq(c)
        return cls._raw({(0,) * nvars: c} if c else {}, nvars)

    @classmethod
    def one(cls, nvars: int) -> "Polynomial":
        return cls.constant(1, nvars)

    @classmethod
    def variable(cls, index: int, nvars: int) -> "Polynomial":
        if not 0 <= index < nvars:
            raise IndexError(f"variable index {index} out of range for {nvars} variables")
        exps = [0] * nvars
        exps[index] = 1
        return cls._raw({tuple(exps): mpq(1)}, nvars)

    @classmethod
    def monomial(cls, mono: Monomial, coeff: Scalar = 1) -> "Polynomial":
        return cls({tuple(mono): coeff}, len(mono))

    # -- basic queries -----------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def monomials(self):
        return self._terms.keys()

    def coeff(self, mono: Monomial) -> mpq:
        return self._terms.get(tuple(mono), mpq(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def constant_term(self) -> mpq:
        return self._terms.get((0,) * self.nvars, mpq(0))

    def total_degree(self) -> int:
        """Largest total degree of a term; -1 for the zero polynomial."""
        return max((sum(m) for m in self._terms), default=-1)

    def order(self) -> float:
        """Smallest total degree of a term; +inf for zero."""
        return min((sum(m) for m in self._terms), default=INFINITY)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, _SCALARS):
            return self == Polynomial.constant(other, self.nvars)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, _SCALARS):
            return Polynomial.constant(other, self.nvars)
        raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not other._terms:
            return self
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s += c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Polynomial._raw(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self._terms.items()}, self.nvars)

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Scalar) -> "Polynomial":
        c = mpq(c)
        if not c:
            return Polynomial.zero(self.nvars)
        return Polynomial._raw({m: v * c for m, v in self._terms.items()}, self.nvars)

    def __mul__(self, other):
        if isinstance(other, _SCALARS):
            return self.scale(other)
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not self._terms or not other._terms:
            return Polynomial.zero(self.nvars)
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(map(add, m1, m2))
                c = out.get(m)
                out[m] = c1 * c2 if c is None else c + c1 * c2
        return Polynomial._raw({m: c for m, c in out.items() if c}, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Polynomial.one(self.nvars)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def mul_monomial(self, mono: Monomial, coeff: Scalar = 1) -> "Polynomial":
        coeff = mpq(coeff)
        if not coeff:
            return Polynomial.zero(self.nvars)
        return Polynomial._raw(
            {tuple(map(add, m, mono)): c * coeff for m, c in self._terms.items()},
            self.nvars,
        )

    # -- calculus and gradings --------------------------------------------

    def derivative(self, var_index: int) -> "Polynomial":
        if not 0 <= var_index < self.nvars:
            raise IndexError(f"variable index {var_index} out of range for {self.nvars} variables")
        out = {}
        for m, c in self._terms.items():
            e = m[var_index]
            if e:
                dm = m[:var_index] + (e - 1,) + m[var_index + 1:]
                out[dm] = c * e
        return Polynomial._raw(out, self.nvars)

    def truncate(self, d: int) -> "Polynomial":
        """Drop every term of total degree greater than ``d``."""
        if d < 0:
            raise ValueError("truncation degree must be non-negative")
        return Polynomial._raw({m: c for m, c in self._terms.items() if sum(m) <= d}, self.nvars)

    def filtration(self, weights) -> float:
        """Minimum weighted degree over the terms (``inf`` for zero)."""
        w = tuple(weights)
        if len(w) != self.nvars:
            raise ValueError(f"{len(w)} weights for {self.nvars} variables")
        return min((weighted_degree(m, w) for m in self._terms), default=INFINITY)

    def weighted_degrees(self, weights) -> set:
        w = tuple(weights)
        return {weighted_degree(m, w) for m in self._terms}

    def is_weighted_homogeneous(self, weights) -> bool:
        return len(self.weighted_degrees(weights)) <= 1

    def euler(self, weights) -> "Polynomial":
        """Sum of ``a_i * x_i * d/dx_i``; equals ``D * p`` when p is homogeneous of degree D."""
        w = tuple(weights)
        return Polynomial(
            {m: c * weighted_degree(m, w) for m, c in self._terms.items()}, self.nvars
        )

    def evaluate(self, point: Sequence[Scalar]) -> mpq:
        total = mpq(0)
        for m, c in self._terms.items():
            v = c
            for x, e in zip(point, m):
                if e:
                    v *= mpq(x) ** e
            total += v
        return total

    def sorted_terms(self) -> list:
        """Terms in decreasing graded-lex order."""
        return sorted(self._terms.items(), key=lambda mc: grlex_key(mc[0]), reverse=True)

    # -- text --------------------------------------------------------------

    def to_string(self, varnames: Sequence[str]) -> str:
        return format_polynomial(self, varnames)

    def __repr__(self):
        names = [f"x{i + 1}" for i in range(self.nvars)]
        return f"Polynomial({format_polynomial(self, names)!r}, nvars={self.nvars})"


def format_polynomial(p: Polynomial, varnames: Sequence[str]) -> str:
    if len(varnames) != p.nvars:
        raise ValueError(f"{len(varnames)} names for {p.nvars} variables")
    if p.is_zero():
        return "0"
    pieces = []
    for i, (mono, c) in enumerate(p.sorted_terms()):
        factors = []
        for name, e in zip(varnames, mono):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = f"{mag}*" + "*".join(factors)
        if i == 0:
            pieces.append(("-" if c < 0 else "") + body)
        else:
            pieces.append((" - " if c < 0 else " + ") + body)
    return "".join(pieces)


def random_polynomial(
    varcount: int,
    max_total_degree: int,
    term_count: int,
    coeff_bound: int,
    seed: int,
    min_degree: int = 1,
) -> Polynomial:
    """Reproducible random polynomial with nonzero integer coefficients.

    Monomials are drawn without replacement from total degrees
    ``min_degree..max_total_degree``; the default ``min_degree=1`` keeps the
    constant term zero so results are valid germ entries.
    """
    if min(varcount, max_total_degree, term_count, coeff_bound) < 1:
        raise ValueError("all parameters must be positive")
    rng = random.Random(seed)
    pool = monomials_up_to(varcount, max_total_degree, low=min_degree)
    chosen = rng.sample(pool, min(term_count, len(pool)))
    terms = {}
    for mono in chosen:
        c = 0
        while c == 0:
            c = rng.randint(-coeff_bound, coeff_bound)
        terms[mono] = c
    return Polynomial(terms, varcount)


def parse_polynomial(text: str, varnames: Sequence[str]) -> Polynomial:
    from .parsing import parse_expression

    return parse_expression(text, varnames)


def polynomial_sum(polys: Iterable[Polynomial], nvars: int) -> Polynomial:
    out: dict = {}
    for p in polys:
        for m, c in p.items():
            out[m] = out.get(m, 0) + c
    return Polynomial._raw({m: c for m, c in out.items() if c}, nvars)

