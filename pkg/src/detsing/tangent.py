"""Generators of the G-tangent space and explicit membership certificates.

The tangent space of a germ ``M`` is ``M J(M) + O{C_ij(M), R_lk(M)}``.  A
:class:`TangentCombination` records a target matrix together with polynomial
coefficients on every generator; :func:`verify_combination` re-expands the
sum and compares exactly.

Certificates are built constructively:

* :func:`witness_fjE` -- ``f_j E_kl`` from cofactor expansion along row ``k``.
* :func:`witness_G` -- ``d f_j/dx_g E_kl + (-1)^(l-j+1) d f_l/dx_g E_kj``.
* :func:`witness_DeltaE` -- ``Delta^{(q,s)}_{g,v} E_kl`` as a combination of
  the previous ones.
"""

from __future__ import annotations

from dataclasses import dataclass

from .germ import (
    GermError,
    GermPresentation,
    PolyMatrix,
    cofactor,
    delta_minor,
    maximal_minors,
    nested_cofactor,
    unit_matrix,
)
from .polycore import Polynomial


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


def column_generator(g: GermPresentation, i: int, j: int) -> PolyMatrix:
    """``C_ij(M)``: column ``i`` equal to column ``j`` of ``M``, zeros elsewhere."""
    return PolyMatrix.from_function(g.n, g.p, g.r, lambda a, b: g.entry(a, j) if b == i else 0)


def row_generator(g: GermPresentation, l: int, k: int) -> PolyMatrix:
    """``R_lk(M)``: row ``l`` equal to row ``k`` of ``M``, zeros elsewhere."""
    return PolyMatrix.from_function(g.n, g.p, g.r, lambda a, b: g.entry(k, b) if a == l else 0)


def g_map(A: PolyMatrix, B: PolyMatrix, M: PolyMatrix) -> PolyMatrix:
    """``g(A, B) = B M + M A`` for ``A`` of size ``p x p`` and ``B`` of size ``n x n``."""
    if A.shape != (M.cols, M.cols) or B.shape != (M.rows, M.rows):
        raise GermError(f"g_map needs A {M.cols}x{M.cols} and B {M.rows}x{M.rows}, got {A.shape}, {B.shape}")
    return B @ M + M @ A


@dataclass(frozen=True)
class GeneratorSet:
    """Indexed generator families; ``cgens[(i, j)]`` and ``rgens[(l, k)]`` are 1-based."""

    jgens: tuple
    cgens: dict
    rgens: dict

    def all_matrices(self) -> list:
        return list(self.jgens) + list(self.cgens.values()) + list(self.rgens.values())


def generator_set(g: GermPresentation) -> GeneratorSet:
    jgens = tuple(g.matrix.derivative(v) for v in range(g.r))
    cgens = {(i, j): column_generator(g, i, j) for i in range(1, g.p + 1) for j in range(1, g.p + 1)}
    rgens = {(l, k): row_generator(g, l, k) for l in range(1, g.n + 1) for k in range(1, g.n + 1)}
    return GeneratorSet(jgens, cgens, rgens)


@dataclass(frozen=True)
class TangentCombination:
    """``target = sum jcoeffs[i] dM/dx_i + sum ccoeffs[i,j] C_ij + sum rcoeffs[l,k] R_lk``.

    ``ccoeffs`` is a ``p x p`` and ``rcoeffs`` an ``n x n`` PolyMatrix; entry
    ``(i, j)`` is the coefficient of ``C_ij`` (resp. ``R_ij``).
    """

    target: PolyMatrix
    jcoeffs: tuple
    ccoeffs: PolyMatrix
    rcoeffs: PolyMatrix

    @classmethod
    def zero(cls, g: GermPresentation) -> "TangentCombination":
        z = Polynomial.zero(g.r)
        return cls(
            PolyMatrix.zeros(g.n, g.p, g.r),
            (z,) * g.r,
            PolyMatrix.zeros(g.p, g.p, g.r),
            PolyMatrix.zeros(g.n, g.n, g.r),
        )

    def __add__(self, other: "TangentCombination") -> "TangentCombination":
        return TangentCombination(
            self.target + other.target,
            tuple(a + b for a, b in zip(self.jcoeffs, other.jcoeffs)),
            self.ccoeffs + other.ccoeffs,
            self.rcoeffs + other.rcoeffs,
        )

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TangentCombination":
        return TangentCombination(
            self.target.scale(c),
            tuple(a * c for a in self.jcoeffs),
            self.ccoeffs.scale(c),
            self.rcoeffs.scale(c),
        )

    def jet_coefficients_in_maximal_ideal(self) -> bool:
        """True when every ``dM/dx_i`` coefficient vanishes at 0 (membership in ``M J(M)``)."""
        return all(c.constant_term() == 0 for c in self.jcoeffs)

    def expand(self, g: GermPresentation) -> PolyMatrix:
        gens = generator_set(g)
        total = PolyMatrix.zeros(g.n, g.p, g.r)
        for c, G in zip(self.jcoeffs, gens.jgens):
            if c:
                total = total + G.scale(c)
        for (i, j), G in gens.cgens.items():
            c = self.ccoeffs[i, j]
            if c:
                total = total + G.scale(c)
        for (l, k), G in gens.rgens.items():
            c = self.rcoeffs[l, k]
            if c:
                total = total + G.scale(c)
        return total


def verify_combination(c: TangentCombination, g: GermPresentation) -> bool:
    if (
        c.target.shape != g.matrix.shape
        or len(c.jcoeffs) != g.r
        or c.ccoeffs.shape != (g.p, g.p)
        or c.rcoeffs.shape != (g.n, g.n)
    ):
        raise GermError("certificate dimensions do not match the germ")
    return c.expand(g) == c.target


class _Builder:
    """Accumulates coefficients in mutable grids before freezing a certificate."""

    def __init__(self, g: GermPresentation):
        self.g = g
        z = Polynomial.zero(g.r)
        self.j = [z] * g.r
        self.c = [[z] * g.p for _ in range(g.p)]
        self.rr = [[z] * g.n for _ in range(g.n)]

    def add_j(self, v: int, coeff: Polynomial):
        self.j[v - 1] = self.j[v - 1] + coeff

    def add_c(self, i: int, j: int, coeff: Polynomial):
        self.c[i - 1][j - 1] = self.c[i - 1][j - 1] + coeff

    def add_r(self, l: int, k: int, coeff: Polynomial):
        self.rr[l - 1][k - 1] = self.rr[l - 1][k - 1] + coeff

    def build(self, target: PolyMatrix) -> TangentCombination:
        r = self.g.r
        return TangentCombination(
            target,
            tuple(self.j),
            PolyMatrix(tuple(tuple(row) for row in self.c), r),
            PolyMatrix(tuple(tuple(row) for row in self.rr), r),
        )


def _check_indices(g: GermPresentation, k: int = 1, cols=(), gammas=()):
    if not 1 <= k <= g.n:
        raise GermError(f"row index {k} outside 1..{g.n}")
    for c in cols:
        if not 1 <= c <= g.p:
            raise GermError(f"column index {c} outside 1..{g.p}")
    for v in gammas:
        if not 1 <= v <= g.r:
            raise GermError(f"variable index {v} outside 1..{g.r}")


def witness_fjE(g: GermPresentation, j: int, k: int, l: int) -> TangentCombination:
    """Certificate for ``f_j E_kl`` using only the column generators ``C_ls``."""
    _check_indices(g, k, cols=(j, l))
    b = _Builder(g)
    for s in range(1, g.p + 1):
        if s != j:
            b.add_c(l, s, cofactor(g, j, k, s))
    f = maximal_minors(g)
    return b.build(unit_matrix(g.n, g.p, k, l, g.r).scale(f[j]))


def G_matrix(g: GermPresentation, j: int, l: int, gamma: int, k: int) -> PolyMatrix:
    """``d f_j/dx_gamma E_kl + (-1)^(l-j+1) d f_l/dx_gamma E_kj``, computed directly."""
    f = maximal_minors(g)
    n, p, r = g.n, g.p, g.r
    return unit_matrix(n, p, k, l, r).scale(f[j].derivative(gamma - 1)) + unit_matrix(n, p, k, j, r).scale(
        f[l].derivative(gamma - 1) * _sign(l - j + 1)
    )


def witness_G(g: GermPresentation, j: int, l: int, gamma: int, k: int) -> TangentCombination:
    """Certificate for the matrix returned by :func:`G_matrix`.

    Coefficients follow the four-step construction: the ``dM/dx_gamma`` term
    and ``C_li`` terms of step 1, the ``C_ji`` terms of step 2 and the
    ``R_ku`` / ``R_qu`` correction terms of steps 1 and 4.  Row signs: the
    ``R_ku`` terms carry ``(-1)^(k+i)`` for ``i < j`` and ``(-1)^(k+i-1)`` for
    ``i > j``; the ``R_qu`` terms carry ``(-1)^(u+i-1)`` for ``i < j`` and
    ``(-1)^(u+i)`` for ``i > j``.  Valid for either order of ``j`` and ``l``.
    """
    if j == l:
        raise GermError("witness_G needs j != l")
    _check_indices(g, k, cols=(j, l), gammas=(gamma,))
    n, p = g.n, g.p
    dv = gamma - 1

    def alpha_sign(i: int) -> int:
        return _sign(k + i) if i < j else _sign(k + i - 1)

    def mu_sign(u: int, i: int) -> int:
        return _sign(u + i - 1) if i < j else _sign(u + i)

    b = _Builder(g)
    b.add_j(gamma, cofactor(g, j, k, l))
    for i in range(1, p + 1):
        if i != j:
            b.add_c(l, i, cofactor(g, j, k, i).derivative(dv))
    for i in range(1, p + 1):
        if i in (j, l):
            continue
        dmki = g.entry(k, i).derivative(dv)
        if dmki.is_zero():
            continue
        for u in range(1, n + 1):
            if u != k:
                b.add_r(k, u, dmki * nested_cofactor(g, j, k, i, u, l) * alpha_sign(i))
    lsign = _sign(l - j + 1)
    for i in range(1, p + 1):
        if i != l:
            b.add_c(j, i, cofactor(g, l, k, i).derivative(dv) * lsign)
    for q in range(1, n + 1):
        if q == k:
            continue
        for i in range(1, p + 1):
            if i in (j, l):
                continue
            dmqi = g.entry(q, i).derivative(dv)
            if dmqi.is_zero():
                continue
            for u in range(1, n + 1):
                if u != k:
                    b.add_r(q, u, dmqi * nested_cofactor(g, j, u, i, k, l) * mu_sign(u, i))
    return b.build(G_matrix(g, j, l, gamma, k))


def witness_DeltaE(g: GermPresentation, q: int, s: int, gamma: int, nu: int, k: int, l: int) -> TangentCombination:
    """Certificate for ``Delta^{(q,s)}_{gamma,nu} E_kl`` built from :func:`witness_G`.

    * ``q, s != l``: ``(-1)^(l-q) df_l/dx_g G^nu_{sq} + df_s/dx_nu G^g_{ql}
      - df_q/dx_nu G^g_{sl}``.
    * ``q == l``: ``df_l/dx_g G^nu_{sl} - df_l/dx_nu G^g_{sl}``.
    * ``s == l``: the negative of the ``q == l`` case with ``q, s`` swapped.
    """
    if q == s:
        raise GermError("witness_DeltaE needs q != s")
    if gamma == nu:
        raise GermError("witness_DeltaE needs gamma != nu")
    _check_indices(g, k, cols=(q, s, l), gammas=(gamma, nu))
    f = maximal_minors(g)

    def df(idx, var):
        return f[idx].derivative(var - 1)

    if q == l:
        cert = witness_G(g, s, l, nu, k).scale(df(l, gamma)) - witness_G(g, s, l, gamma, k).scale(df(l, nu))
    elif s == l:
        cert = -witness_DeltaE(g, s, q, gamma, nu, k, l)
    else:
        g_, v_ = nu, gamma
        cert = (
            witness_G(g, s, q, g_, k).scale(df(l, v_) * _sign(l - q))
            + witness_G(g, q, l, v_, k).scale(df(s, g_))
            - witness_G(g, s, l, v_, k).scale(df(q, g_))
        )
    value = delta_minor(f, g, q, s, gamma, nu).value
    expected = unit_matrix(g.n, g.p, k, l, g.r).scale(value)
    if cert.target != expected:
        raise AssertionError("Delta certificate target disagrees with the direct product")
    return cert
