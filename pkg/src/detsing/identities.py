"""Randomized exact checks of the cofactor identities and tangent-space certificates.

Each identity runs on ``cases`` random germs.  A case draws ``n`` from
{1, 2, 3} (from {2, 3} when the identity needs two rows), ``r`` from
{2, 3, 4}, and fills the matrix with random polynomials without constant
term.  The cheap scalar identities are checked for every index combination;
certificate identities at one random index tuple per case.
"""

from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass
from dataclasses import field as dc_field

from .germ import (
    GermPresentation,
    PolyMatrix,
    cofactor,
    delta_minor,
    maximal_minors,
    nested_cofactor,
    unit_matrix,
)
from .polycore import polynomial_sum, random_polynomial
from .tangent import verify_combination, witness_DeltaE, witness_fjE, witness_G

NS = (1, 2, 3)
RS = (2, 3, 4)
MAX_DEGREE = 3
COEFF_BOUND = 9
MAX_TERMS = 4


def random_germ(rng: random.Random, n: int | None = None, r: int | None = None) -> GermPresentation:
    n = n or rng.choice(NS)
    r = r or rng.choice(RS)
    rows = tuple(
        tuple(
            random_polynomial(r, MAX_DEGREE, rng.randint(1, MAX_TERMS), COEFF_BOUND, rng.getrandbits(64))
            for _ in range(n + 1)
        )
        for _ in range(n)
    )
    return GermPresentation(PolyMatrix(rows, r), tuple(f"x{i}" for i in range(1, r + 1)))


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


def laplace(g: GermPresentation, rng: random.Random) -> bool:
    f = maximal_minors(g)
    return all(
        f[j] == polynomial_sum((g.entry(k, s) * cofactor(g, j, k, s) for s in range(1, g.p + 1) if s != j), g.r)
        for j in range(1, g.p + 1)
        for k in range(1, g.n + 1)
    )


def alien_cofactors(g: GermPresentation, rng: random.Random) -> bool:
    return all(
        polynomial_sum((g.entry(u, s) * cofactor(g, j, k, s) for s in range(1, g.p + 1) if s != j), g.r).is_zero()
        for j in range(1, g.p + 1)
        for k in range(1, g.n + 1)
        for u in range(1, g.n + 1)
        if u != k
    )


def cofactor_sign_swap(g: GermPresentation, rng: random.Random) -> bool:
    """``cof^j(m_il) = (-1)^a cof^l(m_ij)`` with ``a = l-j+1`` (l<j) or ``l-j-1`` (l>j)."""
    for i in range(1, g.n + 1):
        for j in range(1, g.p + 1):
            for l in range(1, g.p + 1):
                if l == j:
                    continue
                a = l - j + 1 if l < j else l - j - 1
                if cofactor(g, j, i, l) != cofactor(g, l, i, j).scale(_sign(a)):
                    return False
    return True


def nested_reconstruction(g: GermPresentation, rng: random.Random) -> bool:
    """``cof^j(m_ki) = (-1)^b sum_{t != i,j} m_qt cof^j_ki(m_qt)`` for every ``q != k``."""
    if g.n == 1:
        return True
    for j in range(1, g.p + 1):
        for k in range(1, g.n + 1):
            for i in range(1, g.p + 1):
                if i == j:
                    continue
                b = k + i if i < j else k + i - 1
                lhs = cofactor(g, j, k, i)
                for q in range(1, g.n + 1):
                    if q == k:
                        continue
                    rhs = polynomial_sum(
                        (
                            g.entry(q, t) * nested_cofactor(g, j, k, i, q, t)
                            for t in range(1, g.p + 1)
                            if t not in (i, j)
                        ),
                        g.r,
                    )
                    if lhs != rhs.scale(_sign(b)):
                        return False
    return True


def fjE_witness(g: GermPresentation, rng: random.Random) -> bool:
    j, l = rng.randint(1, g.p), rng.randint(1, g.p)
    k = rng.randint(1, g.n)
    c = witness_fjE(g, j, k, l)
    return verify_combination(c, g) and c.target == unit_matrix(g.n, g.p, k, l, g.r).scale(maximal_minors(g)[j])


def G_witness(g: GermPresentation, rng: random.Random) -> bool:
    j, l = rng.sample(range(1, g.p + 1), 2)
    gamma = rng.randint(1, g.r)
    k = rng.randint(1, g.n)
    c = witness_G(g, j, l, gamma, k)
    f = maximal_minors(g)
    # the defining formula, recomputed independently of the certificate
    expected = unit_matrix(g.n, g.p, k, l, g.r).scale(f[j].derivative(gamma - 1)) + unit_matrix(
        g.n, g.p, k, j, g.r
    ).scale(f[l].derivative(gamma - 1).scale(_sign(l - j + 1)))
    return verify_combination(c, g) and c.target == expected


def _delta_case(g: GermPresentation, rng: random.Random, split: str) -> bool:
    q, s = rng.sample(range(1, g.p + 1), 2)
    if split == "on":
        l = rng.choice((q, s))
    else:
        l = rng.choice([c for c in range(1, g.p + 1) if c not in (q, s)])
    gamma, nu = rng.sample(range(1, g.r + 1), 2)
    k = rng.randint(1, g.n)
    c = witness_DeltaE(g, q, s, gamma, nu, k, l)
    delta = delta_minor(maximal_minors(g), g, q, s, gamma, nu).value
    return verify_combination(c, g) and c.target == unit_matrix(g.n, g.p, k, l, g.r).scale(delta)


def delta_witness_off_column(g: GermPresentation, rng: random.Random) -> bool:
    """Case ``q, s != l``, which needs ``n >= 2``."""
    return _delta_case(g, rng, "off")


def delta_witness_on_column(g: GermPresentation, rng: random.Random) -> bool:
    """Case ``l in {q, s}``."""
    return _delta_case(g, rng, "on")


# name -> (check, admissible row counts)
IDENTITIES: dict = {
    "laplace": (laplace, NS),
    "alien-cofactors": (alien_cofactors, NS),
    "cofactor-sign-swap": (cofactor_sign_swap, NS),
    "nested-cofactor-reconstruction": (nested_reconstruction, (2, 3)),
    "fjE-witness": (fjE_witness, NS),
    "G-witness": (G_witness, NS),
    "DeltaE-witness-q,s!=l": (delta_witness_off_column, (2, 3)),
    "DeltaE-witness-l-in-{q,s}": (delta_witness_on_column, NS),
}


@dataclass
class IdentityResult:
    name: str
    cases: int
    failures: int
    seconds: float
    failing_cases: list = dc_field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def run_identity(name: str, seed: int, cases: int) -> IdentityResult:
    check, ns = IDENTITIES[name]
    rng = random.Random(f"{seed}:{name}")
    failures, failing = 0, []
    start = time.perf_counter()
    for case in range(cases):
        g = random_germ(rng, n=rng.choice(ns))
        try:
            ok = check(g, random.Random(rng.getrandbits(64)))
        except Exception as exc:  # an exception is a failed case, not a crashed suite
            ok = False
            failing.append({"case": case, "error": repr(exc)})
        if not ok:
            failures += 1
            if len(failing) < 5:
                failing.append({"case": case, "matrix": g.to_strings(), "vars": list(g.varnames)})
    return IdentityResult(name, cases, failures, time.perf_counter() - start, failing)


def run_suite(seed: int = 0, cases: int = 200, names=None) -> list:
    unknown = set(names or ()) - set(IDENTITIES)
    if unknown:
        raise ValueError(f"unknown identities: {sorted(unknown)}")
    return [run_identity(name, seed, cases) for name in names or IDENTITIES]
