"""Finite-determinacy, isolated-singularity and Tjurina computations.

Every containment ``N = M^k Mat ⊆ T`` is decided in the jet space truncated
at degree ``k + margin``: if each monomial generator of ``N`` lies in
``T + M^{k+margin+1} Mat ⊆ T + M N`` then Nakayama's lemma gives ``N ⊆ T``.
A failing generator is a genuine non-member of ``T``, so negative verdicts
are exact as well.  Only resource limits produce an inconclusive report.

Field modes: ``qq`` computes over the rationals; ``fp`` scans over a prime
field and re-establishes every surfaced verdict over the rationals; ``both``
computes every span over both fields and logs rank comparisons.
"""

from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass
from dataclasses import field as dc_field

from .germ import GermPresentation, ideal_IG
from .jetspace import (
    JetSubspace,
    ResourceLimit,
    first_missing_power_element,
    monomial_text,
    quotient_dimension,
    scalar_matrices,
    span_from_families,
)
from .tangent import generator_set

CONTAINED = "contained"
NOT_CONTAINED = "not-contained"
INCONCLUSIVE = "inconclusive-at-bound"

INFINITESIMAL = "infinitesimal"
TANGENT_POWER = "tangent-power"
IDEAL_POWER = "ideal-power"
EXTENDED = "extended"

DEFAULT_KMAX = 15
DEFAULT_DMAX = 12
DEFAULT_MARGIN = 1

_STATEMENTS = {
    INFINITESIMAL: "M^{k+1} Mat ⊆ M^2 J(M) + M Im(g)",
    TANGENT_POWER: "M^k Mat ⊆ TG(M) = M J(M) + O{C_ij, R_lk}",
    IDEAL_POWER: "M^k ⊆ I_G(M) = J_f + (f_1, ..., f_{n+1})",
}


def germ_id(g: GermPresentation) -> str:
    text = "vars:" + ",".join(g.varnames) + ";" + ";".join(",".join(row) for row in g.to_strings())
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass
class DeterminacyReport:
    germ_id: str
    criterion: str
    statement: str
    k: int | None
    verdict: str
    truncation_degree: int | None
    field: str = "qq"
    witness: dict | None = None
    rank: int | None = None
    basis_size: int | None = None
    note: str = ""
    conclusion: str = ""
    scanned: list = dc_field(default_factory=list)

    @property
    def contained(self) -> bool:
        return self.verdict == CONTAINED

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TjurinaReport:
    germ_id: str
    dimensions: dict
    value: int | None
    stabilized: bool
    certificate_degree: int | None
    field: str = "qq"
    note: str = ""
    resource_limited: bool = False

    def to_dict(self) -> dict:
        d = asdict(self)
        d["dimensions"] = {str(k): v for k, v in self.dimensions.items()}
        return d


def _families(kind: str, g: GermPresentation) -> tuple:
    """Generator families with their multiplier-degree floors, and the ambient shape."""
    if kind == IDEAL_POWER:
        return [(scalar_matrices(ideal_IG(g).generators, g.r), 0)], (1, 1)
    gens = generator_set(g)
    jg = list(gens.jgens)
    hg = list(gens.cgens.values()) + list(gens.rgens.values())
    floors = {INFINITESIMAL: (2, 1), TANGENT_POWER: (1, 0), EXTENDED: (0, 0)}[kind]
    return [(jg, floors[0]), (hg, floors[1])], (g.n, g.p)


def build_space(kind: str, g: GermPresentation, degree: int, field: str = "qq") -> JetSubspace:
    """Truncated span for one criterion; ``EXTENDED`` is ``J(M) + Im g``."""
    families, shape = _families(kind, g)
    return span_from_families(families, degree, field=field, shape=shape, nvars=g.r, label=f"{kind}@{degree}")


def _power_for(kind: str, k: int) -> int:
    return k + 1 if kind == INFINITESIMAL else k


def _raw_check(kind: str, g: GermPresentation, k: int, margin: int, field: str) -> DeterminacyReport:
    power = _power_for(kind, k)
    degree = power + margin
    base = dict(germ_id=germ_id(g), criterion=kind, statement=_STATEMENTS[kind], k=k, truncation_degree=degree)
    try:
        space = build_space(kind, g, degree, field)
    except ResourceLimit as exc:
        return DeterminacyReport(**base, verdict=INCONCLUSIVE, field=field, note=str(exc))
    missing = first_missing_power_element(space, power)
    report = DeterminacyReport(
        **base,
        verdict=CONTAINED if missing is None else NOT_CONTAINED,
        field=space.field if field != "both" else "both",
        rank=space.rank,
        basis_size=space.index.size,
    )
    if missing is None:
        report.note = (
            f"every x^a E_ij with |a|={power} lies in the span truncated at degree {degree}; "
            f"Nakayama's lemma promotes this to containment in the local ring"
        )
        report.conclusion = {
            INFINITESIMAL: f"{k}-determined (sufficient)",
            TANGENT_POWER: f"M^{k} Mat lies in the tangent space",
            IDEAL_POWER: f"I_G(M) contains M^{k}",
        }[kind]
    else:
        mono, i, j = missing
        report.witness = {"monomial": monomial_text(mono, g.varnames), "exponents": list(mono), "position": [i, j]}
        report.note = f"x^a E_ij with |a|={power} lies outside the span even modulo degree {degree + 1} terms"
    return report


def _check(kind: str, g: GermPresentation, k: int, margin: int, field: str) -> DeterminacyReport:
    if field == "fp":
        # the prime field only pre-screens; the surfaced verdict is rational
        return _raw_check(kind, g, k, margin, "qq")
    return _raw_check(kind, g, k, margin, field)


def check_infinitesimal(g: GermPresentation, k: int, margin: int = DEFAULT_MARGIN, field: str = "qq") -> DeterminacyReport:
    if k < 1:
        raise ValueError("k must be at least 1")
    return _check(INFINITESIMAL, g, k, margin, field)


def check_tangent_contains_power(
    g: GermPresentation, k: int, margin: int = DEFAULT_MARGIN, field: str = "qq"
) -> DeterminacyReport:
    if k < 1:
        raise ValueError("k must be at least 1")
    return _check(TANGENT_POWER, g, k, margin, field)


def check_IG_power(g: GermPresentation, k: int, margin: int = DEFAULT_MARGIN, field: str = "qq") -> DeterminacyReport:
    if k < 0:
        raise ValueError("k must be non-negative")
    return _check(IDEAL_POWER, g, k, margin, field)


def _scan(kind: str, g: GermPresentation, kmin: int, kmax: int, margin: int, field: str) -> DeterminacyReport:
    """Smallest k in ``kmin..kmax`` with a contained verdict.

    In ``fp`` mode the scan itself runs over the prime field; the answer and
    the negative verdict just below it are then recomputed over the rationals,
    falling back to a rational scan if they disagree.
    """
    scan_field = "fp" if field == "fp" else field
    scanned = []
    last = None
    for k in range(kmin, kmax + 1):
        rep = _raw_check(kind, g, k, margin, scan_field)
        scanned.append({"k": k, "verdict": rep.verdict, "field": rep.field})
        last = rep
        if rep.verdict == INCONCLUSIVE:
            break
        if not rep.contained:
            continue
        if rep.field == "fp":
            rep = _raw_check(kind, g, k, margin, "qq")
            scanned.append({"k": k, "verdict": rep.verdict, "field": "qq", "confirmation": True})
            below_ok = True
            if k > kmin:
                below = _raw_check(kind, g, k - 1, margin, "qq")
                scanned.append({"k": k - 1, "verdict": below.verdict, "field": "qq", "confirmation": True})
                below_ok = below.verdict == NOT_CONTAINED
            if not rep.contained or not below_ok:
                return _scan(kind, g, kmin, kmax, margin, "qq")
        rep.scanned = scanned
        return rep
    if last is not None and last.field == "fp" and last.witness is not None:
        last = _raw_check(kind, g, last.k, margin, "qq")
    return DeterminacyReport(
        germ_id=germ_id(g),
        criterion=kind,
        statement=_STATEMENTS[kind],
        k=None,
        verdict=INCONCLUSIVE,
        truncation_degree=last.truncation_degree if last else None,
        field=field,
        witness=last.witness if last else None,
        note=f"no contained verdict for k <= {kmax}" + (f"; {last.note}" if last and last.note else ""),
        conclusion=f"inconclusive at kmax={kmax}",
        scanned=scanned,
    )


def isolated_singularity_check(
    g: GermPresentation, kmax: int = DEFAULT_KMAX, margin: int = DEFAULT_MARGIN, field: str = "qq"
) -> DeterminacyReport:
    """First k <= kmax with ``M^k ⊆ I_G(M)``; never asserts non-isolatedness."""
    if kmax < 0:
        raise ValueError("kmax must be non-negative")
    rep = _scan(IDEAL_POWER, g, 0, kmax, margin, field)
    if rep.contained:
        rep.conclusion = f"isolated: X ∩ V(J_f) = {{0}} since I_G(M) ⊇ M^{rep.k}"
    return rep


def determinacy_degree(
    g: GermPresentation, kmax: int = DEFAULT_KMAX, margin: int = DEFAULT_MARGIN, field: str = "qq"
) -> DeterminacyReport:
    """Smallest k <= kmax passing the infinitesimal criterion (a sufficient bound)."""
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    rep = _scan(INFINITESIMAL, g, 1, kmax, margin, field)
    if rep.contained:
        rep.conclusion = f"{rep.k}-determined (sufficient bound)"
    return rep


def tangent_power_degree(
    g: GermPresentation, kmax: int = DEFAULT_KMAX, margin: int = DEFAULT_MARGIN, field: str = "qq"
) -> DeterminacyReport:
    """Smallest k <= kmax with ``M^k Mat`` inside the tangent space."""
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    return _scan(TANGENT_POWER, g, 1, kmax, margin, field)


def _tjurina_scan(g: GermPresentation, dmax: int, field: str) -> TjurinaReport:
    gid = germ_id(g)
    dims: dict = {}
    for d in range(0, dmax + 1):
        try:
            space = build_space(EXTENDED, g, d, field)
        except ResourceLimit as exc:
            return TjurinaReport(gid, dims, None, False, None, field, note=str(exc), resource_limited=True)
        dims[d] = quotient_dimension(d, space)
        if d >= 1 and dims[d] == dims[d - 1] and first_missing_power_element(space, d) is None:
            return TjurinaReport(
                gid,
                dims,
                dims[d],
                True,
                d,
                field,
                note=f"M^{d} Mat lies in J(M) + Im(g) modulo degree {d + 1}, hence exactly; "
                f"dimensions at degrees {d - 1} and {d} agree",
            )
    return TjurinaReport(gid, dims, None, False, None, field, note=f"dimension did not stabilize by degree {dmax}")


def tjurina_number(g: GermPresentation, dmax: int = DEFAULT_DMAX, field: str = "qq") -> TjurinaReport:
    """``dim Mat / (J(M) + Im g)`` by increasing truncation degree.

    Stops once two consecutive degrees give the same dimension and every
    ``x^a E_ij`` with ``|a| = d`` lies in the truncated span, so that higher
    degrees add nothing to the quotient.
    """
    if dmax < 2:
        raise ValueError("dmax must be at least 2")
    if field != "fp":
        return _tjurina_scan(g, dmax, field)
    rep = _tjurina_scan(g, dmax, "fp")
    if not rep.stabilized:
        return _tjurina_scan(g, dmax, "qq")
    d = rep.certificate_degree
    confirmed = {}
    for deg in (d - 1, d):
        space = build_space(EXTENDED, g, deg, "qq")
        confirmed[deg] = quotient_dimension(deg, space)
    if confirmed[d] != rep.value or confirmed[d - 1] != rep.value or first_missing_power_element(space, d):
        return _tjurina_scan(g, dmax, "qq")
    rep.field = "fp"
    rep.note += f"; degrees {d - 1} and {d} recomputed over Q"
    return rep
