"""Command-line front end.

Exit codes: 0 affirmative or complete, 1 negative (the property was not
established, or a check failed), 2 unreadable or invalid input, 3 a
resource limit stopped the analysis.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from .determinacy import (
    CONTAINED,
    DEFAULT_DMAX,
    DEFAULT_KMAX,
    determinacy_degree,
    germ_id,
    isolated_singularity_check,
    tangent_power_degree,
    tjurina_number,
)
from .germ import GermError, all_delta_minors, cofactor, ideal_IG, maximal_minors
from .germfile import GermFile, GermFileError, read_germfile
from .homogeneity import (
    NO_CONCLUSION,
    HomogeneityError,
    check_weighted_homogeneous,
    classify_deformation,
    control_spec,
    filtration_certificate,
)
from .identities import IDENTITIES, run_suite
from .jetspace import FIELDS
from .polycore import WeightSystem
from .tangent import generator_set, verify_combination, witness_DeltaE, witness_fjE, witness_G

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3
SCHEMA_VERSION = 1


class UsageError(ValueError):
    pass


def _text(p, names) -> str:
    return p.to_string(names)


def _matrix(m, names) -> list:
    return m.to_strings(names)


def _scan_exit(rep) -> int:
    if rep.verdict == CONTAINED:
        return EXIT_OK
    if any(s.get("verdict") == "inconclusive-at-bound" for s in rep.scanned):
        return EXIT_RESOURCE
    return EXIT_NEGATIVE


def _weights(gf: GermFile, args) -> WeightSystem:
    if getattr(args, "weights", None):
        w = WeightSystem(tuple(int(t) for t in args.weights.replace(",", " ").split()))
        if len(w) != gf.germ.r:
            raise UsageError(f"{len(w)} weights for {gf.germ.r} variables")
        return w
    if gf.weights is None:
        raise UsageError("weights are required: add a 'weights:' line or pass --weights")
    return gf.weights


# commands return (result dict, exit code)


def cmd_minors(gf: GermFile, args):
    g, names = gf.germ, gf.varnames
    f = maximal_minors(g)
    deltas = [
        {"q": d.q, "s": d.s, "gamma": names[d.gamma - 1], "nu": names[d.nu - 1], "value": _text(d.value, names)}
        for d in all_delta_minors(g, f)
    ]
    ig = ideal_IG(g)
    return {
        "minors": [_text(x, names) for x in f],
        "delta_minors": deltas,
        "I_G": {"generators": [_text(x, names) for x in ig.generators], "origins": list(ig.origins)},
    }, EXIT_OK


def cmd_cofactors(gf: GermFile, args):
    g, names = gf.germ, gf.varnames
    table = [
        {"j": j, "k": k, "s": s, "value": _text(cofactor(g, j, k, s), names)}
        for j in range(1, g.p + 1)
        for k in range(1, g.n + 1)
        for s in range(1, g.p + 1)
        if s != j
    ]
    return {"cofactors": table}, EXIT_OK


def cmd_tangent(gf: GermFile, args):
    g, names = gf.germ, gf.varnames
    gs = generator_set(g)
    return {
        "J": {names[i]: _matrix(m, names) for i, m in enumerate(gs.jgens)},
        "C": {f"C{i}{j}": _matrix(m, names) for (i, j), m in gs.cgens.items()},
        "R": {f"R{l}{k}": _matrix(m, names) for (l, k), m in gs.rgens.items()},
        "module": "M J(M) + O{C_ij, R_lk}",
    }, EXIT_OK


def _var_index(names, value) -> int:
    if value is None:
        raise UsageError("a variable index is required (--gamma/--nu)")
    if value in names:
        return names.index(value) + 1
    try:
        return int(value)
    except ValueError:
        raise UsageError(f"unknown variable {value!r}") from None


def _need(args, *keys):
    missing = [k for k in keys if getattr(args, k) is None]
    if missing:
        raise UsageError("missing " + ", ".join(f"--{k}" for k in missing))


def certificate_dict(c, g) -> dict:
    names = g.varnames
    return {
        "target": _matrix(c.target, names),
        "J": {names[i]: _text(p, names) for i, p in enumerate(c.jcoeffs) if p},
        "C": {f"C{i}{j}": _text(p, names) for i, j, p in c.ccoeffs.cells() if p},
        "R": {f"R{l}{k}": _text(p, names) for l, k, p in c.rcoeffs.cells() if p},
        "verified": verify_combination(c, g),
    }


def cmd_witness(gf: GermFile, args):
    g, names = gf.germ, gf.varnames
    kind = args.kind
    if kind == "fjE":
        _need(args, "j", "k", "l")
        c = witness_fjE(g, args.j, args.k, args.l)
        label = f"f_{args.j} E_{args.k}{args.l}"
    elif kind == "G":
        _need(args, "j", "l", "k")
        gamma = _var_index(names, args.gamma)
        c = witness_G(g, args.j, args.l, gamma, args.k)
        label = f"G^{names[gamma - 1]}_{args.j}{args.l} (row {args.k})"
    else:
        _need(args, "q", "s", "k", "l")
        gamma, nu = _var_index(names, args.gamma), _var_index(names, args.nu)
        c = witness_DeltaE(g, args.q, args.s, gamma, nu, args.k, args.l)
        label = f"Delta({args.q},{args.s};{names[gamma - 1]},{names[nu - 1]}) E_{args.k}{args.l}"
    cert = certificate_dict(c, g)
    return {"kind": kind, "statement": label, "certificate": cert}, EXIT_OK if cert["verified"] else EXIT_NEGATIVE


def cmd_determinacy(gf: GermFile, args):
    rep = determinacy_degree(gf.germ, args.max_k, field=args.field)
    return {"determinacy": rep.to_dict()}, _scan_exit(rep)


def cmd_isolated(gf: GermFile, args):
    rep = isolated_singularity_check(gf.germ, args.max_k, field=args.field)
    return {"isolated": rep.to_dict()}, _scan_exit(rep)


def cmd_tjurina(gf: GermFile, args):
    rep = tjurina_number(gf.germ, args.max_degree, field=args.field)
    if rep.stabilized:
        code = EXIT_OK
    elif rep.resource_limited:
        code = EXIT_RESOURCE
    else:
        code = EXIT_NEGATIVE
    return {"tjurina": rep.to_dict()}, code


def _homogeneity(gf: GermFile, args) -> dict:
    w = _weights(gf, args)
    try:
        h = check_weighted_homogeneous(gf.germ, w)
    except HomogeneityError as exc:
        return {"accepted": False, "weights": list(w), "reason": str(exc)}
    spec = control_spec(h, gf.germ)
    return {"accepted": True, **h.to_dict(), "control": spec.to_dict()}


def cmd_homogeneity(gf: GermFile, args):
    res = _homogeneity(gf, args)
    return {"homogeneity": res}, EXIT_OK if res["accepted"] else EXIT_NEGATIVE


def _classify(gf: GermFile, args) -> tuple:
    if gf.deformation is None:
        raise UsageError("the file has no 'deformation:' block")
    w = _weights(gf, args)
    try:
        verdict = classify_deformation(gf.germ, gf.deformation, w, args.max_k, field=args.field)
    except HomogeneityError as exc:
        return {"accepted": False, "reason": str(exc)}, EXIT_NEGATIVE
    cert = filtration_certificate(gf.germ, gf.deformation, w).to_dict()
    cert["bounds"].pop("terms", None)
    out = {"accepted": True, **verdict.to_dict(), "certificate": cert}
    ok = verdict.verdict != NO_CONCLUSION and cert["all_identities_verified"] and cert["bounds_met"]
    return out, EXIT_OK if ok else EXIT_NEGATIVE


def cmd_classify(gf: GermFile, args):
    res, code = _classify(gf, args)
    return {"classify": res}, code


def cmd_check(gf: GermFile, args):
    g = gf.germ
    out, codes = {}, []
    if gf.weights is not None or args.weights:
        res = _homogeneity(gf, args)
        out["homogeneity"] = res
        codes.append(EXIT_OK if res["accepted"] else EXIT_NEGATIVE)
    for key, fn in (
        ("isolated", isolated_singularity_check),
        ("determinacy", determinacy_degree),
        ("tangent_power", tangent_power_degree),
    ):
        rep = fn(g, args.max_k, field=args.field)
        out[key] = rep.to_dict()
        codes.append(_scan_exit(rep))
    if gf.deformation is not None and "homogeneity" in out and out["homogeneity"]["accepted"]:
        res, code = _classify(gf, args)
        out["classify"] = res
        codes.append(code)
    if EXIT_RESOURCE in codes:
        return out, EXIT_RESOURCE
    return out, max(codes)


def cmd_verify_identities(args):
    results = run_suite(args.seed, args.cases, args.identity or None)
    total = sum(r.failures for r in results)
    res = {
        "seed": args.seed,
        "cases": args.cases,
        "identities": [dict(r.to_dict(), seconds=None) for r in results],
        "failures": total,
    }
    timing = {r.name: round(r.seconds, 3) for r in results}
    return res, (EXIT_OK if total == 0 else EXIT_NEGATIVE), timing


COMMANDS = {
    "minors": (cmd_minors, "maximal minors, Jacobian 2x2 minors and I_G(M) generators"),
    "cofactors": (cmd_cofactors, "every cofactor cof^j(m_ks)"),
    "tangent": (cmd_tangent, "generators of the tangent space"),
    "witness": (cmd_witness, "an explicit tangent-space certificate"),
    "determinacy": (cmd_determinacy, "smallest k passing the infinitesimal determinacy criterion"),
    "isolated": (cmd_isolated, "smallest k with M^k inside I_G(M)"),
    "tjurina": (cmd_tjurina, "Tjurina number by increasing truncation degree"),
    "homogeneity": (cmd_homogeneity, "weighted homogeneity type and control-function exponents"),
    "classify": (cmd_classify, "triviality verdict for the file's deformation"),
    "check": (cmd_check, "homogeneity, isolatedness, determinacy and classification together"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="detsing", description="Analyze n x (n+1) determinantal matrix germs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json", help="JSON report (default)")
    fmt.add_argument("--text", dest="format", action="store_const", const="text", help="plain-text summary")
    common.set_defaults(format="json")
    analysis = argparse.ArgumentParser(add_help=False)
    analysis.add_argument("--max-k", type=int, default=DEFAULT_KMAX, help=f"largest k scanned (default {DEFAULT_KMAX})")
    analysis.add_argument(
        "--max-degree", type=int, default=DEFAULT_DMAX, help=f"largest truncation degree for tjurina (default {DEFAULT_DMAX})"
    )
    analysis.add_argument("--field", choices=FIELDS, default="qq", help="coefficient field for spans (default qq)")
    analysis.add_argument("--weights", help="override the file's weights, e.g. '3 8 7'")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, (_, helptext) in COMMANDS.items():
        sp = sub.add_parser(name, help=helptext, parents=[common, analysis])
        sp.add_argument("file", help="germ file")
        if name == "witness":
            sp.add_argument("--kind", choices=("fjE", "G", "DeltaE"), required=True)
            for opt in ("j", "k", "l", "q", "s"):
                sp.add_argument(f"--{opt}", type=int)
            sp.add_argument("--gamma", help="variable name or 1-based index")
            sp.add_argument("--nu", help="variable name or 1-based index")
    sp = sub.add_parser("verify-identities", help="randomized exact identity suite", parents=[common])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cases", type=int, default=200)
    sp.add_argument("--identity", action="append", choices=list(IDENTITIES), help="restrict to one identity (repeatable)")
    return parser


def _scalar_list(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _inline(v) -> str:
    if _scalar_list(v):
        return "[" + ", ".join(str(x) for x in v) + "]"
    if isinstance(v, list) and all(_scalar_list(x) for x in v):
        return "[" + "; ".join(_inline(x) for x in v) + "]"
    return str(v)


def _text_lines(obj, indent: int = 0) -> list:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            nested = isinstance(v, list) and not (_scalar_list(v) or all(_scalar_list(x) for x in v))
            if isinstance(v, dict) and v or nested:
                lines.append(f"{pad}{k}:")
                lines.extend(_text_lines(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
    else:
        for v in obj:
            if isinstance(v, dict):
                sub = _text_lines(v, indent + 1)
                lines.append(f"{pad}- {sub[0].strip()}")
                lines.extend(sub[1:])
            else:
                lines.append(f"{pad}- {_inline(v)}")
    return lines


def render(report: dict, fmt: str) -> str:
    if fmt == "text":
        return "\n".join(_text_lines(report)) + "\n"
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def run_command(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    report = {"tool": "detsing", "version": __version__, "schema_version": SCHEMA_VERSION, "command": args.command}
    extra_timing = {}
    try:
        if args.command == "verify-identities":
            result, code, extra_timing = cmd_verify_identities(args)
        else:
            if getattr(args, "max_k", 1) < 1 or getattr(args, "max_degree", 2) < 2:
                raise UsageError("--max-k must be at least 1 and --max-degree at least 2")
            gf, digest = read_germfile(args.file)
            report["input_digest"] = digest
            report["germ"] = {
                "id": germ_id(gf.germ),
                "vars": list(gf.varnames),
                "matrix": gf.germ.to_strings(),
                "weights": None if gf.weights is None else list(gf.weights),
            }
            report["flags"] = {"max_k": args.max_k, "max_degree": args.max_degree, "field": args.field}
            result, code = COMMANDS[args.command][0](gf, args)
    except GermFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (UsageError, GermError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report["result"] = result
    report["exit_code"] = code
    report["timing"] = {"seconds": round(time.perf_counter() - start, 3), **extra_timing}
    sys.stdout.write(render(report, args.format))
    sys.stdout.flush()
    return code


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
