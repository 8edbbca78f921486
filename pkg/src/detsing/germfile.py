"""Line-oriented germ files.

::

    # Example: two rows, three columns
    vars: x y z
    weights: 3 8 7
    matrix: 2 3
    z, y, x^3
    x^2, z, y
    deformation:
    0, 0, x^4
    0, 0, 0

Entries are comma separated so expressions may contain spaces; ``#`` starts
a comment.  ``weights`` and ``deformation`` are optional.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import Sequence

from .germ import GermError, GermPresentation, PolyMatrix
from .parsing import PolynomialSyntaxError, parse_expression
from .polycore import WeightSystem

_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*\Z")


class GermFileError(ValueError):
    """Malformed germ file; ``line`` and ``column`` are 1-based (column may be None)."""

    def __init__(self, message: str, line: int, column: int | None = None, source: str = "<input>"):
        self.line = line
        self.column = column
        self.source = source
        where = f"{source}:{line}" + (f":{column}" if column else "")
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class GermFile:
    germ: GermPresentation
    weights: WeightSystem | None = None
    deformation: PolyMatrix | None = None

    @property
    def varnames(self) -> tuple:
        return self.germ.varnames


def _strip(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


def _split_entries(text: str, lineno: int, source: str) -> list:
    """Comma-separated entries with their 1-based starting columns."""
    out, start = [], 0
    for piece in text.split(","):
        lead = len(piece) - len(piece.lstrip())
        if not piece.strip():
            raise GermFileError("empty matrix entry", lineno, start + 1, source)
        out.append((piece.strip(), start + lead + 1))
        start += len(piece) + 1
    return out


def _parse_rows(lines, count: int, cols: int, names: tuple, what: str, header_line: int, source: str) -> tuple:
    rows = []
    for _ in range(count):
        try:
            lineno, text = next(lines)
        except StopIteration:
            raise GermFileError(f"{what} block ends after {len(rows)} of {count} rows", header_line, None, source)
        entries = _split_entries(text, lineno, source)
        if len(entries) != cols:
            raise GermFileError(f"{what} row has {len(entries)} entries, expected {cols}", lineno, 1, source)
        row = []
        for expr, col in entries:
            try:
                row.append(parse_expression(expr, names))
            except PolynomialSyntaxError as exc:
                msg = str(exc).rsplit(" at column", 1)[0]
                raise GermFileError(msg, lineno, col + exc.position, source) from None
        rows.append(tuple(row))
    return tuple(rows)


def parse_germfile(text: str, source: str = "<input>") -> GermFile:
    lines = iter(
        [(i, _strip(raw)) for i, raw in enumerate(text.splitlines(), start=1) if _strip(raw).strip()]
    )
    names = weights = matrix = deformation = None
    shape = None
    for lineno, line in lines:
        key, sep, rest = line.partition(":")
        key = key.strip().lower()
        if not sep:
            raise GermFileError(f"expected a 'key:' line, got {line.strip()!r}", lineno, 1, source)
        rest = rest.strip()
        if key == "vars":
            toks = rest.replace(",", " ").split()
            if not toks:
                raise GermFileError("no variables declared", lineno, None, source)
            for t in toks:
                if not _NAME.match(t):
                    raise GermFileError(f"invalid variable name {t!r}", lineno, line.find(t) + 1, source)
            if len(set(toks)) != len(toks):
                raise GermFileError("duplicate variable names", lineno, None, source)
            names = tuple(toks)
        elif key == "weights":
            try:
                weights = WeightSystem(tuple(int(t) for t in rest.replace(",", " ").split()))
            except ValueError as exc:
                raise GermFileError(f"invalid weights: {exc}", lineno, None, source) from None
        elif key == "matrix":
            if names is None:
                raise GermFileError("'vars:' must precede 'matrix:'", lineno, 1, source)
            try:
                n, p = (int(t) for t in rest.split())
            except ValueError:
                raise GermFileError("'matrix:' expects two integers 'n p'", lineno, None, source) from None
            if n < 1 or p != n + 1:
                raise GermFileError(f"matrix must be n x (n+1) with n >= 1, got {n} x {p}", lineno, None, source)
            shape = (n, p)
            matrix = _parse_rows(lines, n, p, names, "matrix", lineno, source)
        elif key == "deformation":
            if shape is None:
                raise GermFileError("'matrix:' must precede 'deformation:'", lineno, 1, source)
            deformation = _parse_rows(lines, shape[0], shape[1], names, "deformation", lineno, source)
        else:
            raise GermFileError(f"unknown section {key!r}", lineno, 1, source)
    if names is None:
        raise GermFileError("missing 'vars:' line", 1, None, source)
    if matrix is None:
        raise GermFileError("missing 'matrix:' block", 1, None, source)
    if weights is not None and len(weights) != len(names):
        raise GermFileError(f"{len(weights)} weights for {len(names)} variables", 1, None, source)
    try:
        germ = GermPresentation(PolyMatrix(matrix, len(names)), names)
    except GermError as exc:
        raise GermFileError(str(exc), 1, None, source) from None
    theta = PolyMatrix(deformation, len(names)) if deformation is not None else None
    return GermFile(germ, weights, theta)


def read_germfile(path: str) -> tuple:
    """Parsed file and the SHA-256 digest of its bytes."""
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise GermFileError(f"not UTF-8: {exc}", 1, None, path) from None
    return parse_germfile(text, source=path), "sha256:" + hashlib.sha256(data).hexdigest()


def _rows_text(rows: Sequence[Sequence[str]]) -> list:
    return [", ".join(r) for r in rows]


def format_germfile(gf: GermFile) -> str:
    g = gf.germ
    out = [f"vars: {' '.join(g.varnames)}"]
    if gf.weights is not None:
        out.append("weights: " + " ".join(str(a) for a in gf.weights))
    out.append(f"matrix: {g.n} {g.p}")
    out.extend(_rows_text(g.to_strings()))
    if gf.deformation is not None:
        out.append("deformation:")
        out.extend(_rows_text(gf.deformation.to_strings(g.varnames)))
    return "\n".join(out) + "\n"
