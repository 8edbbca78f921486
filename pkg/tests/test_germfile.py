import pytest
from hypothesis import given

from detsing.germ import PolyMatrix
from detsing.germfile import GermFile, GermFileError, format_germfile, parse_germfile, read_germfile

from .conftest import sample
from .strategies import germs

EX = """# comment line
vars: x y z
weights: 3 8 7   # trailing comment
matrix: 2 3
z, y, x^3
x^2, z, y
deformation:
0, 0, x^4
0, 0, 0
"""


def test_parse_full_file():
    gf = parse_germfile(EX)
    assert gf.varnames == ("x", "y", "z")
    assert tuple(gf.weights) == (3, 8, 7)
    assert gf.germ.to_strings() == [["z", "y", "x^3"], ["x^2", "z", "y"]]
    assert gf.deformation.to_strings(gf.varnames)[0][2] == "x^4"


def test_format_roundtrip():
    gf = parse_germfile(EX)
    again = parse_germfile(format_germfile(gf))
    assert again.germ == gf.germ and again.deformation == gf.deformation
    assert tuple(again.weights) == tuple(gf.weights)


@given(germs())
def test_random_roundtrip(g):
    gf = GermFile(g)
    assert parse_germfile(format_germfile(gf)).germ == g


@pytest.mark.parametrize(
    "text, line, column, message",
    [
        ("vars: x y\nmatrix: 1 2\nx, 2y\n", 3, 5, "implicit multiplication"),
        ("vars: x y\nmatrix: 1 2\nx, w\n", 3, 4, "unknown variable"),
        ("vars: x y\nmatrix: 1 2\nx\n", 3, 1, "expected 2"),
        ("vars: x y\nmatrix: 1 2\nx, \n", 3, 3, "empty"),
        ("vars: x y\nmatrix: 2 2\n", 2, None, "n x (n+1)"),
        ("matrix: 1 2\nx, y\n", 1, 1, "must precede"),
        ("vars: x x\nmatrix: 1 2\nx, x\n", 1, None, "duplicate"),
        ("vars: x y\nmatrix: 2 3\nx, y, 0\n", 2, None, "ends after 1 of 2"),
        ("vars: x y\ncolour: red\n", 2, 1, "unknown section"),
        ("vars: x y\nmatrix: 1 2\n1 + x, y\n", 1, None, "constant term"),
        ("vars: x y\nweights: 1 0\nmatrix: 1 2\nx, y\n", 2, None, "invalid weights"),
        ("vars: x y\nweights: 1\nmatrix: 1 2\nx, y\n", 1, None, "1 weights for 2"),
        ("vars: x y\n", 1, None, "missing 'matrix:'"),
    ],
)
def test_errors(text, line, column, message):
    with pytest.raises(GermFileError) as info:
        parse_germfile(text, source="f.germ")
    err = info.value
    assert (err.line, err.column) == (line, column)
    assert message in str(err)
    assert str(err).startswith(f"f.germ:{line}")


def test_read_returns_digest():
    gf, digest = read_germfile(sample("weighted.germ"))
    assert digest.startswith("sha256:") and len(digest) == 7 + 64
    assert gf.germ.n == 2


def test_non_utf8(tmp_path):
    p = tmp_path / "x.germ"
    p.write_bytes(b"vars: \xff\n")
    with pytest.raises(GermFileError, match="UTF-8"):
        read_germfile(str(p))


def test_deformation_shape_checked():
    gf = parse_germfile("vars: x\nmatrix: 1 2\nx, x^2\ndeformation:\nx^3, 0\n")
    assert isinstance(gf.deformation, PolyMatrix) and gf.deformation.shape == (1, 2)
