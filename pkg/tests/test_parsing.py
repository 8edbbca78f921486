import pytest

from detsing.parsing import PolynomialSyntaxError, parse_expression

XY = ("x", "y")


@pytest.mark.parametrize(
    "text, column",
    [
        ("x y", 3),
        ("2x", 2),
        ("x +", 4),
        ("x^-1", 3),
        ("x^y", 3),
        ("w + x", 1),
        ("x $ y", 3),
        ("(x + y", 7),
        ("", 1),
        ("1/0", 3),
    ],
)
def test_errors_report_columns(text, column):
    with pytest.raises(PolynomialSyntaxError) as info:
        parse_expression(text, XY)
    assert info.value.position + 1 == column
    assert f"column {column}" in str(info.value)


def test_implicit_multiplication_message():
    with pytest.raises(PolynomialSyntaxError, match="implicit multiplication"):
        parse_expression("x(y)", XY)


def test_precedence():
    assert parse_expression("-x^2", XY) == parse_expression("-(x^2)", XY)
    assert parse_expression("2*x^2*y", XY) == parse_expression("(2)*(x*x)*y", XY)
    assert parse_expression("x - y - x", XY) == parse_expression("-y", XY)


def test_rational_literals():
    p = parse_expression("3/6*x", XY)
    assert p == parse_expression("1/2*x", XY)


def test_whitespace_ignored():
    assert parse_expression("  x^2 *  y ", XY) == parse_expression("x^2*y", XY)
