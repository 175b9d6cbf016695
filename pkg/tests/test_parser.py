from __future__ import annotations

import random
from fractions import Fraction

import pytest

from lcext.cli.parser import ParseError, parse_poly_expr, parse_rational
from lcext.field import quadratic
from lcext.poly import MultiPoly

V = ("d", "l", "m")
d, l, m = (MultiPoly.var(x, V) for x in V)


def random_poly(rng: random.Random, vars=V) -> MultiPoly:
    terms = {}
    for _ in range(rng.randint(0, 6)):
        exp = tuple(rng.randint(0, 4) for _ in vars)
        terms[exp] = Fraction(rng.randint(-30, 30), rng.randint(1, 12))
    return MultiPoly(vars, terms)


def test_examples():
    assert parse_poly_expr("(d+2*l)") == d + 2 * l
    assert parse_poly_expr("0").is_zero()
    p = parse_poly_expr("d^2*l - 3/2*l^3")
    assert p.terms == {(2, 1, 0): 1, (0, 3, 0): Fraction(-3, 2)}


def test_precedence_and_unary_minus():
    assert parse_poly_expr("-d^2") == -(d ** 2)
    assert parse_poly_expr("2*-l") == -2 * l
    assert parse_poly_expr("d-l-m") == d - l - m
    assert parse_poly_expr("(d+l)^2*m") == (d + l) ** 2 * m
    assert parse_poly_expr("--d") == d


def test_params_declared():
    p = parse_poly_expr("d + alpha + Delta*l", params=["alpha", "Delta"])
    assert p.vars == ("d", "l", "m", "alpha", "Delta")
    with pytest.raises(ParseError):
        parse_poly_expr("d + alpha")


@pytest.mark.parametrize(
    "text, offset",
    [("d + * l", 4), ("d^-1", 2), ("d^1/2", 2), ("(d + l", 6), ("d $ l", 2), ("", 0), ("2/0", 0), ("d^x", 2)],
)
def test_errors_carry_offsets(text, offset):
    with pytest.raises(ParseError) as exc:
        parse_poly_expr(text)
    assert exc.value.offset == offset


def test_sqrt_only_when_allowed():
    with pytest.raises(ParseError):
        parse_poly_expr("sqrt(19)*l")
    p = parse_poly_expr("(-5/2+1/2*sqrt(19))*l", allow_sqrt=True)
    assert p.coefficient("l", 1).constant_term() == quadratic(Fraction(-5, 2), Fraction(1, 2), 19)


def test_parse_rational():
    assert parse_rational("-3/4") == Fraction(-3, 4)
    assert parse_rational("7") == 7
    for bad in ("1/0", "x", "1.5", ""):
        with pytest.raises(ValueError):
            parse_rational(bad)


def test_round_trip_500():
    rng = random.Random(2024)
    for _ in range(500):
        p = random_poly(rng)
        assert parse_poly_expr(str(p)) == p


def test_round_trip_with_parameters_and_irrationals():
    rng = random.Random(5)
    vars = V + ("t",)
    for _ in range(50):
        p = random_poly(rng, vars)
        assert parse_poly_expr(str(p), params=["t"]) == p
    x = quadratic(Fraction(-5, 2), Fraction(1, 2), 19)
    q = d ** 4 * l ** 3 + (2 * x + 3) * d ** 3 * l ** 4 - (x + Fraction(9, 28)) * l ** 7
    assert parse_poly_expr(str(q), allow_sqrt=True) == q
