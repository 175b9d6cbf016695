"""Exact real roots of univariate rational polynomials.

Factoring over Q is delegated to sympy; every root that comes back is then
checked by exact substitution with our own arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .field import Scalar, quadratic, sqrt_rational
from .poly import MultiPoly, univariate_coeffs


@dataclass
class RootReport:
    """Rational roots, real quadratic roots, and factors left unsolved.

    ``rational`` and ``quadratic`` map each root to its multiplicity.
    ``residual`` lists irreducible factors of degree >= 3 and quadratics with
    negative discriminant, as dense coefficient lists (index = power).
    """

    rational: dict[Fraction, int] = field(default_factory=dict)
    quadratic: dict[Scalar, int] = field(default_factory=dict)
    residual: list[list[Fraction]] = field(default_factory=list)

    def real_roots(self) -> list[Scalar]:
        return sorted([*self.rational, *self.quadratic], key=float)

    @property
    def complete(self) -> bool:
        return not self.residual


def _evaluate(coeffs, x) -> Scalar:
    acc: Scalar = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def univ_roots(p: MultiPoly, var: str | None = None) -> RootReport:
    if p.is_zero():
        raise ValueError("the zero polynomial has no finite root set")
    if var is None:
        used = p.used_vars()
        if len(used) > 1:
            raise ValueError(f"polynomial is not univariate: {used}")
        var = used[0] if used else "t"
    coeffs = univariate_coeffs(p, var)
    out = RootReport()
    if len(coeffs) <= 1:
        return out
    x = sympy.Symbol("x")
    sp = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in map(Fraction, reversed(coeffs))], x)
    _, factors = sp.factor_list()
    for fac, mult in factors:
        fc = [Fraction(int(c.p), int(c.q)) for c in reversed(fac.all_coeffs())]
        deg = len(fc) - 1
        if deg == 1:
            root = -fc[0] / fc[1]
            out.rational[root] = out.rational.get(root, 0) + mult
        elif deg == 2:
            c0, b, a = fc
            disc = b * b - 4 * a * c0
            if disc < 0:
                out.residual.append(fc)
                continue
            s = sqrt_rational(disc)
            for sign in (1, -1):
                root = quadratic(-b / (2 * a), 0, 2) + s * sign / (2 * a)
                out.quadratic[root] = out.quadratic.get(root, 0) + mult
        else:
            out.residual.append(fc)
    for root in [*out.rational, *out.quadratic]:
        if _evaluate(coeffs, root) != 0:
            raise ArithmeticError(f"factorization produced a non-root {root}")
    return out
