"""Exact scalars: rationals and elements of one real quadratic field Q(sqrt(d)).

Rationals are plain :class:`fractions.Fraction` values.  Irrational elements
are :class:`QuadraticNumber` instances; any arithmetic result whose
irrational part vanishes collapses back to a ``Fraction``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from typing import Union

Scalar = Union[Fraction, "QuadraticNumber"]


class FieldMismatchError(ValueError):
    """Raised when elements of Q(sqrt(d)) and Q(sqrt(d')) with d != d' meet."""


def is_squarefree(n: int) -> bool:
    if n < 2:
        return n == 1
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Write a positive integer as ``s * r**2`` with ``s`` squarefree."""
    if n <= 0:
        raise ValueError("expected a positive integer")
    s, r = 1, 1
    k = 2
    while k * k <= n:
        while n % (k * k) == 0:
            n //= k * k
            r *= k
        if n % k == 0:
            n //= k
            s *= k
        k += 1
    return s * n, r


def as_scalar(x) -> Scalar:
    if isinstance(x, QuadraticNumber):
        return x
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact scalar: {x!r}")


@total_ordering
class QuadraticNumber:
    """``a + b*sqrt(d)`` with rational ``a, b``, ``b != 0`` and squarefree ``d > 1``.

    Use :func:`quadratic` to construct values; it normalizes ``b == 0`` to a
    ``Fraction`` and pulls square factors out of ``d``.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a: Fraction, b: Fraction, d: int):
        self.a = a
        self.b = b
        self.d = d

    # -- helpers ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, QuadraticNumber):
            if other.d != self.d:
                raise FieldMismatchError(f"cannot mix sqrt({self.d}) and sqrt({other.d})")
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return other, 0
        return None

    def conjugate(self) -> QuadraticNumber:
        return QuadraticNumber(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return _same_field(self.a + c[0], self.b + c[1], self.d)

    __radd__ = __add__

    def __sub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return _same_field(self.a - c[0], self.b - c[1], self.d)

    def __rsub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return _same_field(c[0] - self.a, c[1] - self.b, self.d)

    def __mul__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        a, b = c
        return _same_field(self.a * a + self.d * self.b * b, self.a * b + self.b * a, self.d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        a, b = c
        n = a * a - self.d * b * b
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt(d))")
        # (x)(a - b r) / (a^2 - d b^2)
        num = self * QuadraticNumber(a, -b, self.d) if b else self * a
        if isinstance(num, QuadraticNumber):
            return _same_field(num.a / n, num.b / n, self.d)
        return num / n

    def __rtruediv__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return quadratic(c[0], c[1], self.d) / self if c[1] else (self.conjugate() * c[0]) / self.norm()

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out: Scalar = Fraction(1)
        base: Scalar = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparison ------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, QuadraticNumber):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        if isinstance(other, (int, Fraction)):
            return False  # b != 0 by construction
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def sign(self) -> int:
        """Exact sign of the real number ``a + b*sqrt(d)``."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sa == 0:
            return sb
        # opposite signs: compare a^2 with d b^2
        diff = self.a * self.a - self.d * self.b * self.b
        return sa if diff > 0 else sb

    def __lt__(self, other):
        if not isinstance(other, (int, Fraction, QuadraticNumber)):
            return NotImplemented
        diff = self - other
        if isinstance(diff, Fraction):
            return diff < 0
        return diff.sign() < 0

    def __float__(self):
        return float(self.a) + float(self.b) * self.d ** 0.5

    def __bool__(self):
        return True

    def __repr__(self):
        return f"QuadraticNumber({self.a!s}, {self.b!s}, {self.d})"

    def __str__(self):
        return format_scalar(self)


def _same_field(a, b, d: int) -> Scalar:
    """``a + b*sqrt(d)`` for an already squarefree ``d``."""
    if b == 0:
        return Fraction(a)
    return QuadraticNumber(Fraction(a), Fraction(b), d)


def quadratic(a, b, d: int) -> Scalar:
    """Build ``a + b*sqrt(d)``, normalizing to a Fraction when possible."""
    a, b = Fraction(a), Fraction(b)
    if d <= 0:
        raise ValueError("only real quadratic fields (d > 0) are supported")
    s, r = squarefree_decompose(d)
    b *= r
    if b == 0 or s == 1:
        return a + b
    return QuadraticNumber(a, b, s)


def sqrt_rational(q) -> Scalar:
    """Exact square root of a nonnegative rational, in Q or Q(sqrt(d))."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("square root of a negative rational is not real")
    if q == 0:
        return Fraction(0)
    # sqrt(p/q) = sqrt(p*q)/q
    n = q.numerator * q.denominator
    s, r = squarefree_decompose(n)
    return quadratic(0, Fraction(r, q.denominator), s) if s != 1 else Fraction(r, q.denominator)


def field_of(values) -> int | None:
    """Common ``d`` of a collection of scalars (``None`` if all rational)."""
    d = None
    for v in values:
        if isinstance(v, QuadraticNumber):
            if d is None:
                d = v.d
            elif d != v.d:
                raise FieldMismatchError(f"cannot mix sqrt({d}) and sqrt({v.d})")
    return d


def _format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_scalar(x: Scalar) -> str:
    """Canonical text: ``n``, ``n/d`` or ``a+b*sqrt(d)``."""
    if isinstance(x, QuadraticNumber):
        if x.b == 1:
            irr = f"sqrt({x.d})"
        elif x.b == -1:
            irr = f"-sqrt({x.d})"
        else:
            irr = f"{_format_rational(x.b)}*sqrt({x.d})"
        if x.a == 0:
            return irr
        sep = "" if irr.startswith("-") else "+"
        return f"{_format_rational(x.a)}{sep}{irr}"
    return _format_rational(Fraction(x))
