"""Sparse multivariate polynomials with exact coefficients.

A :class:`MultiPoly` pairs an ordered tuple of variable names with a map from
exponent tuples to nonzero scalars.  The core variables are ``d`` (the
derivation), ``l`` and ``m`` (the two spectral parameters); any other name is
a parameter (``a``, ``D``, ``t``, ...).  Values are immutable.

Binary operations between polynomials over different variable lists align the
lists by name: the result uses the left operand's variables followed by any
new names from the right operand.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Iterable, Mapping

from .field import QuadraticNumber, Scalar, as_scalar, format_scalar

CORE_VARS = ("d", "l", "m")


def _grlex_key(exp: tuple[int, ...]):
    # descending graded-lex: higher total degree first, then larger leading exponent
    return (-sum(exp), tuple(-e for e in exp))


class MultiPoly:
    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, vars: Iterable[str], terms: Mapping[tuple[int, ...], Scalar] | None = None):
        self.vars = tuple(vars)
        if len(set(self.vars)) != len(self.vars):
            raise ValueError(f"duplicate variable names in {self.vars}")
        clean: dict[tuple[int, ...], Scalar] = {}
        if terms:
            n = len(self.vars)
            for exp, c in terms.items():
                if len(exp) != n:
                    raise ValueError(f"exponent {exp} does not match variables {self.vars}")
                if c != 0:
                    clean[tuple(exp)] = c if isinstance(c, (Fraction, QuadraticNumber)) else as_scalar(c)
        self.terms = clean
        self._hash = None

    # -- constructors ----------------------------------------------------
    @classmethod
    def zero(cls, vars: Iterable[str] = ()) -> MultiPoly:
        return cls(vars)

    @classmethod
    def const(cls, c, vars: Iterable[str] = ()) -> MultiPoly:
        vars = tuple(vars)
        return cls(vars, {(0,) * len(vars): as_scalar(c)})

    @classmethod
    def var(cls, name: str, vars: Iterable[str] | None = None) -> MultiPoly:
        vars = tuple(vars) if vars is not None else (name,)
        if name not in vars:
            vars = vars + (name,)
        exp = tuple(1 if v == name else 0 for v in vars)
        return cls(vars, {exp: Fraction(1)})

    @classmethod
    def monomial(cls, vars: Iterable[str], exp: tuple[int, ...], c=1) -> MultiPoly:
        return cls(vars, {tuple(exp): as_scalar(c)})

    # -- alignment -------------------------------------------------------
    def with_vars(self, vars: Iterable[str]) -> MultiPoly:
        """Re-express over ``vars`` (must contain every variable actually used)."""
        vars = tuple(vars)
        if vars == self.vars:
            return self
        index = {v: i for i, v in enumerate(vars)}
        used = self.used_vars()
        missing = [v for v in used if v not in index]
        if missing:
            raise ValueError(f"variables {missing} not in target list {vars}")
        pos = [index.get(v) for v in self.vars]
        out = {}
        n = len(vars)
        for exp, c in self.terms.items():
            new = [0] * n
            for p, e in zip(pos, exp):
                if e:
                    new[p] = e
            out[tuple(new)] = c
        return MultiPoly(vars, out)

    def used_vars(self) -> tuple[str, ...]:
        used = [False] * len(self.vars)
        for exp in self.terms:
            for i, e in enumerate(exp):
                if e:
                    used[i] = True
        return tuple(v for v, u in zip(self.vars, used) if u)

    def _align(self, other) -> tuple[MultiPoly, MultiPoly]:
        if not isinstance(other, MultiPoly):
            other = MultiPoly.const(other, self.vars)
        if other.vars == self.vars:
            return self, other
        merged = self.vars + tuple(v for v in other.vars if v not in self.vars)
        return self.with_vars(merged), other.with_vars(merged)

    # -- ring operations -------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, (MultiPoly, int, Fraction, QuadraticNumber)):
            return NotImplemented
        p, q = self._align(other)
        out = dict(p.terms)
        for exp, c in q.terms.items():
            v = out.get(exp)
            s = c if v is None else v + c
            if s == 0:
                out.pop(exp, None)
            else:
                out[exp] = s
        return MultiPoly._raw(p.vars, out)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return MultiPoly._raw(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, (MultiPoly, int, Fraction, QuadraticNumber)):
            return NotImplemented
        if not isinstance(other, MultiPoly):
            other = MultiPoly.const(other, self.vars)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, QuadraticNumber)):
            return self.scale(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        p, q = self._align(other)
        if not p.terms or not q.terms:
            return MultiPoly._raw(p.vars, {})
        out: dict = {}
        for e1, c1 in p.terms.items():
            for e2, c2 in q.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e)
                out[e] = c1 * c2 if v is None else v + c1 * c2
        return MultiPoly._raw(p.vars, {e: c for e, c in out.items() if c != 0})

    def __rmul__(self, other):
        return self.__mul__(other)

    def scale(self, c) -> MultiPoly:
        c = as_scalar(c)
        if c == 0:
            return MultiPoly._raw(self.vars, {})
        return MultiPoly._raw(self.vars, {e: v * c for e, v in self.terms.items()})

    def __truediv__(self, c):
        if isinstance(c, MultiPoly):
            return NotImplemented
        return self.scale(1 / as_scalar(c))

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out = MultiPoly.const(1, self.vars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    @classmethod
    def _raw(cls, vars, terms):
        obj = cls.__new__(cls)
        obj.vars = vars
        obj.terms = terms
        obj._hash = None
        return obj

    # -- comparison ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _normal(self):
        used = self.used_vars()
        p = self.with_vars(used) if used != self.vars else self
        return used, p.terms

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, QuadraticNumber)):
            other = MultiPoly.const(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        if self.vars == other.vars:
            return self.terms == other.terms
        return self._normal() == other._normal()

    def __hash__(self):
        if self._hash is None:
            used, terms = self._normal()
            self._hash = hash((used, frozenset(terms.items())))
        return self._hash

    # -- structure -------------------------------------------------------
    def _index(self, var: str) -> int:
        try:
            return self.vars.index(var)
        except ValueError:
            raise KeyError(f"unknown variable {var!r}; have {self.vars}") from None

    def degree(self, var: str | None = None) -> int:
        """Total degree, or degree in one variable.  The zero polynomial has degree -1."""
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        if var not in self.vars:
            return 0
        i = self._index(var)
        return max(e[i] for e in self.terms)

    def total_degree(self, vars: Iterable[str]) -> int:
        idx = [self._index(v) for v in vars if v in self.vars]
        if not self.terms:
            return -1
        return max(sum(e[i] for i in idx) for e in self.terms)

    def constant_term(self) -> Scalar:
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Scalar]]:
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]))

    def coefficients(self, vars: Iterable[str]) -> dict[tuple[int, ...], MultiPoly]:
        """Split as ``sum over exponents e in vars of coeff_e * vars^e``.

        Returned coefficients live over the remaining variables.
        """
        vars = tuple(vars)
        idx = [self._index(v) for v in vars]
        rest = [i for i in range(len(self.vars)) if i not in idx]
        rest_vars = tuple(self.vars[i] for i in rest)
        out: dict[tuple[int, ...], dict] = {}
        for exp, c in self.terms.items():
            key = tuple(exp[i] for i in idx)
            out.setdefault(key, {})[tuple(exp[i] for i in rest)] = c
        return {k: MultiPoly._raw(rest_vars, v) for k, v in out.items()}

    def coefficient(self, var: str, k: int) -> MultiPoly:
        """Coefficient of ``var**k``, as a polynomial over the same variable list."""
        i = self._index(var)
        return MultiPoly._raw(
            self.vars,
            {e[:i] + (0,) + e[i + 1:]: c for e, c in self.terms.items() if e[i] == k},
        )

    def homogeneous_components(self, vars: Iterable[str]) -> dict[int, MultiPoly]:
        vars = tuple(vars)
        if not vars:
            raise ValueError("need at least one grading variable")
        idx = [self._index(v) for v in vars]
        out: dict[int, dict] = {}
        for exp, c in self.terms.items():
            out.setdefault(sum(exp[i] for i in idx), {})[exp] = c
        return {k: MultiPoly._raw(self.vars, v) for k, v in sorted(out.items())}

    def is_homogeneous(self, vars: Iterable[str], degree: int | None = None) -> bool:
        comps = self.homogeneous_components(vars)
        if not comps:
            return True
        if len(comps) > 1:
            return False
        return degree is None or next(iter(comps)) == degree

    # -- substitution ----------------------------------------------------
    def subs(self, var: str, by) -> MultiPoly:
        """Substitute ``var -> by`` (a polynomial or scalar); a ring homomorphism."""
        if var not in self.vars:
            raise KeyError(f"unknown variable {var!r}; have {self.vars}")
        if not isinstance(by, MultiPoly):
            by = MultiPoly.const(by, self.vars)
        p, by = self._align(by)
        i = p._index(var)
        if by.is_constant():
            c = by.constant_term()
            out: dict = {}
            for exp, v in p.terms.items():
                e = exp[:i] + (0,) + exp[i + 1:]
                w = v * c ** exp[i] if exp[i] else v
                s = out.get(e, 0) + w
                if s == 0:
                    out.pop(e, None)
                else:
                    out[e] = s
            return MultiPoly._raw(p.vars, out)
        if not p.terms:
            return p
        groups: dict[int, dict] = {}
        for exp, v in p.terms.items():
            groups.setdefault(exp[i], {})[exp[:i] + (0,) + exp[i + 1:]] = v
        result = MultiPoly._raw(p.vars, {})
        power = MultiPoly.const(1, p.vars)
        for k in range(max(groups) + 1):
            if k in groups:
                result = result + MultiPoly._raw(p.vars, groups[k]) * power
            power = power * by
        return result

    def shift(self, var: str, by) -> MultiPoly:
        """Alias of :meth:`subs`, named for the ``d -> d + l`` use."""
        return self.subs(var, by)

    def subs_many(self, values: Mapping[str, object]) -> MultiPoly:
        """Simultaneous substitution of several variables."""
        values = {k: v for k, v in values.items() if k in self.vars}
        if not values:
            return self
        if all(not isinstance(v, MultiPoly) or v.is_constant() for v in values.values()):
            p = self
            for k, v in values.items():
                p = p.subs(k, v)
            return p
        # route through fresh names so replacements cannot capture each other
        p = self
        fresh = {}
        for k in values:
            f = f"__{k}__"
            fresh[k] = f
            p = p.rename({k: f})
        for k, v in values.items():
            p = p.subs(fresh[k], v)
        return p.drop_unused({fresh[k] for k in values})

    def rename(self, mapping: Mapping[str, str]) -> MultiPoly:
        new = tuple(mapping.get(v, v) for v in self.vars)
        return MultiPoly._raw(new, dict(self.terms))

    def drop_unused(self, names: Iterable[str]) -> MultiPoly:
        used = set(self.used_vars())
        keep = tuple(v for v in self.vars if v not in names or v in used)
        return self.with_vars(keep)

    def evaluate(self, values: Mapping[str, object]) -> Scalar:
        """Full evaluation to a scalar; every used variable must be given."""
        total: Scalar = Fraction(0)
        vals = []
        for v in self.vars:
            vals.append(as_scalar(values[v]) if v in values else None)
        for exp, c in self.terms.items():
            t = c
            for x, e in zip(vals, exp):
                if e:
                    if x is None:
                        raise KeyError("missing value for a used variable")
                    t = t * x ** e
            total = total + t
        return total

    def map_coefficients(self, fn) -> MultiPoly:
        return MultiPoly(self.vars, {e: fn(c) for e, c in self.terms.items()})

    # -- printing --------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exp, c in self.sorted_terms():
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(self.vars, exp) if e
            )
            neg = False
            if isinstance(c, QuadraticNumber):
                cs = f"({format_scalar(c)})"
            else:
                neg = c < 0
                cs = format_scalar(-c if neg else c)
            if mono:
                body = mono if cs == "1" else f"{cs}*{mono}"
            else:
                body = cs
            parts.append(("-" if neg else "+", body))
        sign, body = parts[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"MultiPoly({self.vars}, '{self}')"


def poly(expr: str, *vars: str) -> MultiPoly:
    """Convenience: parse ``expr`` with core variables plus ``vars`` as parameters."""
    from .cli.parser import parse_poly_expr

    return parse_poly_expr(expr, params=vars)


def var(name: str) -> MultiPoly:
    return MultiPoly.var(name)


def binomial_poly(x: MultiPoly, j: int) -> MultiPoly:
    """``x (x-1) ... (x-j+1) / j!`` as a polynomial in ``x``'s variables."""
    out = MultiPoly.const(1, x.vars)
    for i in range(j):
        out = out * (x - i)
    return out.scale(Fraction(1, _factorial(j)))


def falling(x: MultiPoly, j: int) -> MultiPoly:
    out = MultiPoly.const(1, x.vars)
    for i in range(j):
        out = out * (x - i)
    return out


def _factorial(n: int) -> int:
    r = 1
    for k in range(2, n + 1):
        r *= k
    return r


# -- univariate helpers ---------------------------------------------------

def univariate_coeffs(p: MultiPoly, var: str) -> list[Scalar]:
    """Dense coefficient list (index = power) of a univariate polynomial."""
    extra = [v for v in p.used_vars() if v != var]
    if extra:
        raise ValueError(f"polynomial is not univariate in {var!r}: also uses {extra}")
    if p.is_zero():
        return []
    if var not in p.vars:
        return [p.constant_term()]
    i = p.vars.index(var)
    n = p.degree(var)
    out: list[Scalar] = [Fraction(0)] * (n + 1)
    for exp, c in p.terms.items():
        out[exp[i]] = c
    return out


def from_univariate(coeffs: Iterable, var: str) -> MultiPoly:
    return MultiPoly((var,), {(k,): c for k, c in enumerate(coeffs) if c != 0})


def univariate_divmod(p: MultiPoly, q: MultiPoly, var: str) -> tuple[MultiPoly, MultiPoly]:
    a = list(univariate_coeffs(p, var))
    b = univariate_coeffs(q, var)
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    quot = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        c = a[-1] / lead
        quot[k] = c
        for i, bc in enumerate(b):
            a[k + i] = a[k + i] - c * bc
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    return from_univariate(quot, var), from_univariate(a, var)


def univariate_gcd(p: MultiPoly, q: MultiPoly, var: str) -> MultiPoly:
    """Monic gcd over the coefficient field (zero if both are zero)."""
    while not q.is_zero():
        p, q = q, univariate_divmod(p, q, var)[1]
    if p.is_zero():
        return p
    c = univariate_coeffs(p, var)
    return p.scale(1 / c[-1]).with_vars((var,))


def binomial(n: int, k: int) -> int:
    return comb(n, k) if 0 <= k <= n else 0
