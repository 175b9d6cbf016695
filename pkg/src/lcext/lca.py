"""Lie conformal algebras given by lambda-bracket tables, and Novikov algebras.

A bracket table stores, for every ordered pair of generators ``(g_i, g_j)``,
the coefficient vector ``P_ij = (P_ij1, ..., P_ijr)`` of polynomials in
``d`` (the derivation) and ``l`` (lambda) with ``[g_i _l g_j] = sum_k
P_ijk(d, l) g_k``.  Full tables are stored and skew-symmetry is checked
rather than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

from .poly import MultiPoly

D, LAM, MU = "d", "l", "m"
DL = (D, LAM)
DLM = (D, LAM, MU)


class IncompleteTableError(ValueError):
    pass


class NotNovikovError(ValueError):
    def __init__(self, message: str, report: "NovikovReport"):
        super().__init__(message)
        self.report = report


def _v(name: str, vars=DLM) -> MultiPoly:
    return MultiPoly.var(name, vars)


@dataclass(frozen=True)
class ConformalAlgebra:
    name: str
    generators: tuple[str, ...]
    table: Mapping[tuple[int, int], tuple[MultiPoly, ...]]

    def __post_init__(self):
        r = len(self.generators)
        missing = [(i, j) for i in range(r) for j in range(r) if (i, j) not in self.table]
        if missing:
            pairs = ", ".join(f"{self.generators[i]},{self.generators[j]}" for i, j in missing)
            raise IncompleteTableError(f"bracket table of {self.name!r} is missing entries: {pairs}")
        fixed = {}
        for key, vec in self.table.items():
            if len(vec) != r:
                raise ValueError(f"bracket entry {key} has {len(vec)} components, expected {r}")
            fixed[key] = tuple(p.with_vars(DL) if isinstance(p, MultiPoly) else MultiPoly.const(p, DL) for p in vec)
        object.__setattr__(self, "table", fixed)

    @property
    def rank(self) -> int:
        return len(self.generators)

    def index(self, name: str | int) -> int:
        if isinstance(name, int):
            if not 0 <= name < self.rank:
                raise IndexError(f"generator index {name} out of range")
            return name
        try:
            return self.generators.index(name)
        except ValueError:
            raise IndexError(f"unknown generator {name!r}") from None

    def bracket(self, a: str | int, b: str | int) -> tuple[MultiPoly, ...]:
        return self.table[(self.index(a), self.index(b))]

    @classmethod
    def from_strings(cls, name: str, generators: Sequence[str], brackets: Mapping[str, Mapping[str, str]]):
        """Build from ``{"A,B": {"C": "<poly in d,l>"}}``; absent pairs are zero."""
        from .cli.parser import parse_poly_expr

        gens = tuple(generators)
        table = {}
        for i in range(len(gens)):
            for j in range(len(gens)):
                table[(i, j)] = tuple(MultiPoly.zero(DL) for _ in gens)
        for key, entry in brackets.items():
            a, b = [s.strip() for s in key.split(",")]
            i, j = gens.index(a), gens.index(b)
            vec = list(table[(i, j)])
            for g, expr in entry.items():
                vec[gens.index(g)] = parse_poly_expr(expr, variables=DL)
            table[(i, j)] = tuple(vec)
        return cls(name, gens, table)

    def same_table(self, other: "ConformalAlgebra") -> bool:
        return self.rank == other.rank and all(
            self.table[k] == other.table[k] for k in self.table
        )


# -- built-in algebras ------------------------------------------------------

def algebra_R() -> ConformalAlgebra:
    """Rank-2 algebra on L, I with [L_l L] = (d+2l)(L+I), [L_l I] = (d+l)I, [I_l L] = lI."""
    d, l = MultiPoly.var(D, DL), MultiPoly.var(LAM, DL)
    z = MultiPoly.zero(DL)
    return ConformalAlgebra(
        "R",
        ("L", "I"),
        {
            (0, 0): (d + 2 * l, d + 2 * l),
            (0, 1): (z, d + l),
            (1, 0): (z, l),
            (1, 1): (z, z),
        },
    )


def algebra_virasoro() -> ConformalAlgebra:
    d, l = MultiPoly.var(D, DL), MultiPoly.var(LAM, DL)
    return ConformalAlgebra("Vir", ("L",), {(0, 0): (d + 2 * l,)})


def algebra_abelian(rank: int = 1, names: Sequence[str] | None = None) -> ConformalAlgebra:
    names = tuple(names) if names else tuple(f"a{i + 1}" for i in range(rank))
    z = MultiPoly.zero(DL)
    return ConformalAlgebra(
        "abelian", names, {(i, j): tuple(z for _ in names) for i in range(rank) for j in range(rank)}
    )


# -- axioms ----------------------------------------------------------------

@dataclass
class AxiomReport:
    skew_ok: bool
    jacobi_ok: bool
    witnesses: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.skew_ok and self.jacobi_ok


def skew_residual(A: ConformalAlgebra, i: int, j: int) -> tuple[MultiPoly, ...]:
    """``[g_i _l g_j] + [g_j _{-l-d} g_i]`` componentwise."""
    d, l = MultiPoly.var(D, DL), MultiPoly.var(LAM, DL)
    ij, ji = A.table[(i, j)], A.table[(j, i)]
    # lambda -> -lambda - d; the d here is the operator acting on the result
    return tuple(p + q.subs(LAM, -l - d) for p, q in zip(ij, ji))


def jacobi_residual(A: ConformalAlgebra, a: int, b: int, c: int) -> tuple[MultiPoly, ...]:
    """``[a_l [b_m c]] - [[a_l b]_{l+m} c] - [b_m [a_l c]]`` in variables d, l, m.

    Mechanics, per sesquilinearity:
      * ``[a_l (Q(d) g)] = Q(d + l) [a_l g]``  (right action shifts d by l)
      * ``[(P(d) g)_n c] = P(-n) [g_n c]``     (left action sends d to -n)
    """
    r = A.rank
    d, l, m = _v(D), _v(LAM), _v(MU)
    T = {k: tuple(p.with_vars(DLM) for p in v) for k, v in A.table.items()}

    def at_mu(vec):  # rename lambda -> mu
        return tuple(p.subs(LAM, m) for p in vec)

    zero = MultiPoly.zero(DLM)
    out = [zero] * r
    # [a_l [b_m c]]
    inner = at_mu(T[(b, c)])
    for k in range(r):
        if inner[k].is_zero():
            continue
        coef = inner[k].subs(D, d + l)
        for s, p in enumerate(T[(a, k)]):
            if p:
                out[s] = out[s] + coef * p
    # [[a_l b]_{l+m} c]
    ab = T[(a, b)]
    for k in range(r):
        if ab[k].is_zero():
            continue
        coef = ab[k].subs(D, -l - m)
        for s, p in enumerate(T[(k, c)]):
            if p:
                out[s] = out[s] - coef * p.subs(LAM, l + m)
    # [b_m [a_l c]]
    ac = T[(a, c)]
    for k in range(r):
        if ac[k].is_zero():
            continue
        coef = ac[k].subs(D, d + m)
        for s, p in enumerate(at_mu(T[(b, k)])):
            if p:
                out[s] = out[s] - coef * p
    return tuple(out)


def check_axioms(A: ConformalAlgebra) -> AxiomReport:
    """Skew-symmetry on all ordered pairs and Jacobi on all ordered triples."""
    r = A.rank
    witnesses = []
    skew_ok = True
    for i in range(r):
        for j in range(r):
            res = skew_residual(A, i, j)
            if any(res):
                skew_ok = False
                witnesses.append(
                    {"axiom": "skew", "generators": (A.generators[i], A.generators[j]), "residual": res}
                )
    jacobi_ok = True
    for a in range(r):
        for b in range(r):
            for c in range(r):
                res = jacobi_residual(A, a, b, c)
                if any(res):
                    if jacobi_ok:
                        witnesses.append(
                            {
                                "axiom": "jacobi",
                                "generators": (A.generators[a], A.generators[b], A.generators[c]),
                                "residual": res,
                            }
                        )
                    jacobi_ok = False
    return AxiomReport(skew_ok, jacobi_ok, witnesses)


def jproducts(A: ConformalAlgebra, i, j) -> list[tuple[MultiPoly, ...]]:
    """``g_i (n) g_j`` for n = 0, 1, ...: n! times the l^n coefficient vector."""
    vec = A.bracket(i, j)
    top = max((p.degree(LAM) for p in vec), default=-1)
    out = []
    for n in range(top + 1):
        out.append(
            tuple(p.coefficient(LAM, n).with_vars((D,)).scale(factorial(n)) if p else MultiPoly.zero((D,)) for p in vec)
        )
    return out


def bracket_from_jproducts(prods: Sequence[Sequence[MultiPoly]], rank: int) -> tuple[MultiPoly, ...]:
    l = MultiPoly.var(LAM, DL)
    out = [MultiPoly.zero(DL)] * rank
    for n, vec in enumerate(prods):
        w = l ** n * Fraction(1, factorial(n))
        for k, p in enumerate(vec):
            out[k] = out[k] + p.with_vars(DL) * w
    return tuple(out)


# -- Novikov algebras --------------------------------------------------------

@dataclass(frozen=True)
class NovikovAlgebra:
    """Structure constants ``c[i][j][k]`` with ``e_i e_j = sum_k c[i][j][k] e_k``."""

    basis: tuple[str, ...]
    constants: tuple[tuple[tuple[Fraction, ...], ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @classmethod
    def from_products(cls, basis: Sequence[str], products: Mapping[tuple[str, str], Mapping[str, object]]):
        basis = tuple(basis)
        n = len(basis)
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for (a, b), combo in products.items():
            i, j = basis.index(a), basis.index(b)
            for g, v in combo.items():
                c[i][j][basis.index(g)] = Fraction(v)
        return cls(basis, tuple(tuple(tuple(x) for x in row) for row in c))

    def mul(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> list[Fraction]:
        n = self.dim
        out = [Fraction(0)] * n
        for i in range(n):
            if not x[i]:
                continue
            for j in range(n):
                if not y[j]:
                    continue
                w = x[i] * y[j]
                for k in range(n):
                    ck = self.constants[i][j][k]
                    if ck:
                        out[k] += w * ck
        return out

    def unit(self, i: int) -> list[Fraction]:
        v = [Fraction(0)] * self.dim
        v[i] = Fraction(1)
        return v


def novikov_algebra_N() -> NovikovAlgebra:
    """e1e1 = 0, e1e2 = e1, e2e1 = 0, e2e2 = e1 + e2."""
    return NovikovAlgebra.from_products(
        ("e1", "e2"),
        {("e1", "e2"): {"e1": 1}, ("e2", "e2"): {"e1": 1, "e2": 1}},
    )


@dataclass
class NovikovReport:
    left_sym_ok: bool
    right_sym_ok: bool
    witnesses: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.left_sym_ok and self.right_sym_ok


def novikov_check(N: NovikovAlgebra) -> NovikovReport:
    """(ab)c - a(bc) = (ba)c - b(ac) and (ab)c = (ac)b on all basis triples."""
    n = N.dim
    left_ok = right_ok = True
    witnesses = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                a, b, c = N.unit(i), N.unit(j), N.unit(k)
                ab_c = N.mul(N.mul(a, b), c)
                lhs = [x - y for x, y in zip(ab_c, N.mul(a, N.mul(b, c)))]
                rhs = [x - y for x, y in zip(N.mul(N.mul(b, a), c), N.mul(b, N.mul(a, c)))]
                triple = (N.basis[i], N.basis[j], N.basis[k])
                if lhs != rhs:
                    if left_ok:
                        witnesses.append({"identity": "left-symmetry", "triple": triple, "lhs": lhs, "rhs": rhs})
                    left_ok = False
                ac_b = N.mul(N.mul(a, c), b)
                if ab_c != ac_b:
                    if right_ok:
                        witnesses.append({"identity": "right-commutativity", "triple": triple, "lhs": ab_c, "rhs": ac_b})
                    right_ok = False
    return NovikovReport(left_ok, right_ok, witnesses)


def novikov_bracket_table(N: NovikovAlgebra) -> dict[tuple[int, int], tuple[MultiPoly, ...]]:
    """Closed form ``[a_l b] = d(b a) + l(a b + b a)`` without any axiom check."""
    n = N.dim
    d, l = MultiPoly.var(D, DL), MultiPoly.var(LAM, DL)
    table = {}
    for i in range(n):
        for j in range(n):
            ab = N.constants[i][j]
            ba = N.constants[j][i]
            table[(i, j)] = tuple(d * ba[k] + l * (ab[k] + ba[k]) for k in range(n))
    return table


def novikov_to_conformal(
    N: NovikovAlgebra, names: Sequence[str] | None = None, name: str = "novikov"
) -> ConformalAlgebra:
    report = novikov_check(N)
    if not report.ok:
        w = report.witnesses[0]
        raise NotNovikovError(f"{w['identity']} fails on {w['triple']}", report)
    return ConformalAlgebra(name, tuple(names) if names else N.basis, novikov_bracket_table(N))


def loop_bracket(N: NovikovAlgebra, i: int, j: int, m: int, n: int) -> dict[tuple[int, int], Fraction]:
    """``[e_i[m], e_j[n]] = (m+1)(e_i e_j)[m+n] - (n+1)(e_j e_i)[m+n]`` as {(k, index): coeff}."""
    out = {}
    for k in range(N.dim):
        c = (m + 1) * N.constants[i][j][k] - (n + 1) * N.constants[j][i][k]
        if c:
            out[(k, m + n)] = Fraction(c)
    return out
