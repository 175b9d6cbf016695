"""Annihilation algebras: graded mode families, finite truncations, solvability.

A mode family assigns to each generator X a sequence X_m (m an integer) and
expresses ``[X_i[m], X_j[n]]`` as a sum of ``c(m, n) X_k[m + n - s]`` where
the coefficients are polynomials in the symbolic indices.  Treating m, n, k
as polynomial variables lets one Jacobi check cover every integer triple.

For a conformal algebra the modes are ``X_m = X_(m+1)``, the (m+1)-th
coefficient of the formal distribution, so that the non-negative modes span
the annihilation algebra and ``[d, X_m] = -(m+1) X_{m-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .lca import ConformalAlgebra, NovikovAlgebra, jproducts, loop_bracket
from .linalg import Row, in_span, rref
from .poly import MultiPoly, binomial_poly, falling

IDX = ("m", "n", "k")


def _iv(name: str) -> MultiPoly:
    return MultiPoly.var(name, IDX)


def _ip(p) -> MultiPoly:
    if not isinstance(p, MultiPoly):
        return MultiPoly.const(p, IDX)
    return p.with_vars(IDX)


@dataclass(frozen=True)
class ModeTerm:
    """``coeff * X_target[index - shift]`` where index is the sum of the input indices."""

    target: int
    shift: int
    coeff: MultiPoly


@dataclass
class GradedLieFamily:
    """Bracket coefficients of a mode algebra as polynomials in the indices.

    ``brackets[(i, j)]`` lists the terms of ``[X_i[m], X_j[n]]`` with
    coefficients in (m, n).  ``derivation[i]``, when present, lists the terms
    of ``[d, X_i[m]]`` with coefficients in m and index ``m - shift``.
    """

    name: str
    families: tuple[str, ...]
    brackets: dict[tuple[int, int], tuple[ModeTerm, ...]]
    derivation: dict[int, tuple[ModeTerm, ...]] | None = None

    def __post_init__(self):
        r = len(self.families)
        for i in range(r):
            for j in range(r):
                self.brackets.setdefault((i, j), ())
        self.brackets = {key: _normalize_terms(t) for key, t in self.brackets.items()}
        if self.derivation is not None:
            self.derivation = {i: _normalize_terms(self.derivation.get(i, ())) for i in range(r)}

    @property
    def rank(self) -> int:
        return len(self.families)

    def index(self, name: str | int) -> int:
        return name if isinstance(name, int) else self.families.index(name)

    def bracket_at(self, i: int, j: int, m: int, n: int) -> dict[tuple[int, int], Fraction]:
        """Numeric ``[X_i[m], X_j[n]]`` as ``{(family, index): coeff}``."""
        out: dict = {}
        for t in self.brackets[(i, j)]:
            c = t.coeff.evaluate({"m": m, "n": n, "k": 0})
            if c:
                key = (t.target, m + n - t.shift)
                out[key] = out.get(key, 0) + c
        return {k: v for k, v in out.items() if v}

    def derivation_at(self, i: int, m: int) -> dict[tuple[int, int], Fraction]:
        out: dict = {}
        for t in (self.derivation or {}).get(i, ()):
            c = t.coeff.evaluate({"m": m, "n": 0, "k": 0})
            if c:
                key = (t.target, m - t.shift)
                out[key] = out.get(key, 0) + c
        return {k: v for k, v in out.items() if v}

    def same_brackets(self, other: "GradedLieFamily") -> bool:
        return (
            self.families == other.families
            and self.brackets == other.brackets
            and self.derivation == other.derivation
        )

    def relations(self) -> dict[str, str]:
        """Canonical text of every bracket, e.g. ``"[L_m,I_n]": "(-n - 1)*I_{m+n}"``."""
        out = {}
        for (i, j), terms in sorted(self.brackets.items()):
            key = f"[{self.families[i]}_m,{self.families[j]}_n]"
            out[key] = _render(terms, self.families, "m+n")
        if self.derivation is not None:
            for i, terms in sorted(self.derivation.items()):
                out[f"[d,{self.families[i]}_m]"] = _render(terms, self.families, "m")
        return out


def _normalize_terms(terms) -> tuple[ModeTerm, ...]:
    acc: dict[tuple[int, int], MultiPoly] = {}
    for t in terms:
        key = (t.target, t.shift)
        acc[key] = acc.get(key, MultiPoly.zero(IDX)) + _ip(t.coeff)
    return tuple(ModeTerm(k, s, c) for (k, s), c in sorted(acc.items()) if c)


def _render(terms, names, base: str) -> str:
    if not terms:
        return "0"
    parts = []
    for t in terms:
        idx = base if t.shift == 0 else f"{base}{-t.shift:+d}"
        parts.append(f"({t.coeff.drop_unused(IDX)})*{names[t.target]}_{{{idx}}}")
    return " + ".join(parts)


def family_from_conformal(A: ConformalAlgebra) -> GradedLieFamily:
    """Mode family of ``A`` from the commutator formula for j-products.

    ``[a_(p), b_(q)] = sum_j C(p, j) (a_(j) b)_(p+q-j)`` together with
    ``(d^e c)_(r) = (-1)^e r(r-1)...(r-e+1) c_(r-e)``, rewritten for the
    modes ``X_m = X_(m+1)``.
    """
    m, n = _iv("m"), _iv("n")
    brackets: dict = {}
    for i in range(A.rank):
        for j in range(A.rank):
            terms = []
            for jj, vec in enumerate(jproducts(A, i, j)):
                choose = binomial_poly(m + 1, jj)
                for k, p in enumerate(vec):
                    for (e,), c in p.coefficients(("d",)).items():
                        c0 = c.constant_term()
                        coeff = choose * falling(m + n + 2 - jj, e) * ((-1) ** e * c0)
                        terms.append(ModeTerm(k, jj + e - 1, coeff))
            brackets[(i, j)] = tuple(terms)
    derivation = {i: (ModeTerm(i, 1, -(m + 1)),) for i in range(A.rank)}
    return GradedLieFamily(f"modes({A.name})", A.generators, brackets, derivation)


def family_R_relations() -> GradedLieFamily:
    """The mode relations of R written out by hand (L, I order).

    ``[L_m, L_n] = (m-n)(L_{m+n} + I_{m+n})``, ``[L_m, I_n] = -(n+1) I_{m+n}``,
    ``[I_m, L_n] = (m+1) I_{m+n}``, ``[I_m, I_n] = 0``, ``[d, X_m] = -(m+1) X_{m-1}``.
    """
    m, n = _iv("m"), _iv("n")
    L, I = 0, 1
    return GradedLieFamily(
        "R modes",
        ("L", "I"),
        {
            (L, L): (ModeTerm(L, 0, m - n), ModeTerm(I, 0, m - n)),
            (L, I): (ModeTerm(I, 0, -(n + 1)),),
            (I, L): (ModeTerm(I, 0, m + 1),),
            (I, I): (),
        },
        {L: (ModeTerm(L, 1, -(m + 1)),), I: (ModeTerm(I, 1, -(m + 1)),)},
    )


def family_witt() -> GradedLieFamily:
    m, n = _iv("m"), _iv("n")
    return GradedLieFamily(
        "Witt", ("L",), {(0, 0): (ModeTerm(0, 0, m - n),)}, {0: (ModeTerm(0, 1, -(m + 1)),)}
    )


def family_abelian(names: Sequence[str] = ("A",)) -> GradedLieFamily:
    return GradedLieFamily("abelian", tuple(names), {}, None)


# -- symbolic Jacobi ---------------------------------------------------------------

Element = dict  # (family, index polynomial) -> coefficient polynomial, both over IDX


def _add_into(acc: Element, key, c: MultiPoly) -> None:
    s = acc.get(key)
    s = c if s is None else s + c
    if s:
        acc[key] = s
    else:
        acc.pop(key, None)


def _bracket_sym(F: GradedLieFamily, x: Element, y: Element) -> Element:
    out: Element = {}
    for (i, a), cx in x.items():
        for (j, b), cy in y.items():
            for t in F.brackets[(i, j)]:
                c = t.coeff.subs_many({"m": a, "n": b})
                if c:
                    _add_into(out, (t.target, a + b - t.shift), cx * cy * c)
    return out


def _derive_sym(F: GradedLieFamily, x: Element) -> Element:
    out: Element = {}
    for (i, a), cx in x.items():
        for t in F.derivation.get(i, ()):
            c = t.coeff.subs("m", a)
            if c:
                _add_into(out, (t.target, a - t.shift), cx * c)
    return out


def _gen(i: int, var: str) -> Element:
    return {(i, _iv(var)): MultiPoly.const(1, IDX)}


def _sum(*els: Element) -> Element:
    out: Element = {}
    for e in els:
        for key, c in e.items():
            _add_into(out, key, c)
    return out


def _neg(e: Element) -> Element:
    return {k: -c for k, c in e.items()}


def _show(F: GradedLieFamily, e: Element) -> dict[str, str]:
    return {f"{F.families[k]}_{{{idx.drop_unused(IDX)}}}": str(c.drop_unused(IDX)) for (k, idx), c in sorted(e.items(), key=lambda kv: (kv[0][0], str(kv[0][1])))}


@dataclass
class GradedJacobiReport:
    antisymmetry_ok: bool
    jacobi_ok: bool
    derivation_ok: bool | None
    witnesses: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.antisymmetry_ok and self.jacobi_ok and self.derivation_ok is not False


def check_graded_jacobi(F: GradedLieFamily) -> GradedJacobiReport:
    """Antisymmetry, Jacobi and (if present) the derivation rule, with symbolic m, n, k."""
    r = F.rank
    names = F.families
    report = GradedJacobiReport(True, True, None)
    for i in range(r):
        for j in range(i, r):
            res = _sum(_bracket_sym(F, _gen(i, "m"), _gen(j, "n")), _bracket_sym(F, _gen(j, "n"), _gen(i, "m")))
            if res:
                report.antisymmetry_ok = False
                report.witnesses.append({"check": "antisymmetry", "triple": [names[i], names[j]], "residual": _show(F, res)})
    for i in range(r):
        for j in range(r):
            for k in range(r):
                x, y, z = _gen(i, "m"), _gen(j, "n"), _gen(k, "k")
                res = _sum(
                    _bracket_sym(F, x, _bracket_sym(F, y, z)),
                    _bracket_sym(F, y, _bracket_sym(F, z, x)),
                    _bracket_sym(F, z, _bracket_sym(F, x, y)),
                )
                if res:
                    report.jacobi_ok = False
                    report.witnesses.append({"check": "jacobi", "triple": [names[i], names[j], names[k]], "residual": _show(F, res)})
    if F.derivation is not None:
        report.derivation_ok = True
        for i in range(r):
            for j in range(r):
                x, y = _gen(i, "m"), _gen(j, "n")
                res = _sum(
                    _derive_sym(F, _bracket_sym(F, x, y)),
                    _neg(_bracket_sym(F, _derive_sym(F, x), y)),
                    _neg(_bracket_sym(F, x, _derive_sym(F, y))),
                )
                if res:
                    report.derivation_ok = False
                    report.witnesses.append({"check": "derivation", "triple": [names[i], names[j]], "residual": _show(F, res)})
    return report


# -- finite truncations ------------------------------------------------------------

@dataclass
class FiniteLieAlgebra:
    """Structure constants on a labelled basis: ``table[(a, b)] = {c: coeff}``."""

    labels: tuple[str, ...]
    table: dict[tuple[int, int], dict[int, Fraction]]

    @property
    def dim(self) -> int:
        return len(self.labels)

    def bracket(self, x: Row, y: Row) -> Row:
        out: Row = {}
        for a, ca in x.items():
            for b, cb in y.items():
                for c, v in self.table.get((a, b), {}).items():
                    s = out.get(c, 0) + ca * cb * v
                    if s:
                        out[c] = s
                    else:
                        out.pop(c, None)
        return out

    def basis_vector(self, a: int) -> Row:
        return {a: Fraction(1)}

    def check(self) -> tuple[bool, bool, list]:
        """(antisymmetry_ok, jacobi_ok, first failing basis tuples)."""
        e = self.basis_vector
        witnesses = []
        anti = True
        for a in range(self.dim):
            for b in range(a, self.dim):
                s = self.bracket(e(a), e(b))
                t = self.bracket(e(b), e(a))
                if any(s.get(c, 0) + t.get(c, 0) for c in set(s) | set(t)):
                    anti = False
                    witnesses.append((self.labels[a], self.labels[b]))
                    break
            if not anti:
                break
        jac = True
        for a in range(self.dim):
            for b in range(a + 1, self.dim):
                ab = self.bracket(e(a), e(b))
                for c in range(b + 1, self.dim):
                    total: Row = {}
                    for part in (
                        self.bracket(ab, e(c)),
                        self.bracket(self.bracket(e(b), e(c)), e(a)),
                        self.bracket(self.bracket(e(c), e(a)), e(b)),
                    ):
                        for key, v in part.items():
                            total[key] = total.get(key, 0) + v
                    if any(total.values()):
                        jac = False
                        witnesses.append((self.labels[a], self.labels[b], self.labels[c]))
                        return anti, jac, witnesses
        return anti, jac, witnesses


class TruncationError(ValueError):
    pass


def _label(F: GradedLieFamily, k: int, t: int) -> str:
    return f"{F.families[k]}{t}"


def _position(F: GradedLieFamily, k: int, t: int) -> int:
    return t * F.rank + k


def build_truncation(F: GradedLieFamily, N: int) -> FiniteLieAlgebra:
    """The quotient of the non-negative modes by the modes of index >= N.

    Basis ``X_t`` for every family X and 0 <= t < N, ordered by index then
    family.  A bracket landing on a negative index means the non-negative
    modes are not a subalgebra and is reported as an error.
    """
    if N < 1:
        raise ValueError("truncation needs N >= 1")
    r = F.rank
    labels = tuple(_label(F, k, t) for t in range(N) for k in range(r))
    table: dict = {}
    for s in range(N):
        for i in range(r):
            for t in range(N):
                for j in range(r):
                    out = {}
                    for (k, idx), c in F.bracket_at(i, j, s, t).items():
                        if idx < 0:
                            raise TruncationError(f"[{_label(F, i, s)},{_label(F, j, t)}] leaves the non-negative modes")
                        if idx < N:
                            out[_position(F, k, idx)] = Fraction(c)
                    if out:
                        table[(_position(F, i, s), _position(F, j, t))] = out
    return FiniteLieAlgebra(labels, table)


def _span(rows) -> dict[int, Row]:
    return rref([dict(r) for r in rows if r])


def derived_series(g: FiniteLieAlgebra) -> list[int]:
    """Dimensions of g, [g,g], [[g,g],[g,g]], ... until the dimension stops changing."""
    basis = _span(g.basis_vector(a) for a in range(g.dim))
    dims = [len(basis)]
    while True:
        vecs = list(basis.values())
        nxt = _span(g.bracket(x, y) for p, x in enumerate(vecs) for y in vecs[p + 1:])
        if len(nxt) == dims[-1]:
            return dims
        dims.append(len(nxt))
        basis = nxt
        if not basis:
            return dims


@dataclass
class FiltrationReport:
    commutator_dim: int
    commutator_labels: list[str]
    commutator_ok: bool
    derivation_ok: bool | None
    derivation_failures: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.commutator_ok and self.derivation_ok is not False


def filtration_checks(F: GradedLieFamily, N: int, degree0: Sequence[str] | None = None) -> FiltrationReport:
    """Filtration relations inside the truncation at N.

    Checks that the commutator of the non-negative modes equals the span of
    the degree-zero modes named in ``degree0`` plus every mode of index >= 1
    (modulo index N); ``degree0=None`` means "I" when that family exists.  The
    derivation should map the modes of index >= n onto those of index >= n-1;
    rows touching the truncation edge (index N-1 images) are left out.
    """
    if N < 2:
        raise ValueError("filtration checks need N >= 2")
    if degree0 is None:
        degree0 = ["I"] if "I" in F.families else []
    g = build_truncation(F, N)
    e = g.basis_vector
    comm = _span(g.bracket(e(a), e(b)) for a in range(g.dim) for b in range(a + 1, g.dim))
    target = _span(
        [e(_position(F, F.index(x), 0)) for x in degree0]
        + [e(_position(F, k, t)) for t in range(1, N) for k in range(F.rank)]
    )
    same = len(comm) == len(target) and all(in_span(v, comm) for v in target.values())
    labels = [g.labels[c] for c in sorted(comm)]
    if F.derivation is None:
        return FiltrationReport(len(comm), labels, same, None)
    # index -1 .. N-2 on a shifted basis: position (t + 1) * r + k
    r = F.rank

    def pos(k, t):
        return (t + 1) * r + k

    failures = []
    for n in range(0, N - 1):
        image = []
        for t in range(n, N - 1):
            for k in range(r):
                row = {}
                for (kk, idx), c in F.derivation_at(k, t).items():
                    row[pos(kk, idx)] = Fraction(c)
                image.append(row)
        img = _span(image)
        tgt = _span({pos(k, t): Fraction(1)} for t in range(n - 1, N - 2) for k in range(r))
        if not (len(img) == len(tgt) and all(in_span(v, img) for v in tgt.values())):
            failures.append(n)
    return FiltrationReport(len(comm), labels, same, not failures, failures)


@dataclass
class ModeOracleReport:
    ok: bool
    window: int
    mismatches: list[dict] = field(default_factory=list)


def novikov_mode_oracle(N: NovikovAlgebra, A: ConformalAlgebra, window: int = 6) -> ModeOracleReport:
    """Compare the mode family of ``A`` with the loop bracket of ``N`` for |m|, |n| <= window.

    ``A`` must list its generators in the basis order of ``N``; the loop
    bracket is ``[a[m], b[n]] = (m+1)(ab)[m+n] - (n+1)(ba)[m+n]``.
    """
    F = family_from_conformal(A)
    bad = []
    for i in range(N.dim):
        for j in range(N.dim):
            for m in range(-window, window + 1):
                for n in range(-window, window + 1):
                    got = F.bracket_at(i, j, m, n)
                    want = loop_bracket(N, i, j, m, n)
                    if got != want:
                        bad.append({"pair": [A.generators[i], A.generators[j]], "m": m, "n": n})
    return ModeOracleReport(not bad, window, bad[:5])
