"""Conformal modules: free modules given by action matrices and 1-dim torsion modules.

A free module of rank ``k`` over ``C[d]`` with basis ``v_1..v_k`` stores, for
each generator ``X``, a ``k x k`` matrix ``A^X(d, l)`` in column convention:
``X_l v_j = sum_i A^X[i][j](d, l) v_i``.  Entries may involve declared
parameter variables (``alpha``, ``Delta``, ...).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .field import Scalar, as_scalar
from .lca import D, DL, DLM, LAM, MU, ConformalAlgebra, algebra_R, algebra_virasoro
from .linalg import nullspace
from .poly import MultiPoly

Matrix = tuple[tuple[MultiPoly, ...], ...]


class UnsupportedAlgebra(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class FreeModule:
    name: str
    basis: tuple[str, ...]
    actions: Mapping[str, Matrix]
    params: tuple[str, ...] = ()

    @property
    def rank(self) -> int:
        return len(self.basis)

    def action(self, gen: str) -> Matrix:
        return self.actions[gen]

    def substitute(self, values: Mapping[str, object]) -> "FreeModule":
        acts = {
            g: tuple(tuple(e.subs_many(values) for e in row) for row in mat)
            for g, mat in self.actions.items()
        }
        return FreeModule(self.name, self.basis, acts, tuple(p for p in self.params if p not in values))


@dataclass(frozen=True)
class TorsionModule:
    """``C c`` with ``d c = gamma c`` and every generator acting by zero."""

    gamma: Scalar
    name: str = "C"

    @property
    def rank(self) -> int:
        return 0

    @property
    def irreducible(self) -> bool:
        return self.gamma != 0


ModuleSpec = FreeModule | TorsionModule


def rank1(name: str, algebra: ConformalAlgebra, actions: Mapping[str, MultiPoly], params=()) -> FreeModule:
    acts = {}
    for g in algebra.generators:
        p = actions.get(g, MultiPoly.zero(DL))
        acts[g] = ((p,),)
    return FreeModule(name, ("v",), acts, tuple(params))


def _lin(alpha, delta) -> MultiPoly:
    d, l = MultiPoly.var(D, DL), MultiPoly.var(LAM, DL)
    alpha = alpha if isinstance(alpha, MultiPoly) else MultiPoly.const(alpha, DL)
    delta = delta if isinstance(delta, MultiPoly) else MultiPoly.const(delta, DL)
    return d + alpha + delta * l


def module_V(alpha=0, delta=1) -> FreeModule:
    """``V(alpha, Delta)`` over R: ``L_l v = (d + alpha + Delta l) v``, ``I_l v = 0``."""
    params = tuple(v for x in (alpha, delta) if isinstance(x, MultiPoly) for v in x.used_vars())
    return rank1(f"V({_fmt(alpha)},{_fmt(delta)})", algebra_R(), {"L": _lin(alpha, delta)}, params)


def module_M(alpha=0, delta=1) -> FreeModule:
    """Virasoro module ``M(alpha, Delta)`` with the same L-action."""
    params = tuple(v for x in (alpha, delta) if isinstance(x, MultiPoly) for v in x.used_vars())
    return rank1(f"M({_fmt(alpha)},{_fmt(delta)})", algebra_virasoro(), {"L": _lin(alpha, delta)}, params)


def module_C(gamma=0) -> TorsionModule:
    g = as_scalar(gamma)
    return TorsionModule(g, f"C({_fmt(g)})")


def _fmt(x) -> str:
    return str(x)


# -- module axioms ------------------------------------------------------------

@dataclass
class ModuleReport:
    ok: bool
    witnesses: list = field(default_factory=list)
    notes: list = field(default_factory=list)


def _matmul(a, b):
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for s in range(k):
                x, y = a[i][s], b[s][j]
                if x and y:
                    acc = x * y if acc is None else acc + x * y
            row.append(acc if acc is not None else MultiPoly.zero(DLM))
        out.append(row)
    return out


def _lift(mat, vars):
    return [[e.with_vars(vars + tuple(v for v in e.vars if v not in vars)) for e in row] for row in mat]


def module_residual(A: ConformalAlgebra, M: FreeModule, i: int, j: int) -> list[list[MultiPoly]]:
    """``X_l Y_m - Y_m X_l - [X_l Y]_{l+m}`` on the basis, as a matrix over (d, l, m, params).

    Composition: ``X_l (p(d) v) = p(d + l) X_l v``.  The bracket term uses
    ``(P(d) Z)_n = P(-n) Z_n`` with ``n = l + m``.
    """
    d, l, m = (MultiPoly.var(x, DLM) for x in DLM)
    X, Y = A.generators[i], A.generators[j]
    AX = _lift(M.action(X), DLM)
    AY = _lift(M.action(Y), DLM)
    AX_l = AX
    AY_m = [[e.subs(LAM, m) for e in row] for row in AY]
    first = _matmul(AX_l, [[e.subs(D, d + l) for e in row] for row in AY_m])
    second = _matmul(AY_m, [[e.subs(D, d + m) for e in row] for row in AX_l])
    out = [[first[r][c] - second[r][c] for c in range(M.rank)] for r in range(M.rank)]
    for k, P in enumerate(A.table[(i, j)]):
        if not P:
            continue
        coef = P.with_vars(DLM).subs(D, -l - m)
        Ak = _lift(M.action(A.generators[k]), DLM)
        for r in range(M.rank):
            for c in range(M.rank):
                e = Ak[r][c]
                if e:
                    out[r][c] = out[r][c] - coef * e.subs(LAM, l + m)
    return out


def check_module(A: ConformalAlgebra, M: ModuleSpec) -> ModuleReport:
    if isinstance(M, TorsionModule):
        notes = [] if M.irreducible else ["gamma = 0: trivial module, reducible as a C[d]-module quotient"]
        return ModuleReport(True, [], notes)
    missing = [g for g in A.generators if g not in M.actions]
    extra = [g for g in M.actions if g not in A.generators]
    if missing or extra:
        raise DimensionMismatch(f"module actions {sorted(M.actions)} do not match generators {A.generators}")
    for g, mat in M.actions.items():
        if len(mat) != M.rank or any(len(r) != M.rank for r in mat):
            raise DimensionMismatch(f"action matrix of {g} is not {M.rank}x{M.rank}")
    witnesses = []
    for i in range(A.rank):
        for j in range(A.rank):
            res = module_residual(A, M, i, j)
            if any(e for row in res for e in row):
                witnesses.append({"generators": (A.generators[i], A.generators[j]), "residual": res})
    return ModuleReport(not witnesses, witnesses)


# -- rank-one classification ----------------------------------------------------

@dataclass
class Rank1Member:
    f: MultiPoly
    g: MultiPoly | None
    params: tuple[str, ...]


@dataclass
class Rank1Family:
    algebra: str
    members: list[Rank1Member]
    stages: list[dict] = field(default_factory=list)
    verified: bool = False


def _generic(name: str, var: str, degree: int, vars) -> tuple[MultiPoly, list[str]]:
    """``sum_e name_e * var^e`` with fresh coefficient variables."""
    names = [f"{name}_{e}" for e in range(degree + 1)]
    allv = tuple(vars) + tuple(names)
    x = MultiPoly.var(var, allv)
    out = MultiPoly.zero(allv)
    for e, c in enumerate(names):
        out = out + MultiPoly.var(c, allv) * x ** e
    return out, names


def _scalar_residual(A: ConformalAlgebra, acts: Mapping[str, MultiPoly], i: int, j: int) -> MultiPoly:
    M = FreeModule("generic", ("v",), {g: ((acts.get(g, MultiPoly.zero(DL)),),) for g in A.generators})
    return module_residual(A, M, i, j)[0][0]


def _identify(A: ConformalAlgebra) -> str:
    if A.same_table(algebra_R()):
        return "R"
    if A.same_table(algebra_virasoro()):
        return "Vir"
    raise UnsupportedAlgebra(
        f"rank-one elimination is implemented for R and Virasoro only; got {A.name!r}"
    )


def rank1_solve(A: ConformalAlgebra, max_degree: int = 6) -> Rank1Family:
    """Classify rank-one modules ``L_l v = f(d,l) v`` (and ``I_l v = g(d,l) v`` for R).

    Each stage checks, with generic symbolic coefficients, the identity that
    drives one elimination step; the final linear stage is solved exactly.
    """
    kind = _identify(A)
    L = A.index("L")
    I = A.index("I") if kind == "R" else None
    stages = []
    dvar, lvar, mvar = (MultiPoly.var(x, DLM) for x in DLM)

    # g does not depend on d: the top l-power of the I-I residual is b_M(m) * [l^N] g
    if I is not None:
        ok = True
        for M_ in range(1, 3):
            for N_ in range(0, 3):
                g, names = _g_generic(M_, N_)
                res = _scalar_residual(A, {"I": g}, I, I)
                top = res.coefficient(LAM, M_ + N_)
                bM = _part(g, D, M_).subs(LAM, mvar)
                gN = _part(g, LAM, N_)
                ok &= (top - bM * gN).is_zero()
        stages.append({"stage": "g independent of d", "identity_ok": ok})

    # f has d-degree <= 1: the d^(2n-1) coefficient of the L-L residual is n(l-m)a_n(l)a_n(m)
    ok = True
    for n in range(2, 5):
        f, an = _f_generic(n, 2)
        acts = {"L": f}
        if I is not None:
            gl, _ = _generic("b", LAM, 2, DL)
            acts["I"] = gl
        res = _scalar_residual(A, acts, L, L)
        top = res.coefficient(D, 2 * n - 1)
        expect = (lvar - mvar) * n * an * an.subs(LAM, mvar)
        ok &= (top - expect).is_zero()
    stages.append({"stage": "d-degree of f at most 1", "identity_ok": ok})

    # with f = a0 + a1 d, the d-coefficient gives (l-m)(a1(l)a1(m) - a1(l+m)); top l^E m^E term is c_E^2
    ok = True
    for E in range(1, 4):
        a1, names = _generic("c", LAM, E, DLM)
        a0, _ = _generic("e", LAM, 2, DLM)
        f = a0 + a1 * MultiPoly.var(D, a1.vars)
        res = _scalar_residual(A, {"L": f}, L, L)
        lin = res.coefficient(D, 1)
        expect = (lvar - mvar) * (a1 * a1.subs(LAM, mvar) - a1.subs(LAM, lvar + mvar))
        ok &= (lin - expect).is_zero()
        poly = a1 * a1.subs(LAM, mvar) - a1.subs(LAM, lvar + mvar)
        cE = MultiPoly.var(names[-1], poly.vars)
        ok &= poly.coefficient(LAM, E).coefficient(MU, E) == cE * cE
    stages.append({"stage": "a1 constant with a1^2 = a1", "identity_ok": ok})

    # a1 = 0: f = a0(l), g = b(l); the residuals are linear and force the zero solution
    zero_sol = _linear_stage(A, kind, L, I, with_d=False, degree=max_degree)
    stages.append({"stage": "a1 = 0 forces f = g = 0", "nullity": len(zero_sol)})

    # a1 = 1: f = d + a0(l); linear in (a0, g), solution space spanned by a0 = 1 and a0 = l
    sols = _linear_stage(A, kind, L, I, with_d=True, degree=max_degree)
    stages.append({"stage": "a1 = 1 linear solve", "nullity": len(sols)})

    alpha = MultiPoly.var("alpha", DL + ("alpha", "Delta"))
    delta = MultiPoly.var("Delta", alpha.vars)
    dd, ll = MultiPoly.var(D, alpha.vars), MultiPoly.var(LAM, alpha.vars)
    fam_f = dd + alpha + delta * ll
    span = {(0, 1, None), (1, 0, None)}
    got = set()
    for a0, g in sols:
        if g is None or g.is_zero():
            if a0 == MultiPoly.const(1):
                got.add((0, 1, None))
            elif a0 == MultiPoly.var(LAM):
                got.add((1, 0, None))
    members = []
    if got == span and not zero_sol:
        members.append(Rank1Member(fam_f, MultiPoly.zero(DL) if I is not None else None, ("alpha", "Delta")))
    members.append(Rank1Member(MultiPoly.zero(DL), MultiPoly.zero(DL) if I is not None else None, ()))
    fam = Rank1Family(kind, members, stages)
    fam.verified = all(s.get("identity_ok", True) for s in stages) and all(
        check_module(A, _member_module(A, mem)).ok for mem in members
    )
    return fam


def _member_module(A: ConformalAlgebra, mem: Rank1Member) -> FreeModule:
    acts = {"L": mem.f}
    if mem.g is not None:
        acts["I"] = mem.g
    return rank1("member", A, acts, mem.params)


def _g_generic(M_: int, N_: int) -> tuple[MultiPoly, list[str]]:
    """Generic g with d-degree M and l-degree N (all coefficients symbolic)."""
    names = [f"g_{i}_{j}" for i in range(M_ + 1) for j in range(N_ + 1)]
    vars = DL + tuple(names)
    d, l = MultiPoly.var(D, vars), MultiPoly.var(LAM, vars)
    out = MultiPoly.zero(vars)
    for i in range(M_ + 1):
        for j in range(N_ + 1):
            out = out + MultiPoly.var(f"g_{i}_{j}", vars) * d ** i * l ** j
    return out, names


def _f_generic(n: int, e: int) -> tuple[MultiPoly, MultiPoly]:
    """Generic f = sum_{i<=n} a_i(l) d^i with a_i of degree e; returns (f, a_n)."""
    names = [f"a_{i}_{k}" for i in range(n + 1) for k in range(e + 1)]
    vars = DLM + tuple(names)
    d, l = MultiPoly.var(D, vars), MultiPoly.var(LAM, vars)
    f = MultiPoly.zero(vars)
    an = MultiPoly.zero(vars)
    for i in range(n + 1):
        ai = MultiPoly.zero(vars)
        for k in range(e + 1):
            ai = ai + MultiPoly.var(f"a_{i}_{k}", vars) * l ** k
        f = f + ai * d ** i
        if i == n:
            an = ai
    return f, an


def _part(p: MultiPoly, var: str, k: int) -> MultiPoly:
    """Coefficient of ``var^k`` (top-level), keeping the other variables."""
    return p.coefficient(var, k)


def _linear_stage(A, kind, L, I, with_d: bool, degree: int):
    """Solve for a0(l), g(l) of degree <= ``degree`` in the linear stage.

    Returns nullspace vectors as ``(a0, g)`` polynomials in ``l``.
    """
    unknowns = [("a", e) for e in range(degree + 1)]
    if I is not None:
        unknowns += [("g", e) for e in range(degree + 1)]
    l = MultiPoly.var(LAM, DL)
    base_f = MultiPoly.var(D, DL) if with_d else MultiPoly.zero(DL)

    def residuals(a0, g):
        acts = {"L": base_f + a0}
        if I is not None:
            acts["I"] = g
        return [_scalar_residual(A, acts, i, j) for i in range(A.rank) for j in range(A.rank)]

    zero = MultiPoly.zero(DL)
    const = residuals(zero, zero)
    cols = []
    for kind_, e in unknowns:
        mono = l ** e
        res = residuals(mono, zero) if kind_ == "a" else residuals(zero, mono)
        cols.append([r - c for r, c in zip(res, const)])
    if any(c for c in const):
        raise ArithmeticError("linear stage is not homogeneous")
    # coefficient matching: one row per (equation, monomial)
    keys = {}
    rows: dict = {}
    for j, col in enumerate(cols):
        for eq, p in enumerate(col):
            for exp, c in p.terms.items():
                key = (eq, p.vars, exp)
                r = keys.setdefault(key, len(keys))
                rows.setdefault(r, {})[j] = c
    basis = nullspace(list(rows.values()), len(unknowns))
    out = []
    for vec in basis:
        a0 = MultiPoly.zero((LAM,))
        g = MultiPoly.zero((LAM,))
        for j, c in vec.items():
            kind_, e = unknowns[j]
            term = MultiPoly.var(LAM) ** e * c
            if kind_ == "a":
                a0 = a0 + term
            else:
                g = g + term
        out.append((a0, g if I is not None else None))
    return out


# -- irreducibility ------------------------------------------------------------

@dataclass
class IrreducibilityReport:
    irreducible: bool
    witness: MultiPoly | None = None
    witness_verified: bool | None = None


def rank1_irreducible(delta, alpha) -> IrreducibilityReport:
    """``V(alpha, Delta)`` is irreducible iff ``Delta != 0``.

    For ``Delta = 0`` the witness is the generator ``(d + alpha) v`` of a
    proper submodule, with its L- and I-actions checked symbolically.
    """
    delta, alpha = as_scalar(delta), as_scalar(alpha)
    if delta != 0:
        return IrreducibilityReport(True)
    d, l = MultiPoly.var(D, DL), MultiPoly.var(LAM, DL)
    p = d + alpha
    # L_l (p(d) v) = p(d + l)(d + alpha + 0*l) v
    acted = p.subs(D, d + l) * (d + alpha)
    ok = acted == (d + alpha + l) * p
    return IrreducibilityReport(False, p, ok)


def submodule_generator_gcd(p: MultiPoly, alpha, delta) -> MultiPoly:
    """Monic generator of the submodule of ``V(alpha, Delta)`` generated by ``p(d) v``.

    Submodules of ``C[d] v`` are ideals ``h(d) C[d] v``; closing under the
    L-action replaces ``h`` by the gcd of the l-coefficients of
    ``h(d + l)(d + alpha + Delta l)`` until it is stable.
    """
    from .poly import univariate_gcd

    d, l = MultiPoly.var(D, DL), MultiPoly.var(LAM, DL)
    h = p.with_vars((D,))
    while True:
        acted = h.with_vars(DL).subs(D, d + l) * (d + as_scalar(alpha) + as_scalar(delta) * l)
        g = h
        for k, c in acted.coefficients((LAM,)).items():
            g = univariate_gcd(g, c.with_vars((D,)), D)
        g = univariate_gcd(g, h, D)
        if g == h or g.with_vars((D,)) == h:
            return g
        h = g


@dataclass
class IsoReport:
    ok: bool
    residual: MultiPoly


def submodule_iso_check(alpha=None, target_delta=1) -> IsoReport:
    """Check that ``(d + alpha) v -> w`` intertwines ``(d + alpha) V(alpha, 0)`` with ``V(alpha, target)``.

    ``alpha=None`` keeps it symbolic.  The residual is expressed in
    v-coordinates: (target action - transported action) times ``(d + alpha)``.
    """
    vars = DL + ("alpha",)
    d, l = MultiPoly.var(D, vars), MultiPoly.var(LAM, vars)
    a = MultiPoly.var("alpha", vars) if alpha is None else MultiPoly.const(alpha, vars)
    gen = d + a
    # L_l(gen v) inside V(alpha, 0), divided by gen(d) since gen(d + l) = (d + alpha + l)
    transported = d + a + l
    assert gen.subs(D, d + l) * (d + a) == transported * gen
    target = d + a + l * as_scalar(target_delta)
    residual = (target - transported) * gen
    if alpha is not None:
        residual = residual.drop_unused(("alpha",))
    return IsoReport(residual.is_zero(), residual)
