"""Extensions between rank-one and one-dimensional conformal modules.

An extension ``0 -> S -> E -> Q -> 0`` is encoded by polynomial unknowns that
deform the direct-sum action.  Three shapes are handled:

* type 1: ``S = C c_gamma`` torsion, ``Q`` free of rank one; ``X_l v = A_X v + f_X(l) c``.
* type 2: ``S`` free of rank one, ``Q = C c_gamma``; ``X_l c = f_X(d, l) v`` and
  ``d c = gamma c + a(d) v``.
* type 3: both free of rank one; ``X_l v = A_X v + f_X(d, l) w``.

The module identities, expanded with every unknown written as a sum of
monomials, are linear in the unknown coefficients (the deformation is
strictly block triangular), so cocycles form the nullspace of an exact
coefficient-matching matrix.  Coboundaries come from changing the splitting.

All work happens in the shifted frame ``d -> d + alpha`` where ``alpha`` is the
constant term of the quotient's (type 1, 3) or submodule's (type 2) L-action.
When the bracket table and both shifted module actions are homogeneous of
degree one and the shifted torsion weight vanishes, the system splits by total
degree and each block is solved separately.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

from .field import QuadraticNumber, Scalar, as_scalar
from .lca import D, DL, DLM, LAM, MU, ConformalAlgebra, algebra_R, algebra_virasoro
from .linalg import PolyMatrix, echelon, ff_rank, nullspace, reduce_vector, rref
from .modules import FreeModule, TorsionModule, module_C, module_M, module_V
from .poly import MultiPoly
from .roots import univ_roots

log = logging.getLogger(__name__)

CORE = DLM


class QueryError(ValueError):
    pass


# -- queries and results ----------------------------------------------------------

@dataclass(frozen=True)
class ExtQuery:
    algebra: ConformalAlgebra
    sub: FreeModule | TorsionModule
    quot: FreeModule | TorsionModule
    degree_bound: int = 12

    @property
    def pair_type(self) -> int:
        s, q = isinstance(self.sub, TorsionModule), isinstance(self.quot, TorsionModule)
        if s and not q:
            return 1
        if q and not s:
            return 2
        if not s and not q:
            return 3
        raise QueryError("extensions between two torsion modules are not supported")

    def with_degree(self, D_: int) -> "ExtQuery":
        return replace(self, degree_bound=D_)

    def warnings(self) -> list[str]:
        out = []
        for label, M in (("sub", self.sub), ("quot", self.quot)):
            if isinstance(M, FreeModule):
                w = _weight(self.algebra, M)
                if w is not None and w == 0:
                    out.append(f"{label} module has weight 0 and is reducible")
            elif M.gamma == 0:
                out.append(f"{label} module C(0) is the trivial module")
        return out


@dataclass(frozen=True)
class Cocycle:
    """Deformation data: one polynomial per algebra generator, plus ``a`` for type 2."""

    components: tuple[MultiPoly, ...]
    a: MultiPoly | None = None

    @property
    def f(self) -> MultiPoly:
        return self.components[0]

    @property
    def g(self) -> MultiPoly | None:
        return self.components[1] if len(self.components) > 1 else None

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components) and (self.a is None or self.a.is_zero())

    def as_dict(self, names: Sequence[str] | None = None) -> dict[str, str]:
        keys = ["f", "g"] + [f"f{i}" for i in range(2, len(self.components))]
        out = {keys[i]: str(c) for i, c in enumerate(self.components)}
        if self.a is not None:
            out["a"] = str(self.a)
        return out


@dataclass
class ExtResult:
    ext_dim: int
    cocycle_basis: list[Cocycle]
    cocycle_space_dim: int
    coboundary_dim: int
    degree_bound: int
    stabilized: bool
    pair_type: int
    graded: bool
    shift: Scalar
    coboundaries: list[Cocycle] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    block_dims: dict[int, int] = field(default_factory=dict)


# -- frame ----------------------------------------------------------------------

def lead_generator(A: ConformalAlgebra) -> str:
    """The generator whose action carries the weight: ``L`` when present, else the first."""
    return "L" if "L" in A.generators else A.generators[0]


def _weight(A: ConformalAlgebra, M: FreeModule):
    """Coefficient of l in the lead generator's action, if it is a scalar."""
    p0 = M.actions[lead_generator(A)][0][0]
    p = p0.with_vars(DL + tuple(v for v in p0.vars if v not in DL))
    c = p.coefficient(LAM, 1).coefficient(D, 0) if LAM in p.vars else MultiPoly.zero(DL)
    return c.constant_term() if c.is_constant() else None


def _const_shift(A: ConformalAlgebra, M: FreeModule) -> Scalar:
    p = M.actions[lead_generator(A)][0][0]
    if D not in p.vars or p.coefficient(D, 1).is_zero():
        return Fraction(0)
    if not p.coefficient(D, 1).is_constant() or p.coefficient(D, 1).constant_term() != 1:
        return Fraction(0)
    c0 = p.subs(D, 0)
    if LAM in c0.vars:
        c0 = c0.subs(LAM, 0)
    return c0.constant_term() if c0.is_constant() else Fraction(0)


@dataclass
class _Frame:
    algebra: ConformalAlgebra
    pair_type: int
    shift: Scalar
    quot: list[MultiPoly] | None  # actions per generator (free modules only), shifted
    sub: list[MultiPoly] | None
    gamma: Scalar | MultiPoly | None  # shifted torsion weight
    graded: bool
    extra_vars: tuple[str, ...]
    equations: "_Equations | None" = None


def _actions(A: ConformalAlgebra, M: FreeModule) -> list[MultiPoly]:
    out = []
    for g in A.generators:
        mat = M.actions[g]
        if len(mat) != 1 or len(mat[0]) != 1:
            raise QueryError("extension solver handles rank-one free modules only")
        out.append(mat[0][0])
    return out


def _frame(q: ExtQuery) -> _Frame:
    A = q.algebra
    t = q.pair_type
    main = q.quot if t in (1, 3) else q.sub
    shift = _const_shift(A, main)
    extra: set[str] = set()

    def shifted(M):
        acts = []
        for p in _actions(A, M):
            extra.update(v for v in p.used_vars() if v not in DLM)
            base = p.with_vars(DLM + tuple(v for v in p.vars if v not in DLM))
            if shift:
                base = base.subs(D, MultiPoly.var(D, base.vars) - shift)
            acts.append(base)
        return acts

    quot = shifted(q.quot) if isinstance(q.quot, FreeModule) else None
    sub = shifted(q.sub) if isinstance(q.sub, FreeModule) else None
    tors = q.sub if t == 1 else (q.quot if t == 2 else None)
    gamma = None if tors is None else as_scalar(tors.gamma) + shift
    graded = all(
        p.is_zero() or p.is_homogeneous(DL, 1) for vec in A.table.values() for p in vec
    )
    for acts in (quot, sub):
        if acts:
            graded &= all(p.is_zero() or p.is_homogeneous(DL, 1) for p in acts)
    if gamma is not None:
        graded &= gamma == 0
    return _Frame(A, t, shift, quot, sub, gamma, graded, tuple(sorted(extra)))


# -- residuals ---------------------------------------------------------------------

def _sub2(p: MultiPoly, dexpr: MultiPoly, lexpr: MultiPoly) -> MultiPoly:
    """``p(d -> dexpr, l -> lexpr)`` with p over (d, l, m, ...)."""
    return p.subs_many({D: dexpr, LAM: lexpr})


class _Vars:
    def __init__(self, extra: tuple[str, ...]):
        self.vars = DLM + extra
        self.d = MultiPoly.var(D, self.vars)
        self.l = MultiPoly.var(LAM, self.vars)
        self.m = MultiPoly.var(MU, self.vars)


def _lift(p: MultiPoly, vars) -> MultiPoly:
    return p.with_vars(vars + tuple(v for v in p.vars if v not in vars))


class _Substituter:
    """Substitutes ``(d, l) -> (X, Y)`` for X, Y drawn from a few fixed linear forms.

    Powers and monomial images are cached, which matters because the system
    builder pushes hundreds of monomials through the same handful of maps.
    """

    def __init__(self, vars: tuple[str, ...], gamma=None):
        self.vars = vars
        d, l, m = (MultiPoly.var(x, vars) for x in DLM)
        self.forms = {"d": d, "l": l, "m": m, "d+l": d + l, "d+m": d + m, "l+m": l + m, "-l-m": -l - m}
        if gamma is not None:
            self.forms["l+g"] = l + gamma
            self.forms["m+g"] = m + gamma
        self._pow: dict = {}
        self._mono: dict = {}

    def power(self, X: str, k: int) -> MultiPoly:
        key = (X, k)
        p = self._pow.get(key)
        if p is None:
            p = self.forms[X] ** k
            self._pow[key] = p
        return p

    def mono(self, X: str, a: int, Y: str, b: int) -> MultiPoly:
        key = (X, a, Y, b)
        p = self._mono.get(key)
        if p is None:
            p = self.power(X, a) * self.power(Y, b)
            self._mono[key] = p
        return p

    def __call__(self, p: MultiPoly, X: str, Y: str) -> MultiPoly:
        p = _lift(p, self.vars)
        if p.vars != self.vars:
            return _sub2(p, self.forms[X], self.forms[Y])
        out = MultiPoly.zero(self.vars)
        groups: dict = {}
        for exp, c in p.terms.items():
            if exp[2]:
                return _sub2(p, self.forms[X], self.forms[Y])
            rest = (0, 0, 0) + exp[3:]
            groups.setdefault((exp[0], exp[1]), {})[rest] = c
        for (a, b), rest in groups.items():
            img = self.mono(X, a, Y, b)
            if len(rest) == 1 and not any(next(iter(rest))):
                out = out + img.scale(next(iter(rest.values())))
            else:
                out = out + img * MultiPoly._raw(self.vars, rest)
        return out


class _Equations:
    """Module identities of one extension frame, with the fixed factors precomputed."""

    def __init__(self, fr: "_Frame"):
        self.fr = fr
        A = fr.algebra
        self.r = A.rank
        self.vars = DLM + fr.extra_vars
        self.S = _Substituter(self.vars, fr.gamma if fr.pair_type == 1 else None)
        sub = self.S
        self.zero = MultiPoly.zero(self.vars)
        # (P(d) Z)_n = P(-n) Z_n with n = l + m
        self.P = {
            key: tuple(sub(p, "-l-m", "l") if p else None for p in vec) for key, vec in A.table.items()
        }
        if fr.quot is not None:
            Q = [_lift(p, self.vars) for p in fr.quot]
            self.Q = Q
            if fr.pair_type == 3:
                self.Q_dl_m = [sub(p, "d+l", "m") for p in Q]
                self.Q_dm_l = [sub(p, "d+m", "l") for p in Q]
            else:
                self.Q_lg_m = [sub(p, "l+g", "m") for p in Q]
                self.Q_mg_l = [sub(p, "m+g", "l") for p in Q]
        if fr.sub is not None:
            Sm = [_lift(p, self.vars) for p in fr.sub]
            self.Sa = Sm
            self.S_d_m = [sub(p, "d", "m") for p in Sm]

    def residuals(self, comps: dict[int, MultiPoly], a: MultiPoly | None, pairs: str = "upper"):
        fr, sub, r = self.fr, self.S, self.r
        F = {k: _lift(p, self.vars) for k, p in comps.items() if p}
        idx = [(i, j) for i in range(r) for j in range(r) if pairs == "all" or i <= j]
        cache: dict = {}

        def at(k, X, Y):
            key = (k, X, Y)
            v = cache.get(key)
            if v is None:
                v = sub(F[k], X, Y)
                cache[key] = v
            return v

        def bracket_term(i, j):
            acc = self.zero
            for k, P in enumerate(self.P[(i, j)]):
                if P is not None and k in F:
                    acc = acc + P * at(k, "d", "l+m")
            return acc

        out = []
        if fr.pair_type == 3:
            for i, j in idx:
                res = self.zero
                if i in F:
                    res = res + self.Q_dl_m[j] * F[i] - self.S_d_m[j] * at(i, "d+m", "l")
                if j in F:
                    res = res + self.Sa[i] * at(j, "d+l", "m") - self.Q_dm_l[i] * at(j, "d", "m")
                out.append(res - bracket_term(i, j))
        elif fr.pair_type == 2:
            for i, j in idx:
                res = self.zero
                if j in F:
                    res = res + self.Sa[i] * at(j, "d+l", "m")
                if i in F:
                    res = res - self.S_d_m[j] * at(i, "d+m", "l")
                out.append(res - bracket_term(i, j))
            A_ = _lift(a, self.vars) if a is not None and a else None
            a_shift = sub(A_, "d+l", "l") if A_ is not None else None
            dl_g = sub.forms["d+l"] - fr.gamma
            for k in range(r):
                res = self.zero
                if k in F:
                    res = res + dl_g * F[k]
                if a_shift is not None:
                    res = res - a_shift * self.Sa[k]
                out.append(res)
        else:
            for i, j in idx:
                res = self.zero
                if i in F:
                    res = res + self.Q_lg_m[j] * F[i]
                if j in F:
                    res = res - self.Q_mg_l[i] * at(j, "d", "m")
                out.append(res - bracket_term(i, j))
        return out


def residuals(fr: _Frame, comps: dict[int, MultiPoly], a: MultiPoly | None, pairs="upper") -> list[MultiPoly]:
    """Residual polynomials of every module identity for the deformation ``comps`` (and ``a``).

    ``comps[k]`` is the unknown attached to generator k (missing means zero),
    written in the shifted frame over (d, l).  ``pairs`` is "upper" (i <= j,
    enough by skew-symmetry) or "all".
    """
    if fr.equations is None:
        fr.equations = _Equations(fr)
    return fr.equations.residuals(comps, a, pairs)


# -- unknowns and systems -------------------------------------------------------------

@dataclass(frozen=True)
class Unknown:
    slot: int  # generator index, or rank for the type-2 ``a``
    exp: tuple[int, int]  # exponents of (d, l)

    def monomial(self) -> MultiPoly:
        return MultiPoly.monomial(DL, self.exp)


def _exps(total: int, with_d: bool, with_l: bool = True):
    """Exponent pairs of the given total degree, descending graded-lex (d-heavy first)."""
    if with_d and with_l:
        return [(total - i, i) for i in range(total + 1)]
    if with_d:
        return [(total, 0)]
    return [(0, total)]


def _unknowns_of_degree(fr: _Frame, k: int) -> list[Unknown]:
    r = fr.algebra.rank
    out = []
    for slot in range(r):
        for e in _exps(k, with_d=fr.pair_type != 1):
            out.append(Unknown(slot, e))
    if fr.pair_type == 2:
        out.append(Unknown(r, (k, 0)))
    return out


@dataclass
class Block:
    degree: int | None  # None for an ungraded system
    columns: list[int]


@dataclass
class CocycleSystem:
    """Coefficient-matching constraints ``rows`` on ``unknown_basis`` (sparse rows)."""

    unknown_basis: list[Unknown]
    rows: list[dict]
    blocks: list[Block]
    graded: bool
    frame: _Frame

    @property
    def constraints(self) -> PolyMatrix:
        n = len(self.unknown_basis)
        grid = []
        for row in self.rows:
            grid.append([_as_poly(row.get(j, 0)) for j in range(n)])
        return PolyMatrix.from_rows(grid)

    def block_rows(self, b: Block) -> list[dict]:
        cols = set(b.columns)
        return [r for r in self.rows if r and next(iter(r)) in cols]


def _as_poly(x) -> MultiPoly:
    return x if isinstance(x, MultiPoly) else MultiPoly.const(x)


def _tpoly(x) -> MultiPoly:
    return _as_poly(x).with_vars(("t",))


def _assignment(fr: _Frame, u: Unknown):
    mono = u.monomial()
    if fr.pair_type == 1:
        mono = MultiPoly.monomial(DL, u.exp)
    if u.slot == fr.algebra.rank:
        return {}, mono
    return {u.slot: mono}, None


def _column_rows(fr: _Frame, cols: list[int], unknowns: list[Unknown]) -> list[dict]:
    rows: dict = {}
    order = []
    for j in cols:
        comps, a = _assignment(fr, unknowns[j])
        res = residuals(fr, comps, a)
        for eq, p in enumerate(res):
            if not p:
                continue
            for exp, c in p.coefficients(CORE).items():
                key = (eq, exp)
                if key not in rows:
                    rows[key] = {}
                    order.append(key)
                rows[key][j] = c.constant_term() if c.is_constant() else c
    return [rows[k] for k in sorted(order)]


def build_cocycle_system(q: ExtQuery) -> CocycleSystem:
    fr = _frame(q)
    D_ = q.degree_bound
    if D_ < 1:
        raise QueryError("degree bound must be at least 1")
    unknowns: list[Unknown] = []
    blocks: list[Block] = []
    rows: list[dict] = []
    if fr.graded:
        for k in range(D_ + 1):
            us = _unknowns_of_degree(fr, k)
            cols = list(range(len(unknowns), len(unknowns) + len(us)))
            unknowns += us
            blocks.append(Block(k, cols))
            rows += _column_rows(fr, cols, unknowns)
    else:
        by_slot: list[Unknown] = []
        r = fr.algebra.rank
        for slot in range(r + (1 if fr.pair_type == 2 else 0)):
            for k in range(D_, -1, -1):
                if slot == r:
                    by_slot.append(Unknown(slot, (k, 0)))
                else:
                    by_slot += [Unknown(slot, e) for e in _exps(k, with_d=fr.pair_type != 1)]
        unknowns = by_slot
        cols = list(range(len(unknowns)))
        blocks.append(Block(None, cols))
        rows = _column_rows(fr, cols, unknowns)
    return CocycleSystem(unknowns, rows, blocks, fr.graded, fr)


# -- coboundaries ---------------------------------------------------------------------

def _coboundary_polys(fr: _Frame, D_: int) -> list[tuple[dict[int, MultiPoly], MultiPoly | None]]:
    """Coboundary generators in the shifted frame, before independence filtering."""
    out = []
    V = _Vars(fr.extra_vars)
    d, l = MultiPoly.var(D, DL + fr.extra_vars), MultiPoly.var(LAM, DL + fr.extra_vars)
    r = fr.algebra.rank
    if fr.pair_type == 1:
        comps = {}
        for k, p in enumerate(fr.quot):
            v = _lift(p, DL + fr.extra_vars).subs(D, fr.gamma)
            if v:
                comps[k] = v
        out.append((comps, None))
        return out
    for k in range(D_):
        phi = d ** k
        if fr.pair_type == 2:
            comps = {}
            for s, p in enumerate(fr.sub):
                v = _lift(p, DL + fr.extra_vars).drop_unused((MU,)) * phi.subs(D, d + l)
                if v:
                    comps[s] = v
            a = (d - fr.gamma) * phi
            out.append((comps, a.with_vars(DL + fr.extra_vars)))
        else:
            comps = {}
            for s in range(r):
                Q = _lift(fr.quot[s], DL + fr.extra_vars).drop_unused((MU,))
                S = _lift(fr.sub[s], DL + fr.extra_vars).drop_unused((MU,))
                v = Q * phi - S * phi.subs(D, d + l)
                if v:
                    comps[s] = v
            out.append((comps, None))
    return out


def _to_vector(fr: _Frame, sysm: CocycleSystem, comps, a) -> dict:
    index = {u: j for j, u in enumerate(sysm.unknown_basis)}
    r = fr.algebra.rank
    vec = {}
    items = list(comps.items()) + ([(r, a)] if a is not None else [])
    for slot, p in items:
        if not p:
            continue
        p = p.with_vars(DL + tuple(v for v in p.vars if v not in DL))
        for exp, c in p.coefficients(DL).items():
            e = (exp[0], exp[1])
            if slot == r:
                e = (exp[0], 0)
            u = Unknown(slot, e)
            if u not in index:
                raise QueryError(f"coboundary monomial {e} exceeds the degree bound")
            vec[index[u]] = c.constant_term() if c.is_constant() else c
    return vec


def _from_vector(fr: _Frame, sysm: CocycleSystem, vec: dict, shift_back: bool = True) -> Cocycle:
    r = fr.algebra.rank
    comps = [MultiPoly.zero(DL) for _ in range(r)]
    a = MultiPoly.zero((D,)) if fr.pair_type == 2 else None
    for j, c in vec.items():
        u = sysm.unknown_basis[j]
        term = MultiPoly.monomial(DL, u.exp, 1) * c
        if u.slot == r:
            a = a + term
        else:
            comps[u.slot] = comps[u.slot] + term
    if a is not None:
        a = a.drop_unused((LAM,))
    if shift_back and fr.shift:
        dd = MultiPoly.var(D, DL)
        comps = [p.subs(D, dd + fr.shift) for p in comps]
        if a is not None:
            a = a.subs(D, MultiPoly.var(D) + fr.shift)
    if fr.pair_type == 1:
        comps = [p.drop_unused((D,)) for p in comps]
    return Cocycle(tuple(comps), a)


def coboundary_basis(q: ExtQuery) -> list[Cocycle]:
    fr = _frame(q)
    sysm = build_cocycle_system(q)
    vecs = _independent(fr, sysm)
    return [_from_vector(fr, sysm, v) for v in vecs]


def _independent(fr: _Frame, sysm: CocycleSystem) -> list[dict]:
    out = []
    piv: dict = {}
    for comps, a in _coboundary_polys(fr, sysm_degree(sysm)):
        v = _to_vector(fr, sysm, comps, a)
        red = reduce_vector(v, piv)
        if red:
            out.append(v)
            piv = rref(out)
    return out


def sysm_degree(sysm: CocycleSystem) -> int:
    return max((sum(u.exp) for u in sysm.unknown_basis), default=0)


# -- solving ---------------------------------------------------------------------------

def _block_of(sysm: CocycleSystem, vec: dict) -> int:
    j = min(vec)
    for i, b in enumerate(sysm.blocks):
        if j in b.columns:
            return i
    raise KeyError(j)


def verify_cocycle(q: ExtQuery, c: Cocycle) -> bool:
    """Zero residual on all ordered generator pairs (and the d-compatibility for type 2)."""
    fr = _frame(q)
    comps = {}
    dd = MultiPoly.var(D, DL)
    for k, p in enumerate(c.components):
        if p:
            p = p.with_vars(DL + tuple(v for v in p.vars if v not in DL))
            comps[k] = p.subs(D, dd - fr.shift) if fr.shift else p
    a = c.a
    if a is not None and a and fr.shift:
        a = a.with_vars((D,) + tuple(v for v in a.vars if v != D))
        a = a.subs(D, MultiPoly.var(D, a.vars) - fr.shift)
    return not any(residuals(fr, comps, a, pairs="all"))


def ext_compute(q: ExtQuery) -> ExtResult:
    sysm = build_cocycle_system(q)
    fr = sysm.frame
    cob = _independent(fr, sysm)
    total_z = total_b = 0
    reps: list[dict] = []
    block_dims = {}
    for bi, b in enumerate(sysm.blocks):
        rows = sysm.block_rows(b)
        Z = _block_nullspace(rows, b.columns)
        B = [v for v in cob if _block_of(sysm, v) == bi]
        brref = rref(B)
        if len(brref) != len(B):
            raise ArithmeticError("coboundary generators are dependent")
        reduced = [reduce_vector(z, brref) for z in Z]
        comp = rref([z for z in reduced if z])
        dim = len(Z) - len(B)
        if len(comp) != dim:
            raise ArithmeticError(
                f"coboundaries are not contained in the cocycle space (block {b.degree})"
            )
        total_z += len(Z)
        total_b += len(B)
        if b.degree is not None:
            block_dims[b.degree] = dim
        reps += [comp[c] for c in sorted(comp)]
    basis = [_from_vector(fr, sysm, v) for v in reps]
    for c in basis:
        if not verify_cocycle(q, c):
            raise ArithmeticError("returned cocycle has a nonzero residual")
    return ExtResult(
        ext_dim=total_z - total_b,
        cocycle_basis=basis,
        cocycle_space_dim=total_z,
        coboundary_dim=total_b,
        degree_bound=q.degree_bound,
        stabilized=False,
        pair_type=fr.pair_type,
        graded=fr.graded,
        shift=fr.shift,
        coboundaries=[_from_vector(fr, sysm, v) for v in cob],
        warnings=q.warnings(),
        block_dims=block_dims,
    )


def _block_nullspace(rows: list[dict], cols: list[int]) -> list[dict]:
    """Nullspace restricted to ``cols`` (local renumbering keeps the elimination small)."""
    pos = {c: i for i, c in enumerate(cols)}
    local = [{pos[j]: v for j, v in r.items()} for r in rows]
    return [{cols[i]: v for i, v in vec.items()} for vec in nullspace(local, len(cols))]


def cocycle_space(q: ExtQuery, degree: int | None = None) -> list[Cocycle]:
    """Basis of all solutions (coboundaries included), optionally of one homogeneous degree."""
    sysm = build_cocycle_system(q)
    out = []
    for b in sysm.blocks:
        if degree is not None and b.degree != degree:
            continue
        for v in _block_nullspace(sysm.block_rows(b), b.columns):
            out.append(_from_vector(sysm.frame, sysm, v))
    return out


# -- equivalence ------------------------------------------------------------------------

def _cocycle_vector(q: ExtQuery, sysm: CocycleSystem, c: Cocycle) -> dict:
    fr = sysm.frame
    dd = MultiPoly.var(D, DL)
    comps = {}
    for k, p in enumerate(c.components):
        if p is not None and p:
            p = p.with_vars(DL + tuple(v for v in p.vars if v not in DL))
            comps[k] = p.subs(D, dd - fr.shift) if fr.shift else p
    a = None
    if c.a is not None and c.a:
        a = c.a.with_vars(DL + tuple(v for v in c.a.vars if v not in DL))
        a = a.subs(D, dd - fr.shift) if fr.shift else a
    return _to_vector(fr, sysm, comps, a)


def class_in_span(q: ExtQuery, result: ExtResult, candidate: Cocycle) -> bool:
    """Whether ``candidate`` is a nontrivial cocycle inside span(representatives) + coboundaries."""
    if not verify_cocycle(q, candidate):
        return False
    sysm = build_cocycle_system(q.with_degree(result.degree_bound))
    B = [_cocycle_vector(q, sysm, c) for c in result.coboundaries]
    Z = [_cocycle_vector(q, sysm, c) for c in result.cocycle_basis]
    v = _cocycle_vector(q, sysm, candidate)
    bred = rref(B)
    if not reduce_vector(v, bred):
        return False  # a coboundary
    return not reduce_vector(v, rref(B + Z))


def same_span(q: ExtQuery, r1: ExtResult, r2: ExtResult) -> bool:
    """Representatives of ``r1`` and ``r2`` span the same classes (computed at the larger bound)."""
    if r1.ext_dim != r2.ext_dim:
        return False
    D_ = max(r1.degree_bound, r2.degree_bound)
    sysm = build_cocycle_system(q.with_degree(D_))
    big = r1 if r1.degree_bound == D_ else r2
    small = r2 if big is r1 else r1
    B = rref([_cocycle_vector(q, sysm, c) for c in big.coboundaries])
    span = rref([_cocycle_vector(q, sysm, c) for c in big.coboundaries + big.cocycle_basis])
    for c in small.cocycle_basis:
        v = _cocycle_vector(q, sysm, c)
        if reduce_vector(v, span) or not reduce_vector(v, B):
            return False
    return True


# -- stabilization ------------------------------------------------------------------------

def delta_difference(q: ExtQuery):
    """``Delta - Delta_bar`` for type 3 when both weights are scalars, else None."""
    if q.pair_type != 3:
        return None
    w1, w2 = _weight(q.algebra, q.quot), _weight(q.algebra, q.sub)
    if w1 is None or w2 is None:
        return None
    return w1 - w2


def stabilize(q: ExtQuery) -> ExtResult:
    """The result at bound D, flagged stable when bound D+2 gives the same classes.

    For graded type-3 queries with ``n = Delta - Delta_bar`` a nonnegative
    integer, nontrivial classes can sit in degree ``n + 1``, so a bound below
    that never counts as stable.
    """
    D_ = q.degree_bound
    r1 = ext_compute(q)
    r2 = ext_compute(q.with_degree(D_ + 2))
    ok = same_span(q, r1, r2)
    n = delta_difference(q)
    if ok and r1.graded and isinstance(n, Fraction) and n.denominator == 1 and n >= 0:
        ok = D_ >= n + 1
    r1.stabilized = ok
    return r1


# -- special weights --------------------------------------------------------------------------

@dataclass
class SpecialValues:
    n: Fraction
    degree_bound: int
    generic_dim: int
    jumps: list[tuple[Scalar, int]]
    excluded: list[tuple[Scalar, int]]
    candidates: list[Scalar]
    residual_factors: list[list[Fraction]]
    algebra: str


def _family(A: ConformalAlgebra):
    if A.same_table(algebra_R()):
        return module_V
    if A.same_table(algebra_virasoro()):
        return module_M
    raise QueryError(f"special weights are implemented for R and Virasoro only; got {A.name!r}")


def type3_query(A: ConformalAlgebra, alpha, delta, alpha_bar, delta_bar, D_: int = 12) -> ExtQuery:
    mk = _family(A)
    return ExtQuery(A, mk(alpha_bar, delta_bar), mk(alpha, delta), D_)


def special_values(A: ConformalAlgebra, n, D_: int = 12, seed: int = 0) -> SpecialValues:
    """Weights ``Delta_bar = t`` (with ``Delta = t + n``, ``alpha = alpha_bar = 0``) where Ext jumps."""
    n = as_scalar(n)
    vars_t = DL + ("t",)
    t = MultiPoly.var("t", vars_t)
    mk = _family(A)
    q = ExtQuery(A, mk(0, t), mk(0, t + n), D_)
    sysm = build_cocycle_system(q)
    fr = sysm.frame
    if not fr.graded:
        raise QueryError("symbolic weight sweep needs a graded system")
    cob_polys = _coboundary_polys(fr, D_)
    generic = 0
    drop_polys: list[MultiPoly] = []
    for b in sysm.blocks:
        rows = sysm.block_rows(b)
        pos = {c: i for i, c in enumerate(b.columns)}
        grid = [[_tpoly(r.get(c, 0)) for c in b.columns] for r in rows]
        nullity = len(b.columns)
        if grid:
            res = ff_rank(PolyMatrix.from_rows(grid), "t", seed=seed)
            nullity -= res.rank
            if res.rank:
                drop_polys.append(res.drop_poly)
        B = []
        for comps, a in cob_polys:
            v = _to_vector(fr, sysm, comps, a)
            if v and min(v) in pos:
                B.append([_tpoly(v.get(c, 0)) for c in b.columns])
        brank = 0
        if B:
            resb = ff_rank(PolyMatrix.from_rows(B), "t", seed=seed)
            brank = resb.rank
            if resb.rank:
                drop_polys.append(resb.drop_poly)
        generic += nullity - brank
    candidates: list = []
    residual = []
    for p in drop_polys:
        if p.is_constant():
            continue
        rep = univ_roots(p, "t")
        for r in rep.real_roots():
            if r not in candidates:
                candidates.append(r)
        for fac in rep.residual:
            if fac not in residual:
                residual.append(fac)
    candidates.sort(key=float)
    jumps, excluded = [], []
    for c in candidates:
        qc = ExtQuery(A, mk(0, c), mk(0, c + n), D_)
        dim = ext_compute(qc).ext_dim
        if dim > generic:
            (excluded if c == 0 or c + n == 0 else jumps).append((c, dim))
        elif dim < generic:
            raise ArithmeticError(f"ext dimension below the generic value at t = {c}")
    return SpecialValues(n, D_, generic, jumps, excluded, candidates, residual, A.name)
