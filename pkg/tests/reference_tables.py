"""Expected extension representatives, transcribed as polynomials in d (for the
derivative) and l, with ``db = d + alpha``.  Shared by unit and acceptance tests."""
from __future__ import annotations

from fractions import Fraction
from math import factorial

from lcext.extsolver import Cocycle, ExtQuery
from lcext.field import quadratic
from lcext.lca import DL, algebra_R, algebra_virasoro, jproducts
from lcext.modules import module_C, module_M, module_V
from lcext.poly import MultiPoly

d, l = MultiPoly.var("d", DL), MultiPoly.var("l", DL)
Z = MultiPoly.zero(DL)
SQRT19_PLUS = quadratic(Fraction(-5, 2), Fraction(1, 2), 19)
SQRT19_MINUS = quadratic(Fraction(-5, 2), Fraction(-1, 2), 19)

# generic dims of R type-3 extensions by n = Delta - Delta_bar, with the jump weights
R_TYPE3_DIMS = {
    0: (2, {}),
    1: (1, {}),
    2: (1, {Fraction(-1): 2}),
    3: (1, {}),
    4: (1, {}),
    5: (0, {Fraction(-4): 1}),
    6: (0, {SQRT19_PLUS: 1, SQRT19_MINUS: 1}),
    7: (0, {}),
    8: (0, {}),
}


def f_degree7(dbar_weight, db):
    return (
        db**4 * l**3
        - (2 * dbar_weight + 3) * db**3 * l**4
        - 3 * dbar_weight * db**2 * l**5
        - (3 * dbar_weight + 1) * db * l**6
        - (dbar_weight + Fraction(9, 28)) * l**7
    )


def f_virasoro(n, dbar_weight, alpha):
    """The f-polynomial listed for the Virasoro type-3 classification, or None."""
    db = d + alpha
    if n == 2:
        return l**2 * (2 * db + l)
    if n == 3:
        return db * l**2 * (db + l)
    if n == 4:
        return l**2 * (4 * db**3 + 6 * db**2 * l - db * l**2 + dbar_weight * l**3)
    if n == 5 and dbar_weight == -4:
        return db**4 * l**2 - 10 * db**2 * l**4 - 17 * db * l**5 - 8 * l**6
    if n == 6 and dbar_weight in (SQRT19_PLUS, SQRT19_MINUS):
        return f_degree7(dbar_weight, db)
    return None


def r_type3_reps(n, dbar_weight, alpha) -> list[Cocycle]:
    """Cocycles (f, g) spanning the R type-3 classes with alpha = alpha_bar."""
    db = d + alpha
    if n == 0:
        return [Cocycle((1 + Z, Z)), Cocycle((l, Z))]
    if n == 1:
        return [Cocycle((db / dbar_weight, l))]
    out = []
    f = f_virasoro(n, dbar_weight, alpha)
    if f is not None:
        out.append(Cocycle((f, Z)))
    if n == 2 and dbar_weight == -1:
        out.append(Cocycle((l**2 - db**2, (db + l) * l)))
    return out


def r_query(alpha, delta, alpha_bar, delta_bar, D=12) -> ExtQuery:
    return ExtQuery(algebra_R(), module_V(alpha_bar, delta_bar), module_V(alpha, delta), D)


def vir_query(alpha, delta, alpha_bar, delta_bar, D=12) -> ExtQuery:
    return ExtQuery(algebra_virasoro(), module_M(alpha_bar, delta_bar), module_M(alpha, delta), D)


def type1_query(A, alpha, delta, gamma, D=12) -> ExtQuery:
    V = module_V(alpha, delta) if A.rank == 2 else module_M(alpha, delta)
    return ExtQuery(A, module_C(gamma), V, D)


def type2_query(A, alpha, delta, gamma, D=12) -> ExtQuery:
    V = module_V(alpha, delta) if A.rank == 2 else module_M(alpha, delta)
    return ExtQuery(A, V, module_C(gamma), D)


def admissible_dbar(n, rng, count=3):
    """Random nonzero rational Delta_bar with Delta_bar + n nonzero, avoiding jump weights."""
    jumps = set(R_TYPE3_DIMS[n][1])
    out = []
    while len(out) < count:
        t = Fraction(rng.randint(-40, 40), rng.randint(1, 7))
        if t == 0 or t + n == 0 or t in jumps or t in out:
            continue
        out.append(t)
    return out


def matches_classes(q: ExtQuery, result, reps: list[Cocycle]) -> bool:
    """``reps`` are cocycles whose classes form a basis of the computed Ext space."""
    from lcext.extsolver import _cocycle_vector, build_cocycle_system, verify_cocycle
    from lcext.linalg import rref

    if len(reps) != result.ext_dim or not all(verify_cocycle(q, c) for c in reps):
        return False
    sysm = build_cocycle_system(q.with_degree(result.degree_bound))

    def vec(cs):
        return [_cocycle_vector(q, sysm, c) for c in cs]

    B = vec(result.coboundaries)
    with_reps = len(rref(B + vec(reps)))
    everything = len(rref(B + vec(reps) + vec(result.cocycle_basis)))
    return with_reps == len(B) + len(reps) == everything


def _falling(r: int, e: int) -> int:
    out = 1
    for i in range(e):
        out *= r - i
    return out


def _choose(p: int, j: int) -> Fraction:
    return Fraction(_falling(p, j), factorial(j))


def modes_from_jproducts(A, i, j, m, n):
    """[X_i[m], X_j[n]] with X[m] = X_(m+1), from j-products and the derivative rule."""
    p, q = m + 1, n + 1
    out = {}
    for jj, vec in enumerate(jproducts(A, i, j)):
        for k, poly in enumerate(vec):
            for (e,), c in poly.coefficients(("d",)).items():
                r = p + q - jj
                coeff = _choose(p, jj) * c.constant_term() * (-1) ** e * _falling(r, e)
                if coeff:
                    key = (k, r - e - 1)
                    out[key] = out.get(key, 0) + coeff
    return {k: v for k, v in out.items() if v}
