"""Acceptance criteria 1-9.  Every criterion prints one PASS/FAIL line.

Tolerances: all checks are exact (zero polynomials, exact rational or
quadratic-field arithmetic).  Extension dimensions use degree bound D = 12 and
are accepted only when the D = 14 computation spans the same classes.
Random parameters come from fixed seeds.

Run standalone with ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import properties  # noqa: E402
from lcext.annihilation import (  # noqa: E402
    build_truncation,
    check_graded_jacobi,
    derived_series,
    family_from_conformal,
    family_R_relations,
    filtration_checks,
)
from lcext.extsolver import Cocycle, ext_compute, special_values, stabilize  # noqa: E402
from lcext.lca import (  # noqa: E402
    DL,
    ConformalAlgebra,
    algebra_R,
    algebra_virasoro,
    check_axioms,
    novikov_algebra_N,
    novikov_to_conformal,
)
from lcext.modules import rank1_irreducible, rank1_solve, submodule_iso_check  # noqa: E402
from lcext.poly import MultiPoly  # noqa: E402
from reference_tables import (  # noqa: E402
    R_TYPE3_DIMS,
    SQRT19_MINUS,
    SQRT19_PLUS,
    Z,
    admissible_dbar,
    f_virasoro,
    l,
    matches_classes,
    r_query,
    r_type3_reps,
    type1_query,
    type2_query,
    vir_query,
)

D_BOUND = 12
R = algebra_R()
VIR = algebra_virasoro()


def _rat(rng: random.Random, lo: int = -12, hi: int = 12) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, 6))


def _stable(q):
    """Result at D = 12, flagged stable when D = 14 gives the same classes."""
    return stabilize(q.with_degree(D_BOUND))


def _dim_and_reps(q, reps) -> tuple[bool, str]:
    r = _stable(q)
    ok = r.stabilized and r.ext_dim == len(reps) and matches_classes(q, r, reps)
    return ok, f"{q.sub.name}->{q.quot.name}: dim {r.ext_dim}, stable {r.stabilized}"


def _fail_first(checks) -> tuple[bool, str]:
    count = 0
    for ok, detail in checks:
        count += 1
        if not ok:
            return False, detail
    return True, f"{count} checks"


# -- criteria ---------------------------------------------------------------------

def criterion_1() -> tuple[bool, str]:
    for A in (R, VIR, novikov_to_conformal(novikov_algebra_N())):
        rep = check_axioms(A)
        if not (rep.ok and not rep.witnesses):
            return False, f"{A.name} fails its axioms"
    d = MultiPoly.var("d", DL)
    table = dict(R.table)
    table[(1, 0)] = (Z, 2 * l)
    bad = check_axioms(ConformalAlgebra("perturbed", R.generators, table))
    if bad.ok or not bad.witnesses:
        return False, "perturbed bracket passed"
    skew = {w["generators"]: w["residual"] for w in bad.witnesses if w["axiom"] == "skew"}
    return skew.get(("L", "I")) == (Z, -d - l), "3 algebras pass, perturbed bracket has witnesses"


def criterion_2() -> tuple[bool, str]:
    fam = rank1_solve(R)
    members = {(str(m.f), str(m.g)) for m in fam.members}
    if not fam.verified or members != {("l*Delta + d + alpha", "0"), ("0", "0")}:
        return False, f"rank-one family {members}"
    rng = random.Random(202)
    for k in range(20):
        delta = Fraction(0) if k % 5 == 0 else _rat(rng)
        alpha = _rat(rng)
        if rank1_irreducible(delta, alpha).irreducible != (delta != 0):
            return False, f"irreducibility wrong at Delta={delta}"
    iso = submodule_iso_check()
    return iso.ok and iso.residual.is_zero(), "family, 20 irreducibility samples, iso residual"


def criterion_3() -> tuple[bool, str]:
    rng = random.Random(303)

    def checks():
        for delta, rep in ((1, l**2), (2, l**3)):
            a = _rat(rng)
            yield _dim_and_reps(type1_query(R, a, delta, -a), [Cocycle((rep, Z))])
        for _ in range(10):
            a, g = _rat(rng), _rat(rng)
            if a + g == 0:
                g += 1
            delta = rng.choice([Fraction(1), Fraction(2), _rat(rng)])
            yield _dim_and_reps(type1_query(R, a, delta, g), [])
        for delta in (3, 4, 5):
            a = _rat(rng)
            yield _dim_and_reps(type1_query(R, a, delta, -a), [])

    return _fail_first(checks())


def criterion_4() -> tuple[bool, str]:
    rng = random.Random(404)
    one = MultiPoly.const(1, DL)

    def checks():
        a = _rat(rng)
        yield _dim_and_reps(type2_query(R, a, 1, -a), [Cocycle((one, Z), MultiPoly.const(1, ("d",)))])
        yield _dim_and_reps(type2_query(R, a, 2, -a), [])
        for _ in range(10):
            a, g = _rat(rng), _rat(rng)
            if a + g == 0:
                g -= 1
            delta = rng.choice([Fraction(1), Fraction(2), _rat(rng)])
            yield _dim_and_reps(type2_query(R, a, delta, g), [])

    return _fail_first(checks())


def criterion_5() -> tuple[bool, str]:
    rng = random.Random(505)

    def checks():
        for n in range(9):
            weights = admissible_dbar(n, rng) + list(R_TYPE3_DIMS[n][1])
            for tb in weights:
                a = _rat(rng)
                yield _dim_and_reps(r_query(a, tb + n, a, tb), r_type3_reps(n, tb, a))
        for _ in range(5):
            a, ab = _rat(rng), _rat(rng)
            if a == ab:
                ab += 1
            tb = _rat(rng) or Fraction(1)
            n = rng.randint(0, 6)
            yield _dim_and_reps(r_query(a, tb + n, ab, tb), [])

    return _fail_first(checks())


def criterion_6() -> tuple[bool, str]:
    for n in range(9):
        sv = special_values(R, n, D_BOUND)
        generic, jumps = R_TYPE3_DIMS[n]
        if sv.generic_dim != generic or dict(sv.jumps) != jumps:
            return False, f"n={n}: generic {sv.generic_dim}, jumps {sv.jumps}"
    for t in (SQRT19_PLUS, SQRT19_MINUS):
        # Delta_bar solves t^2 + 5t + 3/2 = 0 and Delta = Delta_bar + 6 solves t^2 - 7t + 15/2 = 0
        if t * t + 5 * t + Fraction(3, 2) != 0 or (t + 6) ** 2 - 7 * (t + 6) + Fraction(15, 2) != 0:
            return False, f"substitution fails for {t}"
        if ext_compute(r_query(0, t + 6, 0, t)).ext_dim != 1:
            return False, f"no class at {t}"
    return True, "jump sets for n=0..8 and exact substitution of the quadratic weights"


def criterion_7() -> tuple[bool, str]:
    rng = random.Random(707)
    one = MultiPoly.const(1, DL)

    def checks():
        a = _rat(rng)
        yield _dim_and_reps(type1_query(VIR, a, 1, -a), [Cocycle((l**2,))])
        yield _dim_and_reps(type1_query(VIR, a, 2, -a), [Cocycle((l**3,))])
        yield _dim_and_reps(type1_query(VIR, a, 3, -a), [])
        yield _dim_and_reps(type2_query(VIR, a, 1, -a), [Cocycle((one,), MultiPoly.const(1, ("d",)))])
        yield _dim_and_reps(type2_query(VIR, a, 2, -a), [])
        tb = Fraction(3, 7)
        yield _dim_and_reps(vir_query(a, tb, a, tb), [Cocycle((one,)), Cocycle((l,))])
        for n in (2, 3, 4):
            yield _dim_and_reps(vir_query(a, tb + n, a, tb), [Cocycle((f_virasoro(n, tb, a),))])
        yield _dim_and_reps(vir_query(a, 1, a, -4), [Cocycle((f_virasoro(5, Fraction(-4), a),))])
        for t in (SQRT19_PLUS, SQRT19_MINUS):
            f = f_virasoro(6, t, a)
            top = f.coefficients(("d", "l")).get((0, 7)).constant_term()
            yield top == -(t + Fraction(9, 28)), "lambda^7 coefficient"
            yield _dim_and_reps(vir_query(a, t + 6, a, t), [Cocycle((f,))])
        for n in (1, 5, 6, 7):
            yield _dim_and_reps(vir_query(a, tb + n, a, tb), [])

    return _fail_first(checks())


def criterion_8() -> tuple[bool, str]:
    for F in (family_R_relations(), family_from_conformal(R)):
        rep = check_graded_jacobi(F)
        if not (rep.antisymmetry_ok and rep.jacobi_ok and rep.derivation_ok):
            return False, f"{F.name}: symbolic Jacobi residual"
    F = family_R_relations()
    for N in range(1, 9):
        dims = derived_series(build_truncation(F, N))
        if dims[-1] != 0 or len(dims) - 1 > N + 2:
            return False, f"N={N}: derived series {dims}"
    rep = filtration_checks(F, 4)
    return rep.commutator_ok and rep.derivation_ok, "Jacobi, derived series N=1..8, filtration at N=4"


def criterion_9() -> tuple[bool, str]:
    results = properties.run_all()
    bad = [r for r in results if not r.ok]
    if bad:
        return False, "; ".join(f"{r.name}: {r.detail}" for r in bad)
    return True, ", ".join(f"{r.name} ({r.cases})" for r in results)


CRITERIA = {
    1: ("axiom suite", criterion_1),
    2: ("rank-one classification", criterion_2),
    3: ("type-1 extensions over R", criterion_3),
    4: ("type-2 extensions over R", criterion_4),
    5: ("type-3 extension table over R", criterion_5),
    6: ("special weights", criterion_6),
    7: ("Virasoro extensions", criterion_7),
    8: ("annihilation algebra", criterion_8),
    9: ("property suites", criterion_9),
}


def _report(k: int) -> tuple[bool, str]:
    label, check = CRITERIA[k]
    ok, detail = check()
    line = f"criterion {k} ({label}): {'PASS' if ok else 'FAIL'} - {detail}"
    return ok, line


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, capsys):
    ok, line = _report(k)
    with capsys.disabled():
        print(f"\n{line}")
    assert ok, line


if __name__ == "__main__":
    outcomes = [_report(k) for k in sorted(CRITERIA)]
    for _, line in outcomes:
        print(line)
    sys.exit(0 if all(ok for ok, _ in outcomes) else 1)
