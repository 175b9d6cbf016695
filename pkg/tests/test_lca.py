from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from lcext.lca import (
    DL,
    ConformalAlgebra,
    IncompleteTableError,
    NotNovikovError,
    NovikovAlgebra,
    algebra_abelian,
    algebra_R,
    algebra_virasoro,
    bracket_from_jproducts,
    check_axioms,
    jproducts,
    loop_bracket,
    novikov_algebra_N,
    novikov_bracket_table,
    novikov_check,
    novikov_to_conformal,
)
from lcext.poly import MultiPoly
from reference_tables import modes_from_jproducts

d, l = MultiPoly.var("d", DL), MultiPoly.var("l", DL)
Z = MultiPoly.zero(DL)


def perturbed_R() -> ConformalAlgebra:
    A = algebra_R()
    table = dict(A.table)
    table[(1, 0)] = (Z, 2 * l)  # [I_l L] = 2 l I
    return ConformalAlgebra("R'", A.generators, table)


def test_builtin_algebras_pass():
    for A in (algebra_R(), algebra_virasoro(), algebra_abelian(1), novikov_to_conformal(novikov_algebra_N(), ("I", "L"))):
        rep = check_axioms(A)
        assert rep.skew_ok and rep.jacobi_ok and not rep.witnesses, A.name


def test_perturbed_bracket_fails_with_witness():
    rep = check_axioms(perturbed_R())
    assert not rep.skew_ok
    skew = {w["generators"]: w["residual"] for w in rep.witnesses if w["axiom"] == "skew"}
    # by hand: 2l I + [L_{-l-d} I] = 2l I + (d + (-l - d)) I = l I
    assert skew[("I", "L")] == (Z, l)
    # and 2(-l-d) I + (d + l) I for the mirrored pair
    assert skew[("L", "I")] == (Z, -d - l)


def test_incomplete_table_rejected():
    with pytest.raises(IncompleteTableError):
        ConformalAlgebra("bad", ("L", "I"), {(0, 0): (d, Z)})


def test_jproducts_examples():
    A = algebra_R()
    assert jproducts(A, "L", "L") == [(d, d), (2 + Z, 2 + Z)]
    assert jproducts(A, "I", "I") == []
    assert jproducts(A, "L", "I") == [(Z, d), (Z, 1 + Z)]
    with pytest.raises(IndexError):
        jproducts(A, 0, 5)


def test_jproducts_round_trip():
    for A in (algebra_R(), algebra_virasoro(), novikov_to_conformal(novikov_algebra_N())):
        for i in range(A.rank):
            for j in range(A.rank):
                assert bracket_from_jproducts(jproducts(A, i, j), A.rank) == A.table[(i, j)]


def test_derivative_jproduct_rule():
    # [(dL)_l L] = -l [L_l L]; its (1)-product must be -(L_(0) L)
    A = algebra_R()
    vec = tuple(-l * p for p in A.bracket("L", "L"))
    one = tuple(p.coefficient("l", 1).with_vars(("d",)) for p in vec)
    zero = jproducts(A, "L", "L")[0]
    assert one == tuple(-p for p in zero)


def test_novikov_examples():
    assert novikov_check(novikov_algebra_N()).ok
    e = NovikovAlgebra.from_products(("e",), {("e", "e"): {"e": 1}})
    assert novikov_check(e).ok
    bad = NovikovAlgebra.from_products(("e1", "e2"), {("e1", "e2"): {"e1": 1}, ("e2", "e1"): {"e2": 1}})
    rep = novikov_check(bad)
    assert not rep.left_sym_ok
    w = rep.witnesses[0]
    # (e1 e2) e1 - e1 (e2 e1) = -e1 and (e2 e1) e1 - e2 (e1 e1) = e2, by hand
    assert w["triple"] == ("e1", "e2", "e1")
    assert w["lhs"] == [-1, 0] and w["rhs"] == [0, 1]
    with pytest.raises(NotNovikovError):
        novikov_to_conformal(bad)


def test_novikov_N_reproduces_R():
    A = novikov_to_conformal(novikov_algebra_N(), ("I", "L"))
    I, L = 0, 1
    assert A.table[(L, L)] == (d + 2 * l, d + 2 * l)
    assert A.table[(L, I)] == (d + l, Z)
    assert A.table[(I, L)] == (l, Z)
    assert A.table[(I, I)] == (Z, Z)


def test_one_dimensional_novikov_algebras():
    zero = NovikovAlgebra.from_products(("a",), {})
    assert novikov_to_conformal(zero).table[(0, 0)] == (Z,)
    e = NovikovAlgebra.from_products(("e",), {("e", "e"): {"e": 1}})
    assert novikov_to_conformal(e).table[(0, 0)] == (d + 2 * l,)


@pytest.mark.parametrize("N", [novikov_algebra_N(), NovikovAlgebra.from_products(("e",), {("e", "e"): {"e": 1}})])
def test_closed_form_matches_loop_bracket(N):
    A = novikov_to_conformal(N)
    for i, j in itertools.product(range(N.dim), repeat=2):
        for m in range(-6, 7):
            for n in range(-6, 7):
                assert modes_from_jproducts(A, i, j, m, n) == loop_bracket(N, i, j, m, n)


def _table_is_conformal(N: NovikovAlgebra) -> bool:
    return check_axioms(ConformalAlgebra("x", N.basis, novikov_bracket_table(N))).ok


def test_novikov_iff_axioms_exhaustive_01():
    seen = {True: 0, False: 0}
    for bits in itertools.product((0, 1), repeat=8):
        c = [[[Fraction(bits[4 * i + 2 * j + k]) for k in range(2)] for j in range(2)] for i in range(2)]
        N = NovikovAlgebra(("e1", "e2"), tuple(tuple(tuple(x) for x in row) for row in c))
        ok = novikov_check(N).ok
        seen[ok] += 1
        assert ok == _table_is_conformal(N)
    assert seen[True] > 0 and seen[False] > 0


def test_novikov_iff_axioms_random():
    rng = random.Random(31)
    vals = [Fraction(-1), Fraction(0), Fraction(0), Fraction(1), Fraction(1, 2)]
    for _ in range(150):
        c = tuple(tuple(tuple(rng.choice(vals) for _ in range(2)) for _ in range(2)) for _ in range(2))
        N = NovikovAlgebra(("e1", "e2"), c)
        assert novikov_check(N).ok == _table_is_conformal(N)
