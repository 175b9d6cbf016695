from __future__ import annotations

import random
from fractions import Fraction

import pytest

from lcext.extsolver import (
    Cocycle,
    ExtQuery,
    QueryError,
    build_cocycle_system,
    class_in_span,
    coboundary_basis,
    cocycle_space,
    ext_compute,
    special_values,
    stabilize,
    verify_cocycle,
)
from lcext.lca import algebra_R, algebra_virasoro
from lcext.modules import module_C
from reference_tables import (
    SQRT19_MINUS,
    Z,
    d,
    f_virasoro,
    l,
    matches_classes,
    r_query,
    type1_query,
    type2_query,
    vir_query,
)

R = algebra_R()


def test_type1_system_size_and_nullspace():
    q = type1_query(R, 0, 1, 0, D=3)
    sysm = build_cocycle_system(q)
    assert len(sysm.unknown_basis) == 8
    sols = cocycle_space(q)
    assert len(sols) == 2
    # the solutions span {l, l^2} in f with g = 0
    assert {str(c.f) for c in sols} == {"l", "l^2"}
    assert all(c.g.is_zero() for c in sols)


def test_type3_distinct_alpha_is_all_coboundary():
    q = r_query(Fraction(1, 2), 3, 0, 1, D=6)
    r = ext_compute(q)
    assert r.ext_dim == 0 and r.cocycle_space_dim == r.coboundary_dim
    assert all(c.g is None or c.g.is_zero() for c in cocycle_space(q))


def test_type2_forces_g_zero():
    for alpha, delta, gamma in [(0, 1, 0), (1, 2, 3), (Fraction(1, 3), -2, 5)]:
        for c in cocycle_space(type2_query(R, alpha, delta, gamma, D=5)):
            assert c.g.is_zero()


def test_coboundary_examples():
    # type 1 with alpha + gamma = 2, Delta = 1: scalar multiples of 2 + l
    basis = coboundary_basis(type1_query(R, 1, 1, 1, D=4))
    assert len(basis) == 1 and basis[0].f == 2 + l and basis[0].g.is_zero()
    # type 3 with equal weights: phi = 1 gives nothing, so no degree-0 coboundary
    basis = coboundary_basis(r_query(0, 1, 0, 1, D=4))
    assert all(c.f.degree() >= 2 for c in basis)
    # type 2, phi = 1: f = d + alpha + Delta l, a = d - gamma
    basis = coboundary_basis(type2_query(R, 2, 3, 5, D=3))
    first = basis[0]
    assert first.f == d + 2 + 3 * l and first.g.is_zero()
    assert str(first.a) == "d - 5"


def test_coboundaries_are_cocycles():
    for q in (type1_query(R, 0, 1, 0, D=5), type2_query(R, 0, 1, 0, D=5), r_query(0, 3, 0, 1, D=6)):
        for c in coboundary_basis(q):
            assert verify_cocycle(q, c)


def test_ext_examples():
    r = ext_compute(type1_query(R, 0, 1, 0))
    assert r.ext_dim == 1 and matches_classes(type1_query(R, 0, 1, 0), r, [Cocycle((l**2, Z))])
    q = r_query(0, 1, 0, 1)
    r = ext_compute(q)
    assert r.ext_dim == 2 and matches_classes(q, r, [Cocycle((1 + Z, Z)), Cocycle((l, Z))])
    q = r_query(0, 1, 0, -1)
    r = ext_compute(q)
    assert r.ext_dim == 2 and class_in_span(q, r, Cocycle((l**2 - d**2, (d + l) * l)))
    q = type2_query(R, 0, 1, 0)
    r = ext_compute(q)
    assert r.ext_dim == 1 and matches_classes(q, r, [Cocycle((1 + Z, Z), 1 + Z)])
    assert ext_compute(type1_query(R, 1, 1, 0)).ext_dim == 0


def test_virasoro_degree3_example():
    a = Fraction(2, 3)
    q = vir_query(a, Fraction(5, 2), a, Fraction(-1, 2))
    r = ext_compute(q)
    assert r.ext_dim == 1
    assert matches_classes(q, r, [Cocycle((f_virasoro(3, Fraction(-1, 2), a),))])


def test_wrong_representative_rejected():
    q = r_query(0, 3, 0, 1)
    r = ext_compute(q)
    assert not class_in_span(q, r, Cocycle((l**2, Z)))


def test_torsion_pair_rejected():
    with pytest.raises(QueryError):
        ExtQuery(R, module_C(1), module_C(2)).pair_type


def test_stabilize_examples():
    r = stabilize(r_query(0, 1, 0, 1, D=8))
    assert r.ext_dim == 2 and r.stabilized and r.degree_bound == 8
    r = stabilize(type1_query(R, 0, 2, 0, D=5))
    assert r.ext_dim == 1 and r.stabilized and str(r.cocycle_basis[0].f).endswith("l^3")
    r = stabilize(r_query(0, SQRT19_MINUS + 6, 0, SQRT19_MINUS, D=1))
    assert not r.stabilized


def test_shift_invariance():
    rng = random.Random(5)
    for n, t in [(0, Fraction(3)), (1, Fraction(-2, 3)), (3, Fraction(1, 2)), (4, Fraction(7))]:
        base = ext_compute(r_query(0, t + n, 0, t, D=8))
        a = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        shifted = ext_compute(r_query(a, t + n, a, t, D=8))
        assert base.ext_dim == shifted.ext_dim
        assert base.cocycle_space_dim == shifted.cocycle_space_dim


def test_monotone_in_degree_bound():
    q = r_query(0, 2, 0, -2)
    dims = [ext_compute(q.with_degree(D)).cocycle_space_dim for D in range(1, 9)]
    assert dims == sorted(dims)
    ext = [ext_compute(q.with_degree(D)).ext_dim for D in range(5, 10)]
    assert len(set(ext)) == 1


def test_special_values_n5():
    sv = special_values(R, 5, 12)
    assert sv.generic_dim == 0 and sv.jumps == [(Fraction(-4), 1)]


def test_special_values_unsupported():
    from lcext.lca import algebra_abelian

    with pytest.raises(QueryError):
        special_values(algebra_abelian(1), 2)


def test_virasoro_sample_at_jump_is_verified():
    q = vir_query(0, 1, 0, -4)
    r = ext_compute(q)
    assert r.ext_dim == 1 and all(verify_cocycle(q, c) for c in r.cocycle_basis)
