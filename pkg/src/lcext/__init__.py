"""Exact engine for Lie conformal algebras, their modules, and extensions between modules."""

from __future__ import annotations

__version__ = "0.1.0"

from .field import QuadraticNumber, format_scalar, quadratic, sqrt_rational
from .poly import MultiPoly, poly
from .linalg import PolyMatrix, ff_rank
from .roots import univ_roots
from .lca import (
    ConformalAlgebra,
    NovikovAlgebra,
    algebra_abelian,
    algebra_R,
    algebra_virasoro,
    check_axioms,
    jproducts,
    novikov_algebra_N,
    novikov_check,
    novikov_to_conformal,
)
from .modules import (
    FreeModule,
    TorsionModule,
    check_module,
    module_C,
    module_M,
    module_V,
    rank1_irreducible,
    rank1_solve,
    submodule_iso_check,
)
from .extsolver import (
    Cocycle,
    ExtQuery,
    ExtResult,
    build_cocycle_system,
    coboundary_basis,
    ext_compute,
    special_values,
    stabilize,
)
from .annihilation import (
    FiniteLieAlgebra,
    GradedLieFamily,
    build_truncation,
    check_graded_jacobi,
    derived_series,
    family_from_conformal,
    filtration_checks,
)
