"""Command-line entry point: ``lcext <command> [options]``.

Every command prints one report (JSON by default, ``--text`` for a flat
listing) and exits 0 on success, 1 on a failed verification, 2 on malformed
input and 3 on a query the engine does not handle.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any, Callable

from .. import __version__
from ..annihilation import (
    TruncationError,
    build_truncation,
    check_graded_jacobi,
    derived_series,
    family_from_conformal,
    filtration_checks,
    novikov_mode_oracle,
)
from ..extsolver import ExtQuery, ExtResult, QueryError, special_values, stabilize, verify_cocycle
from ..field import format_scalar
from ..lca import check_axioms, novikov_check, novikov_to_conformal
from ..modules import DimensionMismatch, TorsionModule, UnsupportedAlgebra, check_module, rank1_solve
from ..poly import MultiPoly
from .parser import ParseError, parse_rational
from .specs import (
    SpecError,
    UnsupportedQuery,
    VerificationError,
    axiom_report_dict,
    is_concrete,
    load_algebra,
    load_json,
    load_module,
    load_novikov,
    novikov_report_dict,
    query_from_doc,
)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_UNSUPPORTED = 0, 1, 2, 3
STATUS = {EXIT_OK: "ok", EXIT_VERIFY: "verification_failed", EXIT_INPUT: "input_error", EXIT_UNSUPPORTED: "unsupported"}


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgumentError(message)


def _table(A) -> dict[str, dict[str, str]]:
    return {
        f"{A.generators[i]},{A.generators[j]}": {g: str(p) for g, p in zip(A.generators, vec) if p}
        for (i, j), vec in sorted(A.table.items())
    }


def _module_dict(M) -> dict:
    if isinstance(M, TorsionModule):
        return {"kind": "torsion", "name": M.name, "gamma": format_scalar(M.gamma), "irreducible": M.irreducible}
    return {
        "kind": "free",
        "name": M.name,
        "basis": list(M.basis),
        "params": list(M.params),
        "actions": {g: [[str(e) for e in row] for row in mat] for g, mat in sorted(M.actions.items())},
    }


# -- commands ------------------------------------------------------------------

def cmd_algebra_check(args) -> tuple[int, dict]:
    loaded = load_algebra(args.algebra, verify=False)
    A = loaded.algebra
    rep = check_axioms(A)
    result = {"algebra": A.name, "generators": list(A.generators), "table": _table(A), "axioms": axiom_report_dict(rep, A)}
    return (EXIT_OK if rep.ok else EXIT_VERIFY), result


def cmd_novikov_build(args) -> tuple[int, dict]:
    N, names, name = load_novikov(args.novikov)
    rep = novikov_check(N)
    result: dict[str, Any] = {"basis": list(N.basis), "novikov": novikov_report_dict(rep)}
    if not rep.ok:
        return EXIT_VERIFY, result
    A = novikov_to_conformal(N, names, name)
    axioms = check_axioms(A)
    oracle = novikov_mode_oracle(N, A)
    result.update(
        {
            "algebra": A.name,
            "generators": list(A.generators),
            "table": _table(A),
            "axioms": axiom_report_dict(axioms, A),
            "mode_oracle": {"ok": oracle.ok, "window": oracle.window, "mismatches": oracle.mismatches},
        }
    )
    return (EXIT_OK if axioms.ok and oracle.ok else EXIT_VERIFY), result


def cmd_module_check(args) -> tuple[int, dict]:
    A = load_algebra(args.algebra, verify=not args.no_verify).algebra
    M = load_module(args.module, A)
    try:
        rep = check_module(A, M)
    except DimensionMismatch as exc:
        raise SpecError(str(exc), args.module) from None
    witnesses = [
        {"generators": list(w["generators"]), "residual": [[str(e) for e in row] for row in w["residual"]]}
        for w in rep.witnesses
    ]
    result = {"algebra": A.name, "module": _module_dict(M), "ok": rep.ok, "witnesses": witnesses, "notes": list(rep.notes)}
    return (EXIT_OK if rep.ok else EXIT_VERIFY), result


def cmd_rank1_solve(args) -> tuple[int, dict]:
    A = load_algebra(args.algebra, verify=not args.no_verify).algebra
    fam = rank1_solve(A, max_degree=args.max_degree)
    result = {
        "algebra": fam.algebra,
        "members": [
            {"f": str(m.f), "g": None if m.g is None else str(m.g), "params": list(m.params)} for m in fam.members
        ],
        "stages": fam.stages,
        "verified": fam.verified,
    }
    return (EXIT_OK if fam.verified else EXIT_VERIFY), result


def _ext_dict(q: ExtQuery, r: ExtResult, verified: list[bool]) -> dict:
    return {
        "pair_type": r.pair_type,
        "sub": _module_dict(q.sub),
        "quot": _module_dict(q.quot),
        "ext_dim": r.ext_dim,
        "cocycle_basis": [c.as_dict() for c in r.cocycle_basis],
        "cocycles_verified": verified,
        "cocycle_space_dim": r.cocycle_space_dim,
        "coboundary_dim": r.coboundary_dim,
        "degree_bound": r.degree_bound,
        "stabilized": r.stabilized,
        "graded": r.graded,
        "shift": format_scalar(r.shift),
        "block_dims": {str(k): v for k, v in sorted(r.block_dims.items())},
        "warnings": list(r.warnings),
    }


def cmd_ext(args) -> tuple[int, dict]:
    if args.query:
        if args.sub or args.quot:
            raise SpecError("--query cannot be combined with --sub/--quot", "argv")
        loaded, q = query_from_doc(load_json(args.query), args.query, verify=not args.no_verify)
        if args.max_degree_given:
            q = q.with_degree(args.max_degree)
    else:
        if not (args.sub and args.quot):
            raise SpecError("ext needs --sub and --quot, or --query", "argv")
        A = load_algebra(args.algebra, verify=not args.no_verify).algebra
        q = ExtQuery(A, load_module(args.sub, A), load_module(args.quot, A), args.max_degree)
    for M in (q.sub, q.quot):
        if not is_concrete(M):
            raise UnsupportedQuery(f"module {M.name} has symbolic parameters; the solver needs concrete values")
    r = stabilize(q)
    verified = [verify_cocycle(q, c) for c in r.cocycle_basis]
    code = EXIT_OK if all(verified) else EXIT_VERIFY
    return code, _ext_dict(q, r, verified)


def cmd_special(args) -> tuple[int, dict]:
    A = load_algebra(args.algebra, verify=not args.no_verify).algebra
    try:
        n = parse_rational(args.delta_diff)
    except ValueError as exc:
        raise SpecError(str(exc), "--delta-diff") from None
    sv = special_values(A, n, args.max_degree)
    shift = Fraction(0) if args.param_sweep == "delta_bar" else n

    def show(pairs):
        return [{args.param_sweep: format_scalar(v + shift), "ext_dim": d} for v, d in pairs]

    t = MultiPoly.var("t", ("t",))
    result = {
        "algebra": A.name,
        "delta_diff": format_scalar(n),
        "param": args.param_sweep,
        "degree_bound": sv.degree_bound,
        "generic_dim": sv.generic_dim,
        "jumps": show(sv.jumps),
        "excluded": show(sv.excluded),
        "candidates_checked": len(sv.candidates),
        "unresolved_factors": [
            str(sum((t ** k * c for k, c in enumerate(f)), MultiPoly.zero(("t",)))) for f in sv.residual_factors
        ],
    }
    return EXIT_OK, result


def cmd_ann_solvable(args) -> tuple[int, dict]:
    if args.N < 1:
        raise SpecError("--N must be at least 1", "--N")
    A = load_algebra(args.algebra, verify=not args.no_verify).algebra
    F = family_from_conformal(A)
    g = build_truncation(F, args.N)
    anti, jac, wit = g.check()
    dims = derived_series(g)
    result = {
        "algebra": A.name,
        "N": args.N,
        "dimension": g.dim,
        "basis": list(g.labels),
        "antisymmetry_ok": anti,
        "jacobi_ok": jac,
        "witnesses": [list(w) for w in wit],
        "derived_series": dims,
        "solvable": dims[-1] == 0,
        "derived_length": len(dims) - 1,
    }
    if args.N >= 2:
        fc = filtration_checks(F, args.N)
        result["filtration"] = {
            "commutator_dim": fc.commutator_dim,
            "commutator_basis": fc.commutator_labels,
            "commutator_ok": fc.commutator_ok,
            "derivation_ok": fc.derivation_ok,
        }
    ok = anti and jac and dims[-1] == 0
    return (EXIT_OK if ok else EXIT_VERIFY), result


def cmd_ann_jacobi(args) -> tuple[int, dict]:
    A = load_algebra(args.algebra, verify=not args.no_verify).algebra
    F = family_from_conformal(A)
    rep = check_graded_jacobi(F)
    result = {
        "algebra": A.name,
        "relations": F.relations(),
        "antisymmetry_ok": rep.antisymmetry_ok,
        "jacobi_ok": rep.jacobi_ok,
        "derivation_ok": rep.derivation_ok,
        "witnesses": rep.witnesses,
    }
    return (EXIT_OK if rep.ok else EXIT_VERIFY), result


# -- argument parsing ------------------------------------------------------------

def _common(p: argparse.ArgumentParser, algebra: bool = True) -> None:
    if algebra:
        p.add_argument("--algebra", default="builtin:R", help="builtin:R, builtin:vir, builtin:N or a JSON file")
    p.add_argument("--no-verify", action="store_true", help="skip the axiom check when loading the algebra")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json", help="JSON report (default)")
    fmt.add_argument("--text", dest="format", action="store_const", const="text", help="flat text report")
    p.set_defaults(format="json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lcext", description="Exact computations with Lie conformal algebras and their modules.")
    parser.add_argument("--version", action="version", version=f"lcext {__version__}")
    sub = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    alg = sub.add_parser("algebra", help="algebra tables").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = alg.add_parser("check", help="check skew-symmetry and Jacobi")
    _common(p)
    p.set_defaults(func=cmd_algebra_check)

    nov = sub.add_parser("novikov", help="Novikov algebras").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = nov.add_parser("build", help="build the conformal algebra of a Novikov algebra")
    p.add_argument("--novikov", default="builtin:N", help="builtin:N or a JSON file")
    _common(p, algebra=False)
    p.set_defaults(func=cmd_novikov_build)

    mod = sub.add_parser("module", help="conformal modules").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = mod.add_parser("check", help="check the module axioms")
    p.add_argument("--module", required=True, help='module string such as "V(0,1)", "V(a,D)", "C(2)" or a JSON file')
    _common(p)
    p.set_defaults(func=cmd_module_check)

    r1 = sub.add_parser("rank1", help="rank-one modules").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = r1.add_parser("solve", help="classify rank-one modules")
    p.add_argument("--max-degree", type=int, default=6, help="degree cap for the generic ansatz (default 6)")
    _common(p)
    p.set_defaults(func=cmd_rank1_solve)

    p = sub.add_parser("ext", help="extension group between two modules")
    p.add_argument("--sub", help="submodule (module string or JSON file)")
    p.add_argument("--quot", help="quotient module (module string or JSON file)")
    p.add_argument("--query", help="extension query JSON file (replaces --algebra/--sub/--quot)")
    p.add_argument("--max-degree", type=int, default=None, help="degree bound D (default 12); D+2 is used to check stability")
    _common(p)
    p.set_defaults(func=cmd_ext)

    p = sub.add_parser("special", help="weights where the type-3 extension dimension jumps")
    p.add_argument("--delta-diff", required=True, help="n = Delta - Delta_bar (rational)")
    p.add_argument("--max-degree", type=int, default=12)
    p.add_argument("--param-sweep", choices=("delta_bar", "delta"), default="delta_bar", help="report jumps by this weight")
    _common(p)
    p.set_defaults(func=cmd_special)

    ann = sub.add_parser("ann", help="annihilation algebras").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = ann.add_parser("solvable", help="derived series of the truncation at N")
    p.add_argument("--N", type=int, required=True)
    _common(p)
    p.set_defaults(func=cmd_ann_solvable)
    p = ann.add_parser("jacobi", help="symbolic-index Jacobi check of the mode family")
    _common(p)
    p.set_defaults(func=cmd_ann_jacobi)
    return parser


def _options(args) -> dict:
    skip = {"func", "format", "group", "action", "max_degree_given"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def render_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def render_text(report: dict) -> str:
    lines: list[str] = []

    def walk(prefix: str, v):
        if isinstance(v, dict):
            if not v:
                lines.append(f"{prefix}: {{}}")
            for k in sorted(v):
                walk(f"{prefix}.{k}" if prefix else str(k), v[k])
        elif isinstance(v, list):
            if not v:
                lines.append(f"{prefix}: []")
            for i, x in enumerate(v):
                walk(f"{prefix}[{i}]", x)
        else:
            lines.append(f"{prefix}: {json.dumps(v) if not isinstance(v, str) else v}")

    walk("", report)
    return "\n".join(lines) + "\n"


def run(argv: list[str]) -> tuple[int, dict, str]:
    """Parse ``argv``, run the command, and return (exit code, report, rendered text)."""
    fmt = "text" if "--text" in argv else "json"
    command = " ".join(a for a in argv[:2] if not a.startswith("-"))
    report: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "engine_version": __version__,
        "command": command,
        "options": {},
        "result": None,
    }
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "max_degree", 0) is None:
            args.max_degree, args.max_degree_given = 12, False
        else:
            args.max_degree_given = True
        if getattr(args, "max_degree", 0) < 0:
            raise SpecError("--max-degree must be non-negative", "--max-degree")
        fmt = args.format
        report["command"] = " ".join(x for x in (args.group, getattr(args, "action", None)) if x)
        report["options"] = _options(args)
        handler: Callable = args.func
        code, result = handler(args)
        report["result"] = result
    except _ArgumentError as exc:
        code, report["error"] = EXIT_INPUT, {"kind": "usage", "message": str(exc)}
    except SpecError as exc:
        code, report["error"] = EXIT_INPUT, exc.as_dict()
    except ParseError as exc:
        code, report["error"] = EXIT_INPUT, {"kind": "input", "message": str(exc), "offset": exc.offset}
    except VerificationError as exc:
        code, report["error"] = EXIT_VERIFY, {"kind": "verification", "message": str(exc)}
        report["result"] = exc.report
    except (UnsupportedQuery, UnsupportedAlgebra, QueryError, TruncationError) as exc:
        code, report["error"] = EXIT_UNSUPPORTED, {"kind": "unsupported", "message": str(exc)}
    report["status"] = STATUS[code]
    text = render_text(report) if fmt == "text" else render_json(report)
    return code, report, text


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        code, _, text = run(argv)
    except SystemExit as exc:  # --help and --version print and exit through argparse
        return int(exc.code or 0)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
