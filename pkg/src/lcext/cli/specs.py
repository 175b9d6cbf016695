"""Loading algebras, Novikov algebras, modules and extension queries from JSON or strings."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from ..extsolver import ExtQuery, lead_generator
from ..lca import D, DL, LAM, AxiomReport, ConformalAlgebra, NovikovAlgebra, NovikovReport, check_axioms, novikov_check, novikov_to_conformal
from ..modules import FreeModule, ModuleSpec, TorsionModule, module_C, rank1
from ..poly import MultiPoly
from .parser import ParseError, parse_poly_expr, parse_rational

BUILTIN_ALGEBRAS = {"R": "r.json", "vir": "vir.json", "N": "novikov_n.json"}
BUILTIN_NOVIKOV = {"N": "novikov_n.json"}
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_MODULE = re.compile(r"^\s*([VMC])\s*\((.*)\)\s*$")


class SpecError(ValueError):
    """Malformed input: bad JSON, schema violation, unparsable expression (exit 2)."""

    def __init__(self, message: str, location: str = "", offset: int | None = None):
        super().__init__(message)
        self.location = location
        self.offset = offset

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": "input", "message": str(self), "location": self.location}
        if self.offset is not None:
            out["offset"] = self.offset
        return out


class VerificationError(ValueError):
    """An input object failed its axiom check on load (exit 1)."""

    def __init__(self, message: str, report: dict[str, Any]):
        super().__init__(message)
        self.report = report


class UnsupportedQuery(ValueError):
    """Well-formed input the engine does not handle (exit 3)."""


def schema(name: str) -> dict:
    return json.loads(resources.files("lcext").joinpath("schemas", f"{name}.schema.json").read_text())


def _bundled(filename: str) -> dict:
    return json.loads(resources.files("lcext").joinpath("data", filename).read_text())


def load_json(path: str | Path) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}", str(path)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc.msg}", f"{path}:{exc.lineno}:{exc.colno}", exc.pos) from None


def validate(doc: Any, name: str, source: str = "") -> None:
    validator = jsonschema.Draft202012Validator(schema(name))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path)
        raise SpecError(f"schema violation: {err.message}", f"{source}#/{where}")


def _poly(text: str, location: str, variables: tuple[str, ...]) -> MultiPoly:
    try:
        return parse_poly_expr(text, variables=variables)
    except ParseError as exc:
        raise SpecError(f"{exc.args[0]}", location, exc.offset) from None


def _pair(key: str, names: tuple[str, ...], location: str) -> tuple[int, int]:
    a, b = key.split(",")
    for x in (a, b):
        if x not in names:
            raise SpecError(f"undeclared name {x!r}", location)
    return names.index(a), names.index(b)


# -- algebras -----------------------------------------------------------------

def algebra_from_doc(doc: dict, source: str = "") -> ConformalAlgebra:
    validate(doc, "algebra", source)
    gens = tuple(doc["generators"])
    r = len(gens)
    table = {(i, j): [MultiPoly.zero(DL)] * r for i in range(r) for j in range(r)}
    for key, entry in doc["brackets"].items():
        i, j = _pair(key, gens, f"{source}#/brackets/{key}")
        for g, text in entry.items():
            loc = f"{source}#/brackets/{key}/{g}"
            if g not in gens:
                raise SpecError(f"undeclared generator {g!r}", loc)
            table[(i, j)][gens.index(g)] = _poly(text, loc, DL)
    return ConformalAlgebra(doc["name"], gens, {k: tuple(v) for k, v in table.items()})


def novikov_from_doc(doc: dict, source: str = "") -> tuple[NovikovAlgebra, tuple[str, ...] | None, str]:
    validate(doc, "novikov", source)
    basis = tuple(doc["basis"])
    products = {}
    for key, entry in doc["products"].items():
        i, j = _pair(key, basis, f"{source}#/products/{key}")
        for g, text in entry.items():
            if g not in basis:
                raise SpecError(f"undeclared basis element {g!r}", f"{source}#/products/{key}/{g}")
        products[(basis[i], basis[j])] = {g: parse_rational(v) for g, v in entry.items()}
    names = tuple(doc["generator_names"]) if "generator_names" in doc else None
    if names is not None and len(names) != len(basis):
        raise SpecError("generator_names must match the basis length", f"{source}#/generator_names")
    return NovikovAlgebra.from_products(basis, products), names, doc.get("name", "novikov")


def _resolve(ref: str, builtins: dict[str, str]) -> tuple[dict, str]:
    if ref.startswith("builtin:"):
        key = ref.split(":", 1)[1]
        if key not in builtins:
            raise SpecError(f"unknown builtin {key!r}; choose from {sorted(builtins)}", ref)
        return _bundled(builtins[key]), ref
    return load_json(ref), ref


@dataclass
class LoadedAlgebra:
    algebra: ConformalAlgebra
    axioms: AxiomReport | None
    novikov: NovikovReport | None = None
    source: str = ""
    notes: list[str] = field(default_factory=list)


def novikov_report_dict(rep: NovikovReport) -> dict:
    return {
        "left_sym_ok": rep.left_sym_ok,
        "right_sym_ok": rep.right_sym_ok,
        "witnesses": [
            {"identity": w["identity"], "triple": list(w["triple"]), "lhs": [str(x) for x in w["lhs"]], "rhs": [str(x) for x in w["rhs"]]}
            for w in rep.witnesses
        ],
    }


def axiom_report_dict(rep: AxiomReport, A: ConformalAlgebra) -> dict:
    out = []
    for w in rep.witnesses:
        item = {"axiom": w["axiom"], "generators": list(w["generators"])}
        item["residual"] = {name: str(p) for name, p in zip(A.generators, w["residual"]) if p}
        out.append(item)
    return {"skew_ok": rep.skew_ok, "jacobi_ok": rep.jacobi_ok, "witnesses": out}


def load_algebra(ref: str, verify: bool = True) -> LoadedAlgebra:
    """Algebra from ``builtin:R``, ``builtin:vir``, ``builtin:N`` or a JSON file (algebra or Novikov)."""
    doc, source = _resolve(ref, BUILTIN_ALGEBRAS)
    if not isinstance(doc, dict):
        raise SpecError("top-level JSON value must be an object", source)
    if doc.get("kind") == "novikov" or "products" in doc:
        N, names, name = novikov_from_doc(doc, source)
        rep = novikov_check(N)
        if not rep.ok:
            raise VerificationError("input is not a Novikov algebra", {"novikov": novikov_report_dict(rep)})
        A = novikov_to_conformal(N, names, name)
        loaded = LoadedAlgebra(A, None, rep, source)
    else:
        loaded = LoadedAlgebra(algebra_from_doc(doc, source), None, None, source)
    if verify:
        rep = check_axioms(loaded.algebra)
        loaded.axioms = rep
        if not rep.ok:
            raise VerificationError("algebra fails the axioms", {"axioms": axiom_report_dict(rep, loaded.algebra)})
    return loaded


def load_novikov(ref: str) -> tuple[NovikovAlgebra, tuple[str, ...] | None, str]:
    doc, source = _resolve(ref, BUILTIN_NOVIKOV)
    return novikov_from_doc(doc, source)


# -- modules ------------------------------------------------------------------

def _module_arg(text: str, location: str) -> Fraction | MultiPoly:
    s = text.strip()
    if _IDENT.fullmatch(s):
        if s in ("d", "l", "m"):
            raise SpecError(f"{s!r} is reserved for the core variables", location)
        return MultiPoly.var(s, DL + (s,))
    try:
        return parse_rational(s)
    except ValueError:
        raise SpecError(f"expected a rational or a parameter name, got {s!r}", location) from None


def _linear_action(alpha, delta) -> MultiPoly:
    d, l = MultiPoly.var(D, DL), MultiPoly.var(LAM, DL)
    return d + alpha + delta * l


def parse_module(text: str, A: ConformalAlgebra) -> ModuleSpec:
    """``V(a,D)`` / ``M(a,D)``: ``L`` (or the first generator) acts by ``d + a + D l``, the rest by 0.

    ``C(g)`` is the torsion module with ``d`` acting by ``g``.

    Arguments are rationals or parameter names (symbolic, for the checkers).
    """
    mt = _MODULE.match(text)
    if not mt:
        raise SpecError(f"not a module string: {text!r} (expected V(a,D), M(a,D) or C(g))", text)
    kind, inner = mt.group(1), mt.group(2)
    args = [_module_arg(a, text) for a in inner.split(",")] if inner.strip() else []
    if kind == "C":
        if len(args) != 1 or isinstance(args[0], MultiPoly):
            raise SpecError("C(g) takes one rational argument", text)
        return module_C(args[0])
    if len(args) != 2:
        raise SpecError(f"{kind}(a,D) takes two arguments", text)
    alpha, delta = args
    params = tuple(v for x in args if isinstance(x, MultiPoly) for v in x.used_vars())
    name = f"{kind}({inner.replace(' ', '')})"
    return rank1(name, A, {lead_generator(A): _linear_action(alpha, delta)}, params)


def module_from_doc(doc: dict, A: ConformalAlgebra, source: str = "") -> ModuleSpec:
    validate(doc, "module", source)
    if "builtin" in doc:
        return parse_module(doc["builtin"], A)
    if "torsion" in doc:
        return module_C(parse_rational(doc["torsion"]))
    params = tuple(doc.get("params", ()))
    variables = DL + params
    basis = tuple(doc["basis"])
    acts = {}
    for g, mat in doc["actions"].items():
        loc = f"{source}#/actions/{g}"
        if g not in A.generators:
            raise SpecError(f"undeclared generator {g!r}", loc)
        if len(mat) != len(basis) or any(len(row) != len(basis) for row in mat):
            raise SpecError(f"action matrix must be {len(basis)}x{len(basis)}", loc)
        acts[g] = tuple(tuple(_poly(e, f"{loc}/{r}/{c}", variables) for c, e in enumerate(row)) for r, row in enumerate(mat))
    for g in A.generators:
        acts.setdefault(g, tuple(tuple(MultiPoly.zero(variables) for _ in basis) for _ in basis))
    return FreeModule(doc.get("name", source or "module"), basis, acts, params)


def load_module(ref: str, A: ConformalAlgebra) -> ModuleSpec:
    """A module string such as ``V(0,1)``, or a path to a module JSON file."""
    if _MODULE.match(ref):
        return parse_module(ref, A)
    if not Path(ref).exists():
        raise SpecError(f"not a module string or existing file: {ref!r}", ref)
    return module_from_doc(load_json(ref), A, ref)


def is_concrete(M: ModuleSpec) -> bool:
    if isinstance(M, TorsionModule):
        return True
    return not M.params and all(
        not (set(p.used_vars()) - set(DL)) for mat in M.actions.values() for row in mat for p in row
    )


# -- extension queries ---------------------------------------------------------

_EXT_PARAMS = {
    1: ("alpha", "delta", "gamma"),
    2: ("alpha", "delta", "gamma"),
    3: ("alpha", "delta", "alpha_bar", "delta_bar"),
}


def query_from_doc(doc: dict, source: str = "", verify: bool = True) -> tuple[LoadedAlgebra, ExtQuery]:
    """``{"algebra", "type", "params", "max_degree"}`` to an :class:`ExtQuery`.

    Type 1 is C(gamma) -> ? -> V(alpha, delta) (torsion submodule), type 2 is
    V(alpha, delta) -> ? -> C(gamma), type 3 is V(alpha_bar, delta_bar) -> ? -> V(alpha, delta).
    """
    validate(doc, "ext_query", source)
    loaded = load_algebra(doc["algebra"], verify)
    A = loaded.algebra
    t = doc["type"]
    vals = {k: parse_rational(v) for k, v in doc["params"].items()}
    missing = [k for k in _EXT_PARAMS[t] if k not in vals]
    if missing:
        raise SpecError(f"type {t} needs parameters {missing}", f"{source}#/params")
    extra = [k for k in vals if k not in _EXT_PARAMS[t]]
    if extra:
        raise SpecError(f"type {t} does not use parameters {extra}", f"{source}#/params")

    def free(a, dl):
        return rank1(f"V({a},{dl})", A, {lead_generator(A): _linear_action(a, dl)})

    D_ = doc.get("max_degree", 12)
    if t == 1:
        q = ExtQuery(A, module_C(vals["gamma"]), free(vals["alpha"], vals["delta"]), D_)
    elif t == 2:
        q = ExtQuery(A, free(vals["alpha"], vals["delta"]), module_C(vals["gamma"]), D_)
    else:
        q = ExtQuery(A, free(vals["alpha_bar"], vals["delta_bar"]), free(vals["alpha"], vals["delta"]), D_)
    return loaded, q
