"""Command-line surface: expression parser, spec loading and command dispatch."""

from .parser import ParseError, parse_poly_expr

__all__ = ["ParseError", "parse_poly_expr"]
