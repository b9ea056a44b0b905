from .expr import (Bin, Bool, Expr, Ite, NAry, Not, Real, Rel, Var,
                   canonical, print_expr)
from .parser import parse_expr, parse_program
from .positions import EPSILON, Position, parse_position, replace_at, subterm_at
from .program import (Program, canonical_eq, canonical_text, evaluate,
                      print_program)
from .decompose import (Decomposition, EnumerationLimits, EnumerationResult,
                        enumerate_decompositions, make_decomposition,
                        path_literals, substitute_all)

__all__ = [
    "Bin", "Bool", "Expr", "Ite", "NAry", "Not", "Real", "Rel", "Var",
    "canonical", "print_expr", "parse_expr", "parse_program",
    "EPSILON", "Position", "parse_position", "replace_at", "subterm_at",
    "Program", "canonical_eq", "canonical_text", "evaluate", "print_program",
    "Decomposition", "EnumerationLimits", "EnumerationResult",
    "enumerate_decompositions", "make_decomposition", "path_literals",
    "substitute_all",
]
