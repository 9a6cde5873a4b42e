"""certlog: relational logic programming with certified answers.

Queries are solved miniKanren-style (substitution streams, backtracking,
fair interleaving) and every solution carries a theorem, built by a small
trusted kernel, certifying it against the loaded Horn-clause theory.
"""

from .kernel import (
    Instantiation,
    KernelError,
    Signature,
    Term,
    Theorem,
    TypeMismatch,
    alpha_eq,
)
from .solver import Goal, Goalstate, Solution, solve, prove
from .syntax import ParseError, numeral_decode, numeral_encode, parse_query, parse_term, print_term, print_theorem
from .theories import load_builtin, load_path, rename_fresh, theory_context
from .theory import Theory, TheoryError, parse_solver

__version__ = "0.1.0"

__all__ = [
    "Goal",
    "Goalstate",
    "Instantiation",
    "KernelError",
    "ParseError",
    "Signature",
    "Solution",
    "Term",
    "Theorem",
    "Theory",
    "TheoryError",
    "TypeMismatch",
    "alpha_eq",
    "load_builtin",
    "load_path",
    "numeral_decode",
    "numeral_encode",
    "parse_query",
    "parse_solver",
    "parse_term",
    "print_term",
    "print_theorem",
    "prove",
    "rename_fresh",
    "solve",
    "theory_context",
]
