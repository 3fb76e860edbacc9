"""Difference-logic toolkit: exact solvers, certificates, and reductions."""

from .core import (
    Assignment,
    Atom,
    Constraint,
    Instance,
    Interval,
    Rational,
    eval_atom,
    eval_constraint,
    eval_instance,
    intersect_intervals,
    make_instance,
    normalize_pairwise,
    num_bound,
    to_unit_disjuncts,
)
from .textio import ParseError, parse_instance, print_instance, print_model

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "Atom",
    "Constraint",
    "Instance",
    "Interval",
    "ParseError",
    "Rational",
    "eval_atom",
    "eval_constraint",
    "eval_instance",
    "intersect_intervals",
    "make_instance",
    "normalize_pairwise",
    "num_bound",
    "parse_instance",
    "print_instance",
    "print_model",
    "to_unit_disjuncts",
    "__version__",
]
