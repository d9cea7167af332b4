"""LTL over Kripke structures and traces."""

from .buchi import Verdict, check_structure, to_core
from .kripke import KripkeStructure, load_kripke
from .syntax import (Always, And, Atom, Bool, Eventually, Formula, Implies, Next, Not, Or, Until,
                     atoms, occurrences, parse_ltl, replace_at, to_str)
from .trace import Evaluation, Trace, check_trace, load_trace, parse_trace_csv

__all__ = [
    "Always", "And", "Atom", "Bool", "Eventually", "Evaluation", "Formula", "Implies", "KripkeStructure",
    "Next", "Not", "Or", "Trace", "Until", "Verdict", "atoms", "check_structure", "check_trace",
    "load_kripke", "load_trace", "occurrences", "parse_ltl", "parse_trace_csv", "replace_at", "to_core",
    "to_str",
]
