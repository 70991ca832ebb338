"""astdkit: parse, animate, model-check, refinement-check and translate
ASTD specifications coupled with a finite B-like data model."""

from .control import Event
from .diagnostics import Diagnostic, EvalError, ParseError, SpecError, StaticError
from .document import SpecDoc
from .engine import CombinedState, Engine, Lts, lts_to_dot, lts_to_json
from .parser import parse, parse_expr, parse_or_diagnostics, parse_pred
from .render import render_spec
from .static_check import check_static

__all__ = [
    "CombinedState",
    "Diagnostic",
    "Engine",
    "EvalError",
    "Event",
    "Lts",
    "ParseError",
    "SpecDoc",
    "SpecError",
    "StaticError",
    "check_static",
    "lts_to_dot",
    "lts_to_json",
    "parse",
    "parse_expr",
    "parse_or_diagnostics",
    "parse_pred",
    "render_spec",
]

__version__ = "0.1.0"
