"""Scenario language: parsing, execution and output."""

from .ast import Scenario, Span, pretty_print
from .emit import emit
from .execute import ScenarioRuntimeError, execute, run_sweep
from .parser import ParseError, parse

__all__ = [
    "ParseError",
    "Scenario",
    "ScenarioRuntimeError",
    "Span",
    "emit",
    "execute",
    "parse",
    "pretty_print",
    "run_sweep",
]
