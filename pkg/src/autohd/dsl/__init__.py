"""A small, total expression language for heuristic functions."""

from .builtins import BUILTIN_SOURCES, BUILTINS, DEFAULT_BUILTIN
from .interp import EvalFault, EvalLimits
from .program import (
    BUILTIN,
    DSL_SOURCE,
    CompiledHeuristic,
    HeuristicProgram,
    builtin,
    builtin_source,
    compile_program,
    evaluate,
    parse_program,
    pretty_print,
)
from .syntax import ArityError, DSLError, DSLSyntaxError, UnboundName, parse, to_source

FAULT_KINDS = ("syntax", "unbound", "type", "div_zero", "budget", "collection_overflow")


def load_heuristic(spec: str, domain_id: str, limits: EvalLimits | None = None) -> CompiledHeuristic:
    """Resolve ``builtin:<name>``, a bare builtin name, or a path to a DSL file."""
    from pathlib import Path

    if spec.startswith("builtin:"):
        return compile_program(builtin(spec.split(":", 1)[1], domain_id), limits)
    if spec in BUILTINS:
        return compile_program(builtin(spec, domain_id), limits)
    text = Path(spec).read_text(encoding="utf-8")
    description = ""
    for line in text.splitlines():
        stripped = line.strip().lstrip("#").strip()
        if stripped.lower().startswith("heuristic description:"):
            description = stripped.split(":", 1)[1].strip()
            break
    return parse_program(text, domain_id, description, limits)


__all__ = [
    "ArityError",
    "BUILTIN",
    "BUILTINS",
    "BUILTIN_SOURCES",
    "CompiledHeuristic",
    "DEFAULT_BUILTIN",
    "DSLError",
    "DSLSyntaxError",
    "DSL_SOURCE",
    "EvalFault",
    "EvalLimits",
    "FAULT_KINDS",
    "HeuristicProgram",
    "UnboundName",
    "builtin",
    "builtin_source",
    "compile_program",
    "evaluate",
    "load_heuristic",
    "parse",
    "parse_program",
    "pretty_print",
    "to_source",
]
