from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .builtins import BUILTIN_SOURCES, BUILTINS, DESCRIPTIONS
from .interp import EvalLimits, compile_ast, run
from .syntax import CORE_FUNCTIONS, Node, check, parse, to_source

DSL_SOURCE = "dsl_source"
BUILTIN = "builtin"


def _domain(domain_id):
    from ..domains import get_domain

    return get_domain(domain_id)


def program_id(kind: str, source: str, domain_id: str) -> str:
    digest = hashlib.sha256(f"{kind}\0{domain_id}\0{source}".encode()).hexdigest()
    return digest[:16]


@dataclass(frozen=True)
class HeuristicProgram:
    """A heuristic as text (``dsl_source``) or as the name of a builtin.

    DSL sources are validated and stored in canonical form, so the id does not
    depend on whitespace or redundant parentheses.
    """

    kind: str
    source: str
    domain_id: str
    description: str = field(default="", compare=False)
    id: str = field(default="", compare=False)

    def __post_init__(self):
        if self.kind == DSL_SOURCE:
            ast = parse(self.source)
            check(ast, _domain(self.domain_id).bound_names, functions_for(self.domain_id))
            object.__setattr__(self, "source", to_source(ast))
        elif self.kind == BUILTIN:
            if self.source not in BUILTINS:
                raise ValueError(f"unknown builtin heuristic {self.source!r}")
            home = BUILTINS[self.source][0]
            if home is not None and home != self.domain_id:
                raise ValueError(f"builtin {self.source!r} belongs to {home}, not {self.domain_id}")
        else:
            raise ValueError(f"unknown program kind {self.kind!r}")
        object.__setattr__(self, "id", program_id(self.kind, self.source, self.domain_id))

    @classmethod
    def from_source(cls, source: str, domain_id: str, description: str = "") -> "HeuristicProgram":
        return cls(DSL_SOURCE, source, domain_id, description)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "source": self.source,
            "domain": self.domain_id,
            "description": self.description,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HeuristicProgram":
        return cls(d["kind"], d["source"], d["domain"], d.get("description", ""))


def functions_for(domain_id: str) -> dict:
    return {**CORE_FUNCTIONS, **_domain(domain_id).accessors}


@dataclass(frozen=True)
class CompiledHeuristic:
    program: HeuristicProgram
    ast: Optional[Node]
    limits: EvalLimits = EvalLimits()
    _fn: Callable = field(default=None, repr=False, compare=False)

    def evaluate(self, view: dict) -> float:
        """Score one DSL view; raises :class:`~autohd.dsl.EvalFault` on failure."""
        if self.program.kind == BUILTIN:
            return BUILTINS[self.program.source][1](view)
        return run(self._fn, view, self.limits)

    def __call__(self, view: dict) -> float:
        return self.evaluate(view)


def compile_program(program: HeuristicProgram, limits: EvalLimits | None = None) -> CompiledHeuristic:
    limits = limits or EvalLimits()
    if program.kind == BUILTIN:
        return CompiledHeuristic(program, None, limits)
    ast = parse(program.source)
    fn = compile_ast(ast, _domain(program.domain_id).accessor_impls())
    return CompiledHeuristic(program, ast, limits, fn)


def parse_program(source: str, domain_id: str, description: str = "", limits: EvalLimits | None = None) -> CompiledHeuristic:
    """Parse and check ``source`` for ``domain_id``.

    Raises a :class:`~autohd.dsl.DSLError` subclass (syntax, unbound name or
    arity) with the line, column and offending text.
    """
    return compile_program(HeuristicProgram.from_source(source, domain_id, description), limits)


def builtin(name: str, domain_id: str | None = None) -> HeuristicProgram:
    home = BUILTINS[name][0] if name in BUILTINS else None
    domain_id = domain_id or home
    if domain_id is None:
        raise ValueError(f"builtin {name!r} needs an explicit domain")
    return HeuristicProgram(BUILTIN, name, domain_id, DESCRIPTIONS.get(name, ""))


def builtin_source(name: str) -> str:
    return BUILTIN_SOURCES[name]


def evaluate(h: CompiledHeuristic, view: dict) -> float:
    return h.evaluate(view)


def pretty_print(h: Any) -> str:
    """Canonical DSL text for a compiled heuristic, a program, an AST or raw source."""
    if isinstance(h, CompiledHeuristic):
        if h.ast is None:
            return BUILTIN_SOURCES[h.program.source]
        return to_source(h.ast)
    if isinstance(h, HeuristicProgram):
        return BUILTIN_SOURCES[h.source] if h.kind == BUILTIN else h.source
    if isinstance(h, str):
        return to_source(parse(h))
    return to_source(h)
