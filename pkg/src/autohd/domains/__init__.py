"""Ground-truth simulators, parsers and renderers for the benchmark domains."""

from __future__ import annotations

from typing import Any

from ..core import EncodedState, PlanningTask
from .base import Domain
from .blocksworld import BlocksworldDomain
from .cube import CubeDomain
from .game24 import Game24Domain

_DOMAINS: dict[tuple, Domain] = {}


def get_domain(domain_id: str, **options: Any) -> Domain:
    """Return the (cached) domain instance for ``domain_id``.

    The only option currently understood is ``move_set`` for ``cube2x2``.
    """
    key = (domain_id, tuple(sorted(options.items())))
    if key not in _DOMAINS:
        if domain_id == "blocksworld":
            _DOMAINS[key] = BlocksworldDomain()
        elif domain_id == "game24":
            _DOMAINS[key] = Game24Domain()
        elif domain_id == "cube2x2":
            _DOMAINS[key] = CubeDomain(**options)
        else:
            raise ValueError(f"unknown domain {domain_id!r}")
    return _DOMAINS[key]


def domain_for(task: PlanningTask) -> Domain:
    return get_domain(task.domain_id, **dict(task.options))


def dsl_view(state: EncodedState, goal=None) -> dict:
    """Bindings exposed to heuristic programs for ``state``."""
    return get_domain(state.domain_id).view(state.payload, goal)


__all__ = [
    "Domain",
    "BlocksworldDomain",
    "CubeDomain",
    "Game24Domain",
    "get_domain",
    "domain_for",
    "dsl_view",
]
