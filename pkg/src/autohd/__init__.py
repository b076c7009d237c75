"""Heuristic-guided planning with evolved heuristic functions."""

from .core import EncodedState, PlanningTask, PlanTrace, WorldModel, validate_plan
from .domains import dsl_view, get_domain
from .search import SearchConfig, SearchResult, astar, greedy_bfs, search

__version__ = "0.1.0"

__all__ = [
    "EncodedState",
    "PlanTrace",
    "PlanningTask",
    "SearchConfig",
    "SearchResult",
    "WorldModel",
    "astar",
    "dsl_view",
    "get_domain",
    "greedy_bfs",
    "search",
    "validate_plan",
]
