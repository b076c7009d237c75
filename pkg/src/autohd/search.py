"""Heuristic-guided Greedy BFS and A* over a world model.

Both searches pop the frontier entry with the smallest key (``h`` for Greedy
BFS, ``g + h`` for A*) and test successors for the goal as soon as they are
generated. Greedy BFS drops any state it has already generated; A* re-opens a
state only when it is reached with a strictly smaller ``g``.
"""

from __future__ import annotations

import heapq
import itertools
import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .core import (
    EncodedState,
    FaultCounter,
    PlanningTask,
    PlanTrace,
    WorldModel,
    heuristic_value,
    score_successors,
)

GREEDY_BFS = "greedy_bfs"
ASTAR = "astar"
ALGORITHMS = (GREEDY_BFS, ASTAR)

SOLVED = "solved"
BUDGET_EXHAUSTED = "budget_exhausted"
FRONTIER_EMPTY = "frontier_empty"
DEPTH_CAPPED = "depth_capped"

FIFO = "fifo"
INSERTION_ORDER = "insertion_order"

DEFAULT_BUDGETS = {"blocksworld": 600, "game24": 200, "cube2x2": 2000}
DEFAULT_DEPTH_CAPS = {"blocksworld": 20, "game24": 3, "cube2x2": 11}


@dataclass(frozen=True)
class SearchConfig:
    algorithm: str = ASTAR
    expansion_budget: int = 600
    depth_cap: int = 20
    num_solutions: int = 1
    tie_break: str = FIFO

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.tie_break not in (FIFO, INSERTION_ORDER):
            raise ValueError(f"unknown tie_break {self.tie_break!r}")
        if self.expansion_budget < 0 or self.depth_cap < 1 or self.num_solutions < 1:
            raise ValueError("depth_cap and num_solutions must be positive, the budget nonnegative")

    @classmethod
    def for_task(cls, task: PlanningTask, algorithm: str = ASTAR, **overrides) -> "SearchConfig":
        """Domain defaults; the depth cap tightens to twice the known optimum."""
        cap = DEFAULT_DEPTH_CAPS[task.domain_id]
        if task.optimal_depth:
            cap = min(2 * task.optimal_depth, cap)
        values = {
            "algorithm": algorithm,
            "expansion_budget": DEFAULT_BUDGETS[task.domain_id],
            "depth_cap": max(cap, 1),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class SearchNode:
    state: EncodedState
    g: int = 0
    h: float = 0.0
    parent: Optional["SearchNode"] = field(default=None, repr=False)
    action_in: object = None

    @property
    def f(self) -> float:
        return self.g + self.h


@dataclass
class SearchStats:
    expansions: int = 0
    generations: int = 0
    duplicate_hits: int = 0
    heuristic_faults: int = 0
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SearchResult:
    status: str
    plans: list = field(default_factory=list)
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def solved(self) -> bool:
        return self.status == SOLVED

    @property
    def plan(self) -> Optional[PlanTrace]:
        return self.plans[0] if self.plans else None


def reconstruct(node: SearchNode) -> PlanTrace:
    steps = []
    while node.parent is not None:
        steps.append((node.action_in, node.state))
        node = node.parent
    steps.reverse()
    return PlanTrace(node.state, tuple(steps))


def jsonl_trace(fp) -> Callable[[dict], None]:
    """Expansion callback writing one JSON object per line to ``fp``."""

    def write(record):
        fp.write(json.dumps(record) + "\n")

    return write


def _finite(x):
    return None if math.isinf(x) else x


def search(
    task: PlanningTask,
    model: WorldModel,
    h,
    cfg: SearchConfig,
    on_expand: Callable[[dict], None] | None = None,
) -> SearchResult:
    from .domains import domain_for

    started = time.perf_counter()
    domain = domain_for(task)
    goal = task.goal
    astar = cfg.algorithm == ASTAR
    stats = SearchStats()
    faults = FaultCounter()
    cache: dict = {}

    def finish(status, plans):
        stats.heuristic_faults = faults.count
        stats.wall_time = time.perf_counter() - started
        return SearchResult(status, plans, stats)

    root_state = task.initial_state
    if domain.is_goal(root_state.payload, goal):
        return finish(SOLVED, [PlanTrace(root_state)])

    root_h = heuristic_value(h, root_state, goal, faults)
    cache[root_state.key] = root_h
    root = SearchNode(root_state, 0, root_h)
    order = itertools.count()
    sign = 1 if cfg.tie_break == FIFO else -1

    def key(node):
        return node.f if astar else node.h

    frontier = [(key(root), sign * next(order), root)]
    best_g = {root_state.key: 0}
    plans: list[PlanTrace] = []
    seen_plans: set = set()
    capped = False

    while frontier:
        if stats.expansions >= cfg.expansion_budget:
            return finish(SOLVED if plans else BUDGET_EXHAUSTED, plans)
        _, _, node = heapq.heappop(frontier)
        if astar and node.g > best_g.get(node.state.key, node.g):
            continue
        stats.expansions += 1
        if on_expand is not None:
            on_expand(
                {
                    "iteration": stats.expansions,
                    "state_key": node.state.key,
                    "g": node.g,
                    "h": _finite(node.h),
                    "f": _finite(node.f),
                    "action_in": None if node.action_in is None else domain.render_action(node.action_in),
                }
            )
        for action, child_state, value in score_successors(node.state, model, h, goal, faults, cache):
            stats.generations += 1
            child = SearchNode(child_state, node.g + 1, value, node, action)
            if domain.is_goal(child_state.payload, goal):
                plan = reconstruct(child)
                signature = tuple(plan.actions)
                if signature not in seen_plans:
                    seen_plans.add(signature)
                    plans.append(plan)
                    if len(plans) >= cfg.num_solutions:
                        return finish(SOLVED, plans)
                continue
            k = child_state.key
            if k in best_g and (not astar or best_g[k] <= child.g):
                stats.duplicate_hits += 1
                continue
            if child.g >= cfg.depth_cap:
                capped = True
                continue
            best_g[k] = child.g
            heapq.heappush(frontier, (key(child), sign * next(order), child))

    if plans:
        return finish(SOLVED, plans)
    return finish(DEPTH_CAPPED if capped else FRONTIER_EMPTY, plans)


def greedy_bfs(task, model, h, cfg: SearchConfig, on_expand=None) -> SearchResult:
    if cfg.algorithm != GREEDY_BFS:
        raise ValueError("greedy_bfs called with a non-greedy config")
    return search(task, model, h, cfg, on_expand)


def astar(task, model, h, cfg: SearchConfig, on_expand=None) -> SearchResult:
    if cfg.algorithm != ASTAR:
        raise ValueError("astar called with a non-A* config")
    return search(task, model, h, cfg, on_expand)
