"""Exhaustive reference solvers used to label datasets and check search output."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..core import PlanningTask, PlanTrace
from ..domains import domain_for


@dataclass
class OracleResult:
    optimal_depth: Optional[int]
    plan: Optional[PlanTrace] = None
    nodes: int = 0
    cross_check: dict = field(default_factory=dict)

    @property
    def solvable(self) -> bool:
        return self.optimal_depth is not None


def oracle_solve(task: PlanningTask, cap: int = 20) -> OracleResult:
    """Iterative-deepening DFS for a shortest plan of at most ``cap`` actions.

    A transposition table keeps, per state, the largest remaining depth it
    was already searched with during the current iteration, so revisits that
    cannot find anything new are pruned. Returns ``optimal_depth=None`` when
    no plan exists within the cap.
    """
    domain = domain_for(task)
    goal = task.goal
    root = task.initial_state.payload
    nodes = 0

    if domain.is_goal(root, goal):
        result = OracleResult(0, PlanTrace(task.initial_state), 1)
    else:
        result = OracleResult(None, None, 0)
        for limit in range(1, cap + 1):
            table: dict = {}
            path: list = []

            def dfs(payload, key, remaining, previous):
                nonlocal nodes
                nodes += 1
                if table.get(key, -1) >= remaining:
                    return False
                table[key] = remaining
                for action in domain.actions(payload):
                    if domain.redundant(previous, action):
                        continue
                    child = domain.apply(payload, action)
                    path.append((action, child))
                    if domain.is_goal(child, goal):
                        return True
                    if remaining > 1 and dfs(child, domain.key(child), remaining - 1, action):
                        return True
                    path.pop()
                return False

            if dfs(root, domain.key(root), limit, None):
                steps = tuple((a, domain.encode(s)) for a, s in path)
                result = OracleResult(limit, PlanTrace(task.initial_state, steps), nodes)
                break
        result.nodes = nodes

    if task.domain_id == "game24":
        values = expression_values(root.numbers)
        reachable = any(v == 24 for v in values)
        result.cross_check = {"expression_trees": len(values), "reaches_24": reachable}
        if reachable != result.solvable and len(root.numbers) - 1 <= cap:
            raise AssertionError(f"oracle disagreement on {root.numbers}")
    return result


def expression_values(numbers) -> set:
    """Every value of every expression tree over all of ``numbers``.

    Enumerates orderings of the leaves and binary tree shapes directly,
    independently of the pairwise-merge enumeration in the domain module.
    """
    nums = [Fraction(x) for x in numbers]
    out: set = set()
    for perm in set(itertools.permutations(nums)):
        out |= _tree_values(perm)
    return out


def _tree_values(leaves: tuple) -> set:
    if len(leaves) == 1:
        return {leaves[0]}
    out = set()
    for split in range(1, len(leaves)):
        for a in _tree_values(leaves[:split]):
            for b in _tree_values(leaves[split:]):
                out.add(a + b)
                out.add(a - b)
                out.add(a * b)
                if b != 0:
                    out.add(a / b)
    return out
