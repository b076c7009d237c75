from __future__ import annotations

from typing import Any

from ..core import EncodedState, PlanningTask


class Domain:
    """Common surface of a benchmark domain.

    Subclasses operate on plain payload objects; :meth:`encode` wraps a
    payload into an :class:`EncodedState` with its canonical key.
    """

    domain_id: str = ""
    default_depth_cap: int = 20
    default_budget: int = 600
    # names bound in heuristic programs besides the built-in functions
    bound_names: tuple = ("state",)
    # extra DSL functions: name -> allowed arities
    accessors: dict = {}

    def key(self, payload) -> str:
        raise NotImplementedError

    def encode(self, payload) -> EncodedState:
        return EncodedState(self.domain_id, payload, self.key(payload))

    def actions(self, payload) -> list:
        raise NotImplementedError

    def apply(self, payload, action):
        raise NotImplementedError

    def is_goal(self, payload, goal=None) -> bool:
        raise NotImplementedError

    def view(self, payload, goal=None) -> dict:
        raise NotImplementedError

    def accessor_impls(self) -> dict:
        return {}

    def render_state(self, payload) -> str:
        raise NotImplementedError

    def parse_state(self, text: str):
        raise NotImplementedError

    def render_action(self, action) -> str:
        return str(action)

    def parse_action(self, text: str, payload=None):
        raise NotImplementedError

    def redundant(self, previous, action) -> bool:
        """True when ``action`` right after ``previous`` can never be part of a shortest plan."""
        return False

    def make_task(self, payload, goal=None, instance_id="", optimal_depth=None, **options: Any) -> PlanningTask:
        return PlanningTask(
            self.domain_id,
            self.encode(payload),
            goal,
            instance_id,
            optimal_depth,
            options,
        )
