"""Domain-agnostic planning abstractions.

A planning task bundles an initial state and a goal for one of the registered
domains. States travel through the engine wrapped in :class:`EncodedState`,
which carries the domain payload together with a canonical key used for
duplicate detection. A :class:`WorldModel` supplies the action generator and
the transition function; it is either backed by the ground-truth simulator or
by a language model (see :mod:`autohd.llm.world`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Mapping, Optional, Sequence

DOMAIN_IDS = ("blocksworld", "game24", "cube2x2")

GROUND_TRUTH = "ground_truth"
MODEL_BACKED = "model_backed"


@dataclass(frozen=True)
class EncodedState:
    """A domain state plus its canonical key.

    Equality and hashing use only ``(domain_id, key)`` so that two payloads
    describing the same configuration collapse in visited sets, whatever
    bookkeeping (e.g. Game of 24 history) they carry.
    """

    domain_id: str
    payload: Any = field(compare=False, hash=False)
    key: str = ""


EncodedAction = Hashable


@dataclass(frozen=True)
class PlanningTask:
    domain_id: str
    initial_state: EncodedState
    goal: Any = None
    instance_id: str = ""
    optimal_depth: Optional[int] = None
    options: Mapping[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.domain_id not in DOMAIN_IDS:
            raise ValueError(f"unknown domain {self.domain_id!r}")
        if self.optimal_depth is not None and self.optimal_depth < 0:
            raise ValueError("optimal_depth must be nonnegative")


@dataclass(frozen=True)
class PlanTrace:
    origin: EncodedState
    steps: tuple = ()  # ((action, state), ...)

    def __len__(self):
        return len(self.steps)

    @property
    def actions(self) -> list:
        return [a for a, _ in self.steps]

    @property
    def final_state(self) -> EncodedState:
        return self.steps[-1][1] if self.steps else self.origin


@dataclass(frozen=True)
class WorldModel:
    """Action generator and transition function over encoded states.

    ``transition_fn`` may return ``None`` in model-backed mode when the model's
    prediction cannot be parsed; the branch is then treated as dead.
    """

    actions_fn: Callable[[EncodedState], Sequence[EncodedAction]]
    transition_fn: Callable[[EncodedState, EncodedAction], Optional[EncodedState]]
    mode: str = GROUND_TRUTH

    @classmethod
    def ground_truth(cls, domain) -> "WorldModel":
        def actions(state):
            return domain.actions(state.payload)

        def transition(state, action):
            return domain.encode(domain.apply(state.payload, action))

        return cls(actions, transition, GROUND_TRUTH)


@dataclass
class FaultCounter:
    count: int = 0
    kinds: dict = field(default_factory=dict)

    def add(self, kind: str) -> None:
        self.count += 1
        self.kinds[kind] = self.kinds.get(kind, 0) + 1


def heuristic_value(h, state: EncodedState, goal=None, faults: FaultCounter | None = None) -> float:
    """Evaluate ``h`` on one state, folding faults (and NaN) into ``+inf``."""
    from .domains import dsl_view
    from .dsl import EvalFault

    try:
        value = h.evaluate(dsl_view(state, goal))
    except EvalFault as exc:
        if faults is not None:
            faults.add(exc.kind)
        return math.inf
    if math.isnan(value):
        if faults is not None:
            faults.add("type")
        return math.inf
    return value


def score_successors(
    state: EncodedState,
    model: WorldModel,
    h,
    goal=None,
    faults: FaultCounter | None = None,
    cache: dict | None = None,
) -> list[tuple]:
    """Return ``(action, next_state, value)`` for every action at ``state``.

    Order follows ``model.actions_fn``. Successors whose transition is dead
    (``None``) are skipped. When ``cache`` is given, values are memoized by
    state key and only fresh evaluations can count as faults.
    """
    scored = []
    for action in model.actions_fn(state):
        nxt = model.transition_fn(state, action)
        if nxt is None:
            continue
        if cache is not None and nxt.key in cache:
            value = cache[nxt.key]
        else:
            value = heuristic_value(h, nxt, goal, faults)
            if cache is not None:
                cache[nxt.key] = value
        scored.append((action, nxt, value))
    return scored


@dataclass(frozen=True)
class Validation:
    valid: bool
    reason: str = ""

    def __bool__(self):
        return self.valid


def validate_plan(task: PlanningTask, trace: PlanTrace, ground_truth: WorldModel | None = None) -> Validation:
    """Replay ``trace`` with ground-truth dynamics and check the goal."""
    from .domains import domain_for

    domain = domain_for(task)
    if ground_truth is None:
        ground_truth = WorldModel.ground_truth(domain)
    if ground_truth.mode != GROUND_TRUTH:
        raise ValueError("validate_plan needs a ground-truth world model")
    if trace.origin.key != task.initial_state.key:
        return Validation(False, "trace origin differs from the task's initial state")

    state = trace.origin
    for i, (action, recorded) in enumerate(trace.steps, start=1):
        legal = ground_truth.actions_fn(state)
        if action not in legal:
            return Validation(False, f"step {i}: illegal action {domain.render_action(action)!r}")
        state = ground_truth.transition_fn(state, action)
        if state.key != recorded.key:
            return Validation(False, f"step {i}: recorded state does not match transition")
    if not domain.is_goal(state.payload, task.goal):
        if not trace.steps:
            return Validation(False, "no actions, goal unmet")
        return Validation(False, f"goal unmet after {len(trace.steps)} actions")
    return Validation(True, "ok")
