"""Blocksworld with a single hand, in the natural-language state format.

State text is a conjunction of the phrases ``X is clear``, ``the hand is
empty``, ``X is on top of Y``, ``X is on the table`` and ``the hand is
holding X`` / ``X is in the hand``, separated by commas and ``and``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .base import Domain

TABLE = "TABLE"
HAND = "HAND"

PICKUP, PUTDOWN, STACK, UNSTACK = "pickup", "putdown", "stack", "unstack"
_KIND_ORDER = {PICKUP: 0, PUTDOWN: 1, STACK: 2, UNSTACK: 3}


class BlocksParseError(ValueError):
    def __init__(self, message: str, span: str = ""):
        super().__init__(f"{message}: {span!r}" if span else message)
        self.span = span


class BlocksConsistencyError(ValueError):
    pass


class IllegalAction(ValueError):
    pass


@dataclass(frozen=True)
class BlocksState:
    stacks: tuple = ()  # bottom-to-top tuples, sorted by bottom block
    holding: Optional[str] = None

    def __post_init__(self):
        stacks = tuple(sorted((tuple(s) for s in self.stacks if s), key=lambda s: s[0]))
        object.__setattr__(self, "stacks", stacks)
        names = [b for s in stacks for b in s]
        if self.holding is not None:
            names.append(self.holding)
        if len(names) != len(set(names)):
            raise BlocksConsistencyError("a block appears more than once")

    @property
    def blocks(self) -> list[str]:
        names = [b for s in self.stacks for b in s]
        if self.holding is not None:
            names.append(self.holding)
        return sorted(names)

    @property
    def hand_empty(self) -> bool:
        return self.holding is None

    def clear(self) -> set:
        return {s[-1] for s in self.stacks}

    def support(self) -> dict:
        """Map block -> the block it rests on, ``TABLE`` or ``HAND``."""
        out = {}
        for s in self.stacks:
            out[s[0]] = TABLE
            for lower, upper in zip(s, s[1:]):
                out[upper] = lower
        if self.holding is not None:
            out[self.holding] = HAND
        return out


@dataclass(frozen=True, order=True)
class BwAction:
    kind: str
    block: str
    target: Optional[str] = None

    def __post_init__(self):
        if self.kind not in _KIND_ORDER:
            raise ValueError(f"unknown action kind {self.kind!r}")
        if (self.target is not None) != (self.kind in (STACK, UNSTACK)):
            raise ValueError("target is required exactly for stack/unstack")

    def __str__(self):
        if self.kind == PICKUP:
            return f"pick up the {self.block} block"
        if self.kind == PUTDOWN:
            return f"put down the {self.block} block"
        if self.kind == STACK:
            return f"stack the {self.block} block on top of the {self.target} block"
        return f"unstack the {self.block} block from on top of the {self.target} block"


@dataclass(frozen=True)
class BwGoal:
    required_on: frozenset = frozenset()  # {(upper, lower-or-TABLE)}
    required_clear: frozenset = frozenset()
    required_hand_empty: Optional[bool] = None

    def __post_init__(self):
        below = {}
        for upper, lower in self.required_on:
            if upper in below and below[upper] != lower:
                raise BlocksConsistencyError(f"{upper} has two required supports")
            below[upper] = lower
        for start in below:
            seen = {start}
            cur = below[start]
            while cur in below:
                if cur in seen:
                    raise BlocksConsistencyError("goal relations form a cycle")
                seen.add(cur)
                cur = below[cur]


class Row(NamedTuple):
    block: str
    support: str
    height: int


# -- parsing -----------------------------------------------------------------

_NAME = r"(?:the\s+)?([a-z0-9_]+)(?:\s+block)?"
_PATTERNS = [
    ("hand_empty", re.compile(r"the\s+hand\s+is\s+empty")),
    ("holding", re.compile(rf"the\s+hand\s+is\s+holding\s+{_NAME}")),
    ("in_hand", re.compile(rf"{_NAME}\s+is\s+in\s+the\s+hand")),
    ("clear", re.compile(rf"{_NAME}\s+is\s+clear")),
    ("on_table", re.compile(rf"{_NAME}\s+is\s+on\s+the\s+table")),
    ("on", re.compile(rf"{_NAME}\s+is\s+on\s+top\s+of\s+{_NAME}")),
]


def _phrases(text: str) -> list[str]:
    text = text.strip().lower().rstrip(".")
    parts = []
    for chunk in text.split(","):
        for piece in re.split(r"\band\b", chunk):
            piece = " ".join(piece.split())
            if piece:
                parts.append(piece)
    return parts


def _predicates(text: str) -> list[tuple]:
    preds = []
    for phrase in _phrases(text):
        for name, pattern in _PATTERNS:
            m = pattern.fullmatch(phrase)
            if m:
                preds.append((name, *m.groups()))
                break
        else:
            raise BlocksParseError("unrecognized phrase", phrase)
    return preds


def bw_parse_state(text: str) -> BlocksState:
    """Parse a state description, checking that it is complete and consistent."""
    below: dict[str, str] = {}
    clear: set = set()
    holding = None
    hand_empty = False
    mentioned: set = set()
    for name, *args in _predicates(text):
        mentioned.update(args)
        if name == "hand_empty":
            hand_empty = True
        elif name in ("holding", "in_hand"):
            if holding is not None and holding != args[0]:
                raise BlocksConsistencyError("hand holds two blocks")
            holding = args[0]
        elif name == "clear":
            clear.add(args[0])
        else:
            upper = args[0]
            lower = TABLE if name == "on_table" else args[1]
            if below.get(upper, lower) != lower:
                raise BlocksConsistencyError(f"{upper} has two supports")
            below[upper] = lower
    if hand_empty and holding is not None:
        raise BlocksConsistencyError("hand is both empty and holding a block")
    if holding is not None and holding in below:
        raise BlocksConsistencyError(f"{holding} is held and also resting somewhere")
    if holding is not None and any(lower == holding for lower in below.values()):
        raise BlocksConsistencyError(f"something rests on the held block {holding}")

    above: dict[str, str] = {}
    for upper, lower in below.items():
        if lower == TABLE:
            continue
        if lower in above:
            raise BlocksConsistencyError(f"two blocks on top of {lower}")
        above[lower] = upper
    unsupported = mentioned - set(below) - {holding}
    if unsupported:
        raise BlocksConsistencyError(f"no position given for {sorted(unsupported)}")

    stacks = []
    placed = 0
    for bottom in sorted(b for b, lower in below.items() if lower == TABLE):
        stack = [bottom]
        while stack[-1] in above:
            stack.append(above[stack[-1]])
        placed += len(stack)
        stacks.append(stack)
    if placed != len(below):
        raise BlocksConsistencyError("support relations form a cycle or float above the table")
    state = BlocksState(tuple(tuple(s) for s in stacks), holding)
    bad = clear - state.clear()
    if bad:
        raise BlocksConsistencyError(f"{sorted(bad)} stated clear but covered or held")
    return state


def bw_parse_goal(text: str) -> BwGoal:
    """Parse a goal as the conjunction of exactly the stated predicates."""
    on, clear = set(), set()
    hand_empty = None
    for name, *args in _predicates(text):
        if name == "hand_empty":
            hand_empty = True
        elif name in ("holding", "in_hand"):
            raise BlocksParseError("goals holding a block are not supported", args[0])
        elif name == "clear":
            clear.add(args[0])
        elif name == "on_table":
            on.add((args[0], TABLE))
        else:
            on.add((args[0], args[1]))
    return BwGoal(frozenset(on), frozenset(clear), hand_empty)


def bw_render_state(state: BlocksState) -> str:
    support = state.support()
    phrases = [f"the {b} block is clear" for b in sorted(state.clear())]
    if state.holding is None:
        phrases.append("the hand is empty")
    else:
        phrases.append(f"the hand is holding the {state.holding} block")
    for b in sorted(support):
        lower = support[b]
        if lower not in (TABLE, HAND):
            phrases.append(f"the {b} block is on top of the {lower} block")
    for b in sorted(support):
        if support[b] == TABLE:
            phrases.append(f"the {b} block is on the table")
    if len(phrases) == 1:
        return phrases[0]
    return ", ".join(phrases[:-1]) + ", and " + phrases[-1]


def bw_render_goal(goal: BwGoal) -> str:
    phrases = [f"the {b} block is clear" for b in sorted(goal.required_clear)]
    if goal.required_hand_empty:
        phrases.append("the hand is empty")
    for upper, lower in sorted(goal.required_on):
        if lower != TABLE:
            phrases.append(f"the {upper} block is on top of the {lower} block")
    for upper, lower in sorted(goal.required_on):
        if lower == TABLE:
            phrases.append(f"the {upper} block is on the table")
    if not phrases:
        return ""
    if len(phrases) == 1:
        return phrases[0]
    return ", ".join(phrases[:-1]) + ", and " + phrases[-1]


def goal_of_state(state: BlocksState) -> BwGoal:
    """The full-state goal: every support, every clear block, empty hand."""
    if state.holding is not None:
        raise BlocksConsistencyError("goal states must have an empty hand")
    on = frozenset(state.support().items())
    return BwGoal(on, frozenset(state.clear()), True)


# -- dynamics ----------------------------------------------------------------

def bw_actions(state: BlocksState) -> list[BwAction]:
    acts = []
    tops = state.clear()
    if state.holding is None:
        for s in state.stacks:
            if len(s) == 1:
                acts.append(BwAction(PICKUP, s[0]))
            else:
                acts.append(BwAction(UNSTACK, s[-1], s[-2]))
    else:
        acts.append(BwAction(PUTDOWN, state.holding))
        for t in tops:
            acts.append(BwAction(STACK, state.holding, t))
    acts.sort(key=lambda a: (_KIND_ORDER[a.kind], a.block, a.target or ""))
    return acts


def bw_apply(state: BlocksState, action: BwAction) -> BlocksState:
    stacks = [list(s) for s in state.stacks]
    kind, block, target = action.kind, action.block, action.target
    if kind in (PICKUP, UNSTACK):
        if state.holding is not None:
            raise IllegalAction(f"{action}: the hand is not empty")
        src = next((s for s in stacks if s[-1] == block), None)
        if src is None:
            raise IllegalAction(f"{action}: {block} is not clear")
        if kind == PICKUP and len(src) != 1:
            raise IllegalAction(f"{action}: {block} is not on the table")
        if kind == UNSTACK and (len(src) < 2 or src[-2] != target):
            raise IllegalAction(f"{action}: {block} is not on top of {target}")
        src.pop()
        return BlocksState(tuple(tuple(s) for s in stacks), block)
    if state.holding != block:
        raise IllegalAction(f"{action}: the hand is not holding {block}")
    if kind == PUTDOWN:
        stacks.append([block])
    else:
        dst = next((s for s in stacks if s[-1] == target), None)
        if dst is None:
            raise IllegalAction(f"{action}: {target} is not clear")
        dst.append(block)
    return BlocksState(tuple(tuple(s) for s in stacks), None)


def bw_goal_satisfied(state: BlocksState, goal: BwGoal | None) -> bool:
    if goal is None:
        return True
    support = state.support()
    if any(support.get(upper) != lower for upper, lower in goal.required_on):
        return False
    tops = state.clear()
    if any(b not in tops for b in goal.required_clear):
        return False
    if goal.required_hand_empty is not None and goal.required_hand_empty != state.hand_empty:
        return False
    return True


# -- heuristic view ----------------------------------------------------------

def state_rows(state: BlocksState) -> tuple:
    rows = []
    for s in state.stacks:
        rows.append(Row(s[0], TABLE, 0))
        for i in range(1, len(s)):
            rows.append(Row(s[i], s[i - 1], i))
    if state.holding is not None:
        rows.append(Row(state.holding, HAND, 0))
    return tuple(sorted(rows))


def goal_rows(goal: BwGoal | None) -> tuple:
    """Goal relational table; a chain with no grounded bottom is taken to sit on the table."""
    if goal is None:
        return ()
    below = dict(goal.required_on)
    rows = []
    for block, lower in below.items():
        height, cur = 0, lower
        while cur != TABLE and cur is not None:
            height += 1
            cur = below.get(cur)
        rows.append(Row(block, lower, height))
    return tuple(sorted(rows))


def find_row(table, name):
    for row in table:
        if row.block == name:
            return row
    return None


class BlocksworldDomain(Domain):
    domain_id = "blocksworld"
    default_depth_cap = 20
    default_budget = 600
    bound_names = ("state", "goal", "TABLE", "HAND")
    accessors = {"block": (1,), "support": (1,), "height": (1,), "find": (2,)}

    def key(self, payload: BlocksState) -> str:
        stacks = "|".join("/".join(s) for s in payload.stacks)
        return f"{stacks};{payload.holding or ''}"

    def actions(self, payload):
        return bw_actions(payload)

    def apply(self, payload, action):
        return bw_apply(payload, action)

    def is_goal(self, payload, goal=None):
        return bw_goal_satisfied(payload, goal)

    def view(self, payload, goal=None):
        return {"state": state_rows(payload), "goal": goal_rows(goal), "TABLE": TABLE, "HAND": HAND}

    def accessor_impls(self):
        return {"block": _field(0), "support": _field(1), "height": _field(2), "find": find_row}

    def render_state(self, payload):
        return bw_render_state(payload)

    def parse_state(self, text):
        return bw_parse_state(text)

    def parse_action(self, text, payload=None):
        return parse_bw_action(text)


def _field(i):
    def get(row):
        if not isinstance(row, Row):
            return None
        return row[i]

    return get


_ACTION_PATTERNS = [
    (PICKUP, re.compile(rf"pick\s*up\s+{_NAME}")),
    (PUTDOWN, re.compile(rf"put\s*down\s+{_NAME}")),
    (UNSTACK, re.compile(rf"unstack\s+{_NAME}\s+from(?:\s+on)?(?:\s+top\s+of)?\s+{_NAME}")),
    (STACK, re.compile(rf"stack\s+{_NAME}\s+on(?:\s+top\s+of)?\s+{_NAME}")),
]


def parse_bw_action(text: str) -> BwAction:
    phrase = " ".join(text.strip().lower().rstrip(".").split())
    phrase = re.sub(r"^(?:\d+[.)]|[-*])\s*", "", phrase)
    for kind, pattern in _ACTION_PATTERNS:
        m = pattern.fullmatch(phrase)
        if m:
            return BwAction(kind, *m.groups())
    raise BlocksParseError("unrecognized action", text)
