"""Game of 24 over exact rationals."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .base import Domain

TARGET = 24
OPS = ("+", "-", "*", "/")


def fmt(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Game24State:
    numbers: tuple = ()
    history: tuple = ()

    def __post_init__(self):
        nums = tuple(sorted(Fraction(n) for n in self.numbers))
        if not 1 <= len(nums) <= 4:
            raise ValueError("a Game of 24 state holds between 1 and 4 numbers")
        object.__setattr__(self, "numbers", nums)
        object.__setattr__(self, "history", tuple(self.history))


@dataclass(frozen=True)
class Game24Action:
    op: str
    a: Fraction
    b: Fraction

    def result(self) -> Fraction:
        return _combine(self.op, self.a, self.b)

    def __str__(self):
        return f"{fmt(self.a)} {self.op} {fmt(self.b)}"


def _combine(op, a, b):
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if b == 0:
        raise ZeroDivisionError(f"{fmt(a)} / 0")
    return a / b


def g24_actions(state: Game24State) -> list[Game24Action]:
    """Every pairwise operation, in the order a+b, a-b, b-a, a*b, a/b, b/a.

    Pairs are taken over positions of the sorted multiset; actions that are
    identical by value (from repeated numbers) are listed once.
    """
    nums = state.numbers
    out, seen = [], set()
    for i in range(len(nums)):
        for j in range(i + 1, len(nums)):
            a, b = nums[i], nums[j]
            for act in (
                Game24Action("+", a, b),
                Game24Action("-", a, b),
                Game24Action("-", b, a),
                Game24Action("*", a, b),
                Game24Action("/", a, b),
                Game24Action("/", b, a),
            ):
                if act.op == "/" and act.b == 0:
                    continue
                if act not in seen:
                    seen.add(act)
                    out.append(act)
    return out


def g24_apply(state: Game24State, action: Game24Action) -> Game24State:
    rest = list(state.numbers)
    try:
        rest.remove(action.a)
        rest.remove(action.b)
    except ValueError:
        raise ValueError(f"operands of {action} are not in {list(map(fmt, state.numbers))}") from None
    result = action.result()
    rest.append(result)
    return Game24State(tuple(rest), state.history + (f"{action} = {fmt(result)}",))


def g24_is_goal(state: Game24State) -> bool:
    return len(state.numbers) == 1 and state.numbers[0] == TARGET


@lru_cache(maxsize=65536)
def reachable_values(numbers: tuple) -> frozenset:
    """All values obtainable by combining the whole multiset with + - * /.

    ``numbers`` must be a sorted tuple of Fractions. Works by repeatedly
    merging a pair, so every full parenthesization and ordering is covered.
    """
    if len(numbers) == 1:
        return frozenset(numbers)
    out = set()
    n = len(numbers)
    for i in range(n):
        for j in range(i + 1, n):
            rest = numbers[:i] + numbers[i + 1 : j] + numbers[j + 1 :]
            for r in pair_results(numbers[i], numbers[j]):
                out |= reachable_values(tuple(sorted(rest + (r,))))
    return frozenset(out)


def pair_results(a, b) -> list:
    out = [a + b, a - b, b - a, a * b]
    if b != 0:
        out.append(a / b)
    if a != 0:
        out.append(b / a)
    return out


_NUM = r"-?\d+(?:/\d+)?(?:\.\d+)?"


def parse_numbers(text: str) -> tuple:
    found = re.findall(_NUM, text)
    if not found:
        raise ValueError(f"no numbers in {text!r}")
    return tuple(Fraction(x) for x in found)


def parse_g24_action(text: str) -> Game24Action:
    line = re.sub(r"^\s*(?:\d+[.)]\s+|[-*]\s+)", "", text.strip())
    m = re.match(rf"\s*\(?\s*({_NUM})\s*([-+*/x×÷])\s*({_NUM})\s*\)?", line)
    if not m:
        raise ValueError(f"unrecognized Game of 24 action {text!r}")
    op = {"x": "*", "×": "*", "÷": "/"}.get(m.group(2), m.group(2))
    return Game24Action(op, Fraction(m.group(1)), Fraction(m.group(3)))


class Game24Domain(Domain):
    domain_id = "game24"
    default_depth_cap = 3
    default_budget = 200
    bound_names = ("state", "target")
    accessors = {"values": (1,), "combine": (2,)}

    def key(self, payload: Game24State) -> str:
        return ",".join(fmt(x) for x in payload.numbers)

    def actions(self, payload):
        return g24_actions(payload)

    def apply(self, payload, action):
        return g24_apply(payload, action)

    def is_goal(self, payload, goal=None):
        return g24_is_goal(payload)

    def view(self, payload, goal=None):
        return {"state": payload.numbers, "target": TARGET}

    def accessor_impls(self):
        return {"values": _values, "combine": _pair}

    def render_state(self, payload):
        return "[" + ", ".join(fmt(x) for x in payload.numbers) + "]"

    def parse_state(self, text):
        return Game24State(parse_numbers(text))

    def render_action(self, action):
        return f"{action} = {fmt(action.result())}"

    def parse_action(self, text, payload=None):
        return parse_g24_action(text)


def _values(xs):
    nums = tuple(sorted(Fraction(x) for x in xs))
    if not 1 <= len(nums) <= 4:
        return None
    return tuple(sorted(reachable_values(nums)))


def _pair(a, b):
    return tuple(pair_results(Fraction(a), Fraction(b)))
