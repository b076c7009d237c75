"""2x2 pocket cube on the 24-facelet encoding.

Facelets are stored 4 per face in the order U, R, F, D, L, B; inside a face
they run top-left, top-right, bottom-left, bottom-right as seen from outside
the cube (U with F at the bottom, D with F at the top, the side faces with U
at the top). The move permutation tables are derived once from the cube
geometry and frozen.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from operator import itemgetter

from .base import Domain

FACES = "URFDLB"
CW, CCW, HALF = "cw90", "ccw90", "half"
_SUFFIX = {CW: "", CCW: "'", HALF: "2"}

SOLVED = tuple(i // 4 for i in range(24))

# normal, right, down (viewing directions per face)
_FRAMES = {
    "U": ((0, 1, 0), (1, 0, 0), (0, 0, 1)),
    "R": ((1, 0, 0), (0, 0, -1), (0, -1, 0)),
    "F": ((0, 0, 1), (1, 0, 0), (0, -1, 0)),
    "D": ((0, -1, 0), (1, 0, 0), (0, 0, -1)),
    "L": ((-1, 0, 0), (0, 0, 1), (0, -1, 0)),
    "B": ((0, 0, -1), (-1, 0, 0), (0, -1, 0)),
}


def _add(*vs):
    return tuple(sum(c) for c in zip(*vs))


def _scale(v, k):
    return tuple(k * c for c in v)


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _stickers():
    """(position, normal) of every facelet, indexed like the state array."""
    out = []
    for face in FACES:
        n, right, down = _FRAMES[face]
        for row in range(2):
            for col in range(2):
                pos = _add(n, _scale(right, 2 * col - 1), _scale(down, 2 * row - 1))
                out.append((pos, n))
    return out


def _quarter_turn(face) -> tuple:
    """Source-index table for a clockwise quarter turn of ``face``."""
    axis = _FRAMES[face][0]
    stickers = _stickers()
    index = {s: i for i, s in enumerate(stickers)}

    def rot(v):
        # -90 degrees about axis: v' = -(axis x v) + axis (axis . v)
        return _add(_scale(_cross(axis, v), -1), _scale(axis, _dot(axis, v)))

    perm = list(range(24))
    for i, (pos, n) in enumerate(stickers):
        if _dot(pos, axis) > 0:
            perm[index[(rot(pos), rot(n))]] = i
    return tuple(perm)


def _compose(p, q):
    """Table for applying ``p`` then ``q``."""
    return tuple(p[q[i]] for i in range(24))


def _build_tables():
    tables = {}
    for face in FACES:
        q = _quarter_turn(face)
        h = _compose(q, q)
        tables[(face, CW)] = q
        tables[(face, HALF)] = h
        tables[(face, CCW)] = _compose(h, q)
    return tables


PERMUTATIONS = _build_tables()


@dataclass(frozen=True, order=True)
class CubeMove:
    face: str
    turns: str = CW

    def __post_init__(self):
        if self.face not in FACES or self.turns not in _SUFFIX:
            raise ValueError(f"invalid move {self.face}{self.turns}")

    def inverse(self) -> "CubeMove":
        return CubeMove(self.face, {CW: CCW, CCW: CW, HALF: HALF}[self.turns])

    def __str__(self):
        return self.face + _SUFFIX[self.turns]


MOVE_SETS = {
    "full": tuple(CubeMove(f, t) for f in FACES for t in (CW, CCW, HALF)),
    "reduced": tuple(CubeMove(f, t) for f in "URF" for t in (CW, CCW, HALF)),
}


@dataclass(frozen=True)
class CubeState:
    facelets: tuple = SOLVED

    def __post_init__(self):
        f = tuple(int(x) for x in self.facelets)
        if len(f) != 24 or any(not 0 <= x <= 5 for x in f):
            raise ValueError("a cube state is 24 color codes in 0..5")
        if any(f.count(c) != 4 for c in range(6)):
            raise ValueError("each color must appear exactly 4 times")
        object.__setattr__(self, "facelets", f)


def _permute(facelets, table):
    return tuple(facelets[j] for j in table)


_GETTERS: dict = {}


def cube_apply(state: CubeState, move: CubeMove) -> CubeState:
    key = (move.face, move.turns)
    getter = _GETTERS.get(key)
    if getter is None:
        getter = _GETTERS[key] = itemgetter(*PERMUTATIONS[key])
    # a permutation of a valid state is valid, so skip the constructor checks
    out = object.__new__(CubeState)
    object.__setattr__(out, "facelets", getter(state.facelets))
    return out


def faces_of(facelets) -> tuple:
    return tuple(tuple(facelets[4 * i : 4 * i + 4]) for i in range(6))


def cube_is_solved(state: CubeState) -> bool:
    f = state.facelets
    return all(f[i] == f[i + 1] == f[i + 2] == f[i + 3] for i in range(0, 24, 4))


def cube_scramble(depth: int, seed=None, move_set: str = "full") -> tuple[CubeState, list[CubeMove]]:
    """Apply ``depth`` random moves to the solved cube, never turning the same face twice in a row."""
    if depth < 1:
        raise ValueError("scramble depth must be at least 1")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    moves = MOVE_SETS[move_set]
    state = CubeState()
    applied: list[CubeMove] = []
    for _ in range(depth):
        choices = [m for m in moves if not applied or m.face != applied[-1].face]
        move = rng.choice(choices)
        state = cube_apply(state, move)
        applied.append(move)
    return state, applied


def parse_move(text: str) -> CubeMove:
    m = re.fullmatch(r"\s*([URFDLB])(['2]?)\s*", text)
    if not m:
        raise ValueError(f"unrecognized cube move {text!r}")
    return CubeMove(m.group(1), {"": CW, "'": CCW, "2": HALF}[m.group(2)])


class CubeDomain(Domain):
    domain_id = "cube2x2"
    default_depth_cap = 11
    default_budget = 2000
    accessors = {"faces": (1,), "uniform": (1,)}

    def __init__(self, move_set: str = "full"):
        if move_set not in MOVE_SETS:
            raise ValueError(f"unknown move set {move_set!r}")
        self.move_set = move_set
        self.moves = MOVE_SETS[move_set]

    def key(self, payload: CubeState) -> str:
        return "".join(map(str, payload.facelets))

    def actions(self, payload):
        return list(self.moves)

    def apply(self, payload, action):
        return cube_apply(payload, action)

    def is_goal(self, payload, goal=None):
        return cube_is_solved(payload)

    def view(self, payload, goal=None):
        return {"state": payload.facelets}

    def accessor_impls(self):
        return {"faces": _faces, "uniform": _uniform}

    def render_state(self, payload):
        return "[" + ",".join(map(str, payload.facelets)) + "]"

    def parse_state(self, text):
        return CubeState(tuple(int(x) for x in re.findall(r"\d", text)))

    def parse_action(self, text, payload=None):
        return parse_move(text)

    def redundant(self, previous, action):
        return previous is not None and previous.face == action.face

    def make_task(self, payload, goal=None, instance_id="", optimal_depth=None, **options):
        options.setdefault("move_set", self.move_set)
        return super().make_task(payload, goal, instance_id, optimal_depth, **options)


def _faces(xs):
    if not isinstance(xs, tuple) or len(xs) != 24:
        return None
    return faces_of(xs)


def _uniform(face):
    if not isinstance(face, tuple) or not face:
        return None
    return all(x == face[0] for x in face)
