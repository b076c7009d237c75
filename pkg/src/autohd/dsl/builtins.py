"""Reference heuristics, implemented natively over the DSL state views.

Each one also has an equivalent DSL text in :data:`BUILTIN_SOURCES`; the two
forms are checked against each other in the test-suite.
"""

from __future__ import annotations

from fractions import Fraction

from ..domains.blocksworld import find_row
from ..domains.game24 import TARGET, reachable_values


def bw_misplaced_plus_distance(view) -> float:
    """Misplaced blocks plus the summed height error of those blocks."""
    current = view["state"]
    misplaced = 0
    distance = 0
    for row in view["goal"]:
        cur = find_row(current, row.block)
        if cur is None or cur.support != row.support:
            misplaced += 1
            distance += abs((cur.height if cur else 0) - row.height)
    return float(misplaced + distance)


def g24_min_expr_gap(view) -> float:
    nums = tuple(sorted(Fraction(x) for x in view["state"]))
    return float(min(abs(TARGET - v) for v in reachable_values(nums)))


def cube_nonuniform_faces(view) -> float:
    f = view["state"]
    uniform = sum(1 for i in range(0, 24, 4) if f[i] == f[i + 1] == f[i + 2] == f[i + 3])
    return float(6 - uniform)


def zero(view) -> float:
    return 0.0


BUILTINS = {
    "bw_misplaced_plus_distance": ("blocksworld", bw_misplaced_plus_distance),
    "g24_min_expr_gap": ("game24", g24_min_expr_gap),
    "cube_nonuniform_faces": ("cube2x2", cube_nonuniform_faces),
    "zero": (None, zero),
}

DEFAULT_BUILTIN = {
    "blocksworld": "bw_misplaced_plus_distance",
    "game24": "g24_min_expr_gap",
    "cube2x2": "cube_nonuniform_faces",
}

BUILTIN_SOURCES = {
    "bw_misplaced_plus_distance": (
        "let wrong = filter(g in goal, support(find(state, block(g))) != support(g)) in "
        "len(wrong) + sum(map(g in wrong, abs(height(find(state, block(g))) - height(g))))"
    ),
    "g24_min_expr_gap": "min(map(v in values(state), abs(target - v)))",
    "cube_nonuniform_faces": "sum(map(face in faces(state), if uniform(face) then 0 else 1))",
    "zero": "0",
}

DESCRIPTIONS = {
    "bw_misplaced_plus_distance": "Counts blocks resting on the wrong support and adds how far each one sits from its goal height.",
    "g24_min_expr_gap": "Smallest absolute gap between 24 and any value reachable from the remaining numbers.",
    "cube_nonuniform_faces": "Six minus the number of single-colored faces.",
    "zero": "Constant zero.",
}
