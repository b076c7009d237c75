"""Dataset generation and JSON-lines I/O.

Record formats (one instance per line)::

    blocksworld  {"id", "init": "<text>", "goal": "<text>", "min_steps": int}
    game24       {"id", "numbers": [int, int, int, int]}            (+ "solvable" when mixed)
    cube2x2      {"id", "state": [24 ints], "optimal_moves": int, "move_set": "full"|"reduced"}
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from ..core import PlanningTask
from ..domains import get_domain
from ..domains.blocksworld import (
    BlocksState,
    bw_apply,
    bw_actions,
    bw_parse_goal,
    bw_parse_state,
    bw_render_goal,
    bw_render_state,
    goal_of_state,
)
from ..domains.cube import CubeState, cube_scramble
from ..domains.game24 import Game24State
from .oracle import oracle_solve

BLOCK_NAMES = ("red", "blue", "orange", "yellow", "green", "purple", "white", "black", "cyan", "magenta")


class DatasetError(ValueError):
    pass


def _rng(seed):
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def gen_dataset(domain_id: str, spec: dict, seed=0) -> list[PlanningTask]:
    """Generate oracle-labelled instances.

    ``spec`` keys: ``depths`` ({depth: count}) for cube2x2 and blocksworld,
    ``count`` for game24. Optional: ``move_set`` (cube), ``blocks`` as a
    ``[min, max]`` block-count range (blocksworld), ``mixed`` (game24, keep
    unsolvable quadruples), ``resample_budget`` (tries per instance).
    """
    rng = _rng(seed)
    if domain_id == "cube2x2":
        return _gen_cube(spec, rng)
    if domain_id == "blocksworld":
        return _gen_blocks(spec, rng)
    if domain_id == "game24":
        return _gen_game24(spec, rng)
    raise DatasetError(f"unknown domain {domain_id!r}")


def _depths(spec) -> dict:
    depths = {int(k): int(v) for k, v in spec.get("depths", {}).items()}
    if not depths:
        raise DatasetError("spec needs a nonempty 'depths' map")
    if any(d < 1 for d in depths):
        raise DatasetError("depth buckets must be at least 1 (a zero-step goal is trivially satisfied)")
    return depths


def _gen_cube(spec, rng) -> list[PlanningTask]:
    move_set = spec.get("move_set", "full")
    domain = get_domain("cube2x2", move_set=move_set)
    budget = spec.get("resample_budget", 200)
    tasks = []
    # no de-duplication: the full move set has only 18 distinct depth-1 states
    for depth, count in sorted(_depths(spec).items()):
        made = 0
        for _ in range(budget * count):
            if made == count:
                break
            state, _ = cube_scramble(depth, rng, move_set)
            task = domain.make_task(state)
            if oracle_solve(task, depth).optimal_depth != depth:
                continue
            tasks.append(domain.make_task(state, None, f"cube-d{depth}-{made:03d}", depth))
            made += 1
        if made < count:
            raise DatasetError(f"could only generate {made}/{count} cube instances at depth {depth}")
    return tasks


def random_blocks_state(rng, names) -> BlocksState:
    names = list(names)
    rng.shuffle(names)
    stacks: list[list[str]] = []
    for name in names:
        k = rng.randrange(len(stacks) + 1)
        if k == len(stacks):
            stacks.append([name])
        else:
            stacks[k].append(name)
    return BlocksState(tuple(tuple(s) for s in stacks))


def _gen_blocks(spec, rng) -> list[PlanningTask]:
    domain = get_domain("blocksworld")
    lo, hi = spec.get("blocks", (3, 5))
    budget = spec.get("resample_budget", 500)
    tasks = []
    seen = set()
    for depth, count in sorted(_depths(spec).items()):
        if depth % 2:
            raise DatasetError("blocksworld plans from hand-empty to hand-empty have even length")
        made = 0
        for _ in range(budget * count):
            if made == count:
                break
            n = rng.randint(lo, hi)
            start = random_blocks_state(rng, BLOCK_NAMES[:n])
            end = start
            for _ in range(depth):
                end = bw_apply(end, rng.choice(bw_actions(end)))
            if end == start:
                continue
            goal = goal_of_state(end)
            sig = (domain.key(start), bw_render_goal(goal))
            if sig in seen:
                continue
            probe = domain.make_task(start, goal)
            if oracle_solve(probe, depth).optimal_depth != depth:
                continue
            seen.add(sig)
            tasks.append(domain.make_task(start, goal, f"bw-s{depth}-{made:03d}", depth))
            made += 1
        if made < count:
            raise DatasetError(f"could only generate {made}/{count} blocksworld instances at {depth} steps")
    return tasks


def _gen_game24(spec, rng) -> list[PlanningTask]:
    domain = get_domain("game24")
    count = int(spec.get("count", 100))
    mixed = bool(spec.get("mixed", False))
    budget = spec.get("resample_budget", 200)
    tasks, seen = [], set()
    for _ in range(budget * count):
        if len(tasks) == count:
            break
        numbers = tuple(rng.randint(1, 13) for _ in range(4))
        if tuple(sorted(numbers)) in seen:
            continue
        state = Game24State(numbers)
        depth = oracle_solve(domain.make_task(state), 3).optimal_depth
        if depth is None and not mixed:
            continue
        seen.add(tuple(sorted(numbers)))
        task = domain.make_task(state, None, f"g24-{len(tasks):03d}", depth)
        tasks.append(task)
    if len(tasks) < count:
        raise DatasetError(f"could only generate {len(tasks)}/{count} game24 instances")
    return tasks


# -- JSON lines --------------------------------------------------------------

def task_to_record(task: PlanningTask) -> dict:
    payload = task.initial_state.payload
    if task.domain_id == "blocksworld":
        return {
            "id": task.instance_id,
            "init": bw_render_state(payload),
            "goal": bw_render_goal(task.goal),
            "min_steps": task.optimal_depth,
        }
    if task.domain_id == "game24":
        rec = {"id": task.instance_id, "numbers": [int(x) for x in payload.numbers]}
        if task.optimal_depth is None:
            rec["solvable"] = False
        return rec
    return {
        "id": task.instance_id,
        "state": list(payload.facelets),
        "optimal_moves": task.optimal_depth,
        "move_set": task.options.get("move_set", "full"),
    }


def record_to_task(domain_id: str, rec: dict) -> PlanningTask:
    if domain_id == "blocksworld":
        domain = get_domain("blocksworld")
        return domain.make_task(
            bw_parse_state(rec["init"]), bw_parse_goal(rec["goal"]), str(rec.get("id", "")), rec.get("min_steps")
        )
    if domain_id == "game24":
        domain = get_domain("game24")
        depth = None if rec.get("solvable") is False else 3
        return domain.make_task(Game24State(tuple(rec["numbers"])), None, str(rec.get("id", "")), depth)
    if domain_id == "cube2x2":
        move_set = rec.get("move_set", "full")
        domain = get_domain("cube2x2", move_set=move_set)
        return domain.make_task(CubeState(tuple(rec["state"])), None, str(rec.get("id", "")), rec.get("optimal_moves"))
    raise DatasetError(f"unknown domain {domain_id!r}")


def save_jsonl(tasks, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fp:
        for task in tasks:
            fp.write(json.dumps(task_to_record(task)) + "\n")


def load_jsonl(domain_id: str, path) -> list[PlanningTask]:
    tasks = []
    with Path(path).open(encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, start=1):
            if not line.strip():
                continue
            try:
                tasks.append(record_to_task(domain_id, json.loads(line)))
            except (KeyError, ValueError) as exc:
                raise DatasetError(f"{path}:{lineno}: {exc}") from exc
    return tasks
