"""Solve one instance of each domain with its builtin heuristic.

    python demos/solve_three_domains.py
"""

from autohd.bench import oracle_solve
from autohd.core import WorldModel, validate_plan
from autohd.domains import get_domain
from autohd.domains.blocksworld import bw_parse_goal
from autohd.domains.cube import cube_scramble
from autohd.domains.game24 import Game24State
from autohd.dsl import DEFAULT_BUILTIN, builtin, compile_program
from autohd.search import SearchConfig, search


def show(task, algorithm):
    domain = get_domain(task.domain_id)
    h = compile_program(builtin(DEFAULT_BUILTIN[task.domain_id], task.domain_id))
    result = search(task, WorldModel.ground_truth(domain), h, SearchConfig.for_task(task, algorithm))
    print(f"== {task.domain_id} ({algorithm}, heuristic {h.program.source})")
    print("start:", domain.render_state(task.initial_state.payload))
    for i, action in enumerate(result.plan.actions if result.solved else [], start=1):
        print(f"  {i}. {domain.render_action(action)}")
    print(f"status {result.status}, {result.stats.expansions} expansions, "
          f"valid {validate_plan(task, result.plan).valid if result.solved else False}, "
          f"optimal length {oracle_solve(task).optimal_depth}")
    print()


if __name__ == "__main__":
    bw = get_domain("blocksworld")
    start = bw.parse_state(
        "the red block is clear, the yellow block is clear, the hand is empty, the red block is on top of "
        "the blue block, the yellow block is on top of the orange block, the blue block is on the table "
        "and the orange block is on the table"
    )
    goal = bw_parse_goal("the orange block is on top of the red block, the blue block is on the table, "
                         "the red block is on the table, the yellow block is on the table")
    show(bw.make_task(start, goal), "astar")

    g24 = get_domain("game24")
    show(g24.make_task(Game24State((4, 4, 6, 8))), "greedy_bfs")

    cube = get_domain("cube2x2")
    scrambled, moves = cube_scramble(4, seed=3)
    print("scramble:", " ".join(cube.render_action(m) for m in moves))
    show(cube.make_task(scrambled), "astar")
