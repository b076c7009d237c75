"""Write a heuristic in the DSL, check it, and compare it with a builtin.

    python demos/write_a_heuristic.py
"""

from autohd.bench import RunConfig, ablation, gen_dataset, report
from autohd.dsl import DSLError, HeuristicProgram, compile_program, pretty_print

SOURCE = """
# blocks resting on the wrong support, plus one while a block is held
let wrong = filter(g in goal, support(find(state, block(g))) != support(g)) in
len(wrong) + len(filter(r in state, support(r) == HAND))
"""

if __name__ == "__main__":
    try:
        HeuristicProgram.from_source("len(goals)", "blocksworld")
    except DSLError as exc:
        print("rejected as expected:", exc)

    program = HeuristicProgram.from_source(SOURCE, "blocksworld", "misplaced supports")
    print("canonical form:")
    print(pretty_print(program))
    print("id", program.id)
    print()

    tasks = gen_dataset("blocksworld", {"depths": {2: 5, 4: 5, 6: 5}}, seed=4)
    for name, h in (("custom", compile_program(program)), ("builtin", "builtin:bw_misplaced_plus_distance")):
        rows, _ = ablation(RunConfig("blocksworld", tasks, h))
        print(f"-- {name}")
        print(report(rows)[0])
