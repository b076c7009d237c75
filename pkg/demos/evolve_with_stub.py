"""Evolve cube heuristics offline with the seeded stub generator.

    python demos/evolve_with_stub.py

Prints the best candidate of every generation and the running maximum of
validation accuracy, then the overall winner as a DSL program.
"""

from autohd.bench import gen_dataset
from autohd.dsl import pretty_print
from autohd.evolution import Evaluator, Evolution
from autohd.stubgen import StubGenerator

if __name__ == "__main__":
    validation = gen_dataset("cube2x2", {"depths": {1: 2, 2: 3, 3: 3, 4: 2}}, seed=31)
    evaluator = Evaluator(validation, expansion_budget=200)
    evo = Evolution(StubGenerator("cube2x2", seed=1), evaluator, "cube2x2", b=4, seed=1)
    archive = evo.run(5)
    for rec, running in zip(archive.generations, archive.running_best):
        best = rec.best
        print(f"generation {rec.index}: {len(rec.candidates)} candidates, best {best.validation_accuracy:.2f} "
              f"({best.mean_expansions:.1f} expansions), running max {running:.2f}")
    winner = archive.global_best
    print()
    print("winner:", winner.description)
    print(pretty_print(winner.program))
