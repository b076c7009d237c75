"""Population-based heuristic evolution.

Generation 0 asks the generator for ``b`` proposals. Each later generation
builds a fresh pool from ``b`` exploration and ``b`` modification offspring of
the previous survivors, scores every candidate by validation accuracy, keeps
the better half and samples ``b`` of them. The archive remembers the best
candidate of every generation; the overall winner is the best across all of
them, not the last generation's.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Protocol, Sequence

from .core import PlanningTask, WorldModel, validate_plan
from .domains import domain_for
from .dsl import DSLError, HeuristicProgram, compile_program
from .search import SearchConfig, search

EXPLORATION_TYPES = (1, 2)
MODIFICATION_TYPES = (3, 4)
DEFAULT_RETRIES = 3


class GeneratorError(Exception):
    """A transient generator failure (network, extraction); the call may be retried."""


class GeneratorFailure(RuntimeError):
    def __init__(self, what: str, attempts: list):
        lines = "; ".join(f"#{i + 1}: {a}" for i, a in enumerate(attempts))
        super().__init__(f"{what} failed after {len(attempts)} attempts ({lines})")
        self.attempts = attempts


@dataclass(frozen=True)
class Proposal:
    description: str
    source: str
    raw: str = ""
    diagnostic: str = ""


class GeneratorPort(Protocol):
    def propose(self, task_desc: str, n: int) -> list[Proposal]: ...

    def explore(self, existing: Sequence[HeuristicProgram], evolution_type: int) -> Proposal: ...

    def modify(self, existing: Sequence[HeuristicProgram], evolution_type: int) -> Proposal: ...


@dataclass
class Candidate:
    program: Optional[HeuristicProgram]
    source: str
    description: str = ""
    validation_accuracy: float = 0.0
    mean_expansions: float = float("inf")
    fault_count: int = 0
    generation_born: int = 0
    disqualified: str = ""
    operator: str = "propose"
    evolution_type: Optional[int] = None
    parents: tuple = ()
    id: str = ""

    def __post_init__(self):
        if not self.id:
            if self.program is not None:
                self.id = self.program.id
            else:
                import hashlib

                self.id = "x" + hashlib.sha256(self.source.encode()).hexdigest()[:15]

    @property
    def rank_key(self):
        return (-self.validation_accuracy, self.mean_expansions, self.id)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "description": self.description,
            "source": self.source,
            "kind": self.program.kind if self.program else None,
            "accuracy": self.validation_accuracy,
            "stats": {
                "mean_expansions": None if self.mean_expansions == float("inf") else self.mean_expansions,
                "faults": self.fault_count,
            },
            "generation_born": self.generation_born,
            "disqualified": self.disqualified,
            "lineage": {"operator": self.operator, "evolution_type": self.evolution_type, "parents": list(self.parents)},
        }


@dataclass
class Population:
    members: list
    generation_index: int
    b: int


@dataclass
class GenerationRecord:
    index: int
    candidates: list  # every candidate evaluated in this generation
    survivors: list  # ids
    best: Candidate


@dataclass
class Archive:
    domain_id: str
    b: int
    generations: list = field(default_factory=list)
    global_best: Optional[Candidate] = None
    lineage: list = field(default_factory=list)
    seed: Optional[int] = None

    def record(self, rec: GenerationRecord) -> None:
        self.generations.append(rec)
        if self.global_best is None or rec.best.rank_key < self.global_best.rank_key:
            self.global_best = rec.best

    @property
    def running_best(self) -> list[float]:
        out, best = [], 0.0
        for rec in self.generations:
            best = max(best, rec.best.validation_accuracy)
            out.append(best)
        return out

    def to_dict(self) -> dict:
        return {
            "domain": self.domain_id,
            "b": self.b,
            "K": len(self.generations) - 1,
            "seed": self.seed,
            "generations": [
                {
                    "index": r.index,
                    "best": r.best.id,
                    "best_accuracy": r.best.validation_accuracy,
                    "survivors": r.survivors,
                    "candidates": [c.to_dict() for c in r.candidates],
                }
                for r in self.generations
            ],
            "global_best": self.global_best.to_dict() if self.global_best else None,
            "running_best_accuracy": self.running_best,
            "lineage": self.lineage,
        }

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    def export_best(self, path) -> None:
        """Write the winning heuristic as a standalone DSL file."""
        best = self.global_best
        if best is None or best.program is None:
            raise ValueError("archive has no usable best heuristic")
        text = f"# Heuristic Description: {best.description}\n# domain: {self.domain_id}\n"
        text += f"# validation accuracy: {best.validation_accuracy}\n"
        from .dsl import pretty_print

        text += pretty_print(best.program) + "\n"
        Path(path).write_text(text, encoding="utf-8")


def load_archive_best(path) -> HeuristicProgram:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    best = data["global_best"]
    if best["kind"] is None:
        raise ValueError("archive best is disqualified")
    return HeuristicProgram(best["kind"], best["source"], data["domain"], best["description"])


# -- evaluation --------------------------------------------------------------


class Evaluator:
    """Scores a program by heuristic-guided search over a validation set.

    Results are memoized by program id: in ground-truth mode the outcome is a
    pure function of the program, the tasks and the search settings.
    """

    def __init__(self, validation: Sequence[PlanningTask], cfg: SearchConfig | None = None,
                 algorithm: str = "astar", model_factory=None, **overrides):
        if not validation:
            raise ValueError("validation set is empty")
        self.validation = list(validation)
        self.cfg = cfg
        self.algorithm = algorithm
        self.overrides = overrides
        self.model_factory = model_factory
        self._memo: dict = {}

    def config_for(self, task) -> SearchConfig:
        return self.cfg or SearchConfig.for_task(task, self.algorithm, **self.overrides)

    def __call__(self, program: HeuristicProgram) -> tuple[float, float, int]:
        if program.id not in self._memo:
            self._memo[program.id] = self._run(program)
        return self._memo[program.id]

    def _run(self, program):
        h = compile_program(program)
        solved, expansions, faults = 0, [], 0
        for task in self.validation:
            domain = domain_for(task)
            model = self.model_factory(domain) if self.model_factory else WorldModel.ground_truth(domain)
            result = search(task, model, h, self.config_for(task))
            faults += result.stats.heuristic_faults
            if result.solved and validate_plan(task, result.plans[0]).valid:
                solved += 1
                expansions.append(result.stats.expansions)
        mean = sum(expansions) / len(expansions) if expansions else float("inf")
        return solved / len(self.validation), mean, faults


def evaluate_candidate(program: HeuristicProgram, validation, model: WorldModel | None = None,
                       cfg: SearchConfig | None = None) -> Candidate:
    factory = (lambda _domain: model) if model is not None else None
    acc, mean, faults = Evaluator(validation, cfg, model_factory=factory)(program)
    return Candidate(program, program.source, program.description, acc, mean, faults)


# -- the loop ----------------------------------------------------------------


class Evolution:
    def __init__(self, gen: GeneratorPort, evaluator, domain_id: str, b: int, seed=0,
                 retries: int = DEFAULT_RETRIES):
        if b < 2:
            raise ValueError("population size b must be at least 2")
        self.gen = gen
        self.evaluator = evaluator
        self.domain_id = domain_id
        self.b = b
        self.rng = random.Random(seed)
        self.retries = retries
        self.archive = Archive(domain_id, b, seed=seed if isinstance(seed, int) else None)
        self._explore_calls = 0
        self._modify_calls = 0

    # one proposal -> candidate, with the retry cap for transient errors and parse failures
    def _obtain(self, ask, what: str, generation: int, operator: str, etype, parents) -> Candidate:
        errors: list = []
        last = None
        for _ in range(self.retries):
            try:
                proposal = ask()
            except GeneratorError as exc:
                errors.append(str(exc))
                continue
            try:
                program = HeuristicProgram.from_source(proposal.source, self.domain_id, proposal.description)
            except DSLError as exc:
                last = (proposal, str(exc))
                errors.append(str(exc))
                continue
            return Candidate(program, program.source, proposal.description, generation_born=generation,
                             operator=operator, evolution_type=etype, parents=tuple(parents))
        if last is None:
            raise GeneratorFailure(what, errors)
        proposal, diagnostic = last
        return Candidate(None, proposal.source, proposal.description, generation_born=generation,
                         disqualified=diagnostic, operator=operator, evolution_type=etype, parents=tuple(parents))

    def _score(self, cand: Candidate) -> Candidate:
        if cand.program is not None:
            cand.validation_accuracy, cand.mean_expansions, cand.fault_count = self.evaluator(cand.program)
        return cand

    def _log(self, cand: Candidate, generation: int) -> None:
        self.archive.lineage.append(
            {
                "generation": generation,
                "id": cand.id,
                "operator": cand.operator,
                "evolution_type": cand.evolution_type,
                "parents": list(cand.parents),
            }
        )

    def init_population(self) -> Population:
        members = []
        for i in range(self.b):
            def ask():
                proposals = self.gen.propose(self.domain_id, 1)
                if not proposals:
                    raise GeneratorError("generator returned no proposal")
                return proposals[0]

            members.append(self._obtain(ask, f"proposal {i + 1}", 0, "propose", None, ()))
        for c in members:
            self._score(c)
            self._log(c, 0)
        members.sort(key=lambda c: c.rank_key)
        self.archive.record(GenerationRecord(0, list(members), [c.id for c in members], members[0]))
        return Population(members, 0, self.b)

    def next_exploration_type(self) -> int:
        t = EXPLORATION_TYPES[self._explore_calls % 2]
        self._explore_calls += 1
        return t

    def next_modification_type(self) -> int:
        t = MODIFICATION_TYPES[self._modify_calls % 2]
        self._modify_calls += 1
        return t

    def step(self, pop: Population) -> Population:
        if not pop.members:
            raise ValueError("cannot evolve an empty population")
        gen_index = pop.generation_index + 1
        parents = [c for c in pop.members if c.program is not None]
        programs = [c.program for c in parents]
        pool: list[Candidate] = []
        for i in range(self.b):
            etype = self.next_exploration_type()
            pool.append(self._obtain(lambda: self.gen.explore(programs, etype), f"exploration {i + 1}",
                                     gen_index, "explore", etype, [c.id for c in parents]))
        for i in range(self.b):
            etype = self.next_modification_type()
            if parents:
                parent = parents[i % len(parents)]
                ask = lambda: self.gen.modify([parent.program], etype)  # noqa: E731
                ids = [parent.id]
            else:
                ask = lambda: self.gen.explore([], EXPLORATION_TYPES[0])  # noqa: E731
                ids = []
            pool.append(self._obtain(ask, f"modification {i + 1}", gen_index, "modify", etype, ids))

        unique: dict = {}
        for c in pool:
            unique.setdefault(c.id, c)
        pool = list(unique.values())
        for c in pool:
            self._score(c)
            self._log(c, gen_index)
        pool.sort(key=lambda c: c.rank_key)
        kept = pool[: max(1, len(pool) // 2)]
        if len(kept) > self.b:
            kept = sorted(self.rng.sample(kept, self.b), key=lambda c: c.rank_key)
        self.archive.record(GenerationRecord(gen_index, pool, [c.id for c in kept], pool[0]))
        return Population(kept, gen_index, self.b)

    def run(self, K: int) -> Archive:
        if K < 1:
            raise ValueError("K must be at least 1")
        pop = self.init_population()
        for _ in range(K):
            pop = self.step(pop)
        return self.archive


def init_population(gen: GeneratorPort, b: int, evaluator, domain_id: str, seed=0) -> Population:
    return Evolution(gen, evaluator, domain_id, b, seed).init_population()


def evolve(gen: GeneratorPort, evaluator, b: int, K: int, domain_id: str, seed=0,
           retries: int = DEFAULT_RETRIES) -> Archive:
    return Evolution(gen, evaluator, domain_id, b, seed, retries).run(K)
