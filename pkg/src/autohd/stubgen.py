"""A deterministic offline heuristic generator.

Every proposal is a weighted combination of hand-written DSL terms for the
domain. Exploration draws fresh term sets, modification rescales the weights
of an existing candidate. All randomness comes from one seeded generator, so a
run is a pure function of the seed and the call sequence.
"""

from __future__ import annotations

import random
from typing import Sequence

from .dsl import HeuristicProgram
from .evolution import Proposal

TERMS = {
    "cube2x2": {
        "nonuniform": (
            "sum(map(face in faces(state), if uniform(face) then 0 else 1))",
            "number of faces showing more than one color",
        ),
        "stray": (
            "sum(map(face in faces(state), len(filter(c in face, c != at(face, 0)))))",
            "stickers that differ from the first sticker of their face",
        ),
        "diagonal": (
            "len(filter(face in faces(state), at(face, 0) != at(face, 3)))",
            "faces whose diagonal corners disagree",
        ),
        "rows": (
            "len(filter(face in faces(state), at(face, 0) != at(face, 1) or at(face, 2) != at(face, 3)))",
            "faces with a mismatched row",
        ),
    },
    "game24": {
        "gap": ("min(map(v in values(state), abs(target - v)))", "distance from the closest number to 24"),
        "left": ("len(state) - 1", "numbers still to combine"),
        "spread": (
            "max(state) - min(state)",
            "spread between the largest and smallest number",
        ),
        "far": ("abs(target - sum(state))", "distance of the plain sum from 24"),
    },
    "blocksworld": {
        "misplaced": (
            "len(filter(g in goal, support(find(state, block(g))) != support(g)))",
            "blocks resting on the wrong support",
        ),
        "distance": (
            "sum(map(g in goal, abs(height(find(state, block(g))) - height(g))))",
            "total height difference against the goal",
        ),
        "held": ("len(filter(r in state, support(r) == HAND))", "a block is held"),
        "towers": (
            "len(filter(r in state, height(r) == 0))",
            "number of towers",
        ),
    },
}

WEIGHTS = (0.5, 1, 1, 2, 3)
FACTORS = (0.5, 0.75, 1.5, 2)


def _fmt(w) -> str:
    if float(w).is_integer():
        return str(int(w))
    return repr(float(w))


class StubGenerator:
    """Seeded GeneratorPort over the built-in term tables.

    ``junk_every`` makes every n-th response unparseable, ``duplicate`` makes
    exploration repeat its previous answer, both for exercising the loop's
    failure paths.
    """

    def __init__(self, domain_id: str, seed: int = 0, junk_every: int = 0, duplicate: bool = False):
        if domain_id not in TERMS:
            raise ValueError(f"no stub terms for domain {domain_id!r}")
        self.domain_id = domain_id
        self.terms = TERMS[domain_id]
        self.rng = random.Random(seed)
        self.junk_every = junk_every
        self.duplicate = duplicate
        self.calls = 0
        self._params: dict = {}  # canonical source -> weights
        self._last: Proposal | None = None

    def _build(self, weights: dict) -> Proposal:
        weights = {k: w for k, w in sorted(weights.items()) if w}
        if not weights:
            weights = {next(iter(self.terms)): 1}
        parts, words = [], []
        for name, w in weights.items():
            code, text = self.terms[name]
            parts.append(f"{_fmt(w)} * ({code})")
            words.append(f"{_fmt(w)} x {text}")
        description = "Weighted sum: " + "; ".join(words)
        source = " + ".join(parts)
        canonical = HeuristicProgram.from_source(source, self.domain_id).source
        self._params[canonical] = dict(weights)
        return Proposal(description, source, raw=f"Heuristic Description: {description}\n```\n{source}\n```")

    def _tick(self, make) -> Proposal:
        self.calls += 1
        if self.junk_every and self.calls % self.junk_every == 0:
            return Proposal("broken", "((( not a heuristic", raw="garbage")
        return make()

    def _fresh(self) -> Proposal:
        names = sorted(self.terms)
        k = self.rng.randint(1, 2)
        chosen = self.rng.sample(names, k)
        return self._build({n: self.rng.choice(WEIGHTS) for n in chosen})

    def _weights_of(self, program: HeuristicProgram) -> dict:
        return dict(self._params.get(program.source) or {next(iter(self.terms)): 1})

    def propose(self, task_desc: str, n: int) -> list[Proposal]:
        return [self._tick(self._fresh) for _ in range(n)]

    def explore(self, existing: Sequence[HeuristicProgram], evolution_type: int) -> Proposal:
        if self.duplicate and self._last is not None:
            return self._last

        def make():
            if evolution_type == 2 and existing:
                # motivated by a parent: keep its terms, add one more
                base = self._weights_of(self.rng.choice(list(existing)))
                extra = self.rng.choice(sorted(self.terms))
                base[extra] = base.get(extra, 0) + self.rng.choice(WEIGHTS)
                return self._build(base)
            return self._fresh()

        self._last = self._tick(make)
        return self._last

    def modify(self, existing: Sequence[HeuristicProgram], evolution_type: int) -> Proposal:
        def make():
            base = self._weights_of(existing[0]) if existing else {next(iter(self.terms)): 1}
            if evolution_type == 3:
                # structural tweak: drop or swap one term
                name = self.rng.choice(sorted(base))
                other = self.rng.choice(sorted(self.terms))
                w = base.pop(name)
                if other != name or not base:
                    base[other] = base.get(other, 0) + w
                return self._build(base)
            return self._build({k: w * self.rng.choice(FACTORS) for k, w in base.items()})

        return self._tick(make)
