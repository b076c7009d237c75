"""Model-backed heuristic proposer and evolver."""

from __future__ import annotations

from typing import Sequence

from ..dsl import DSLError, HeuristicProgram
from ..evolution import GeneratorError, Proposal
from .client import Gateway, ModelEndpoint, TransportError
from .extract import ExtractionError, extract_heuristic
from .prompts import evolution_prompt, proposal_prompt, repair_prompt

PROPOSE_TEMPERATURE = 0.7
MODIFY_TEMPERATURE = 0.2


class LLMGenerator:
    """GeneratorPort over a chat-completion gateway.

    A reply that cannot be extracted or parsed gets exactly one repair
    re-prompt carrying the diagnostic; a second failure is handed back as a
    proposal with ``diagnostic`` set, which evolution records as disqualified.
    Transport failures surface as :class:`GeneratorError` so the caller can
    retry them.
    """

    def __init__(self, gateway: Gateway, domain_id: str, endpoint: ModelEndpoint | None = None,
                 propose_temperature: float = PROPOSE_TEMPERATURE, modify_temperature: float = MODIFY_TEMPERATURE):
        self.gateway = gateway
        self.domain_id = domain_id
        base = endpoint or gateway.endpoint
        self.explore_ep = base.with_temperature(propose_temperature)
        self.modify_ep = base.with_temperature(modify_temperature)
        self.prompts: list = []  # (operator, evolution_type, prompt) in emission order

    def _ask(self, prompt: str, ep: ModelEndpoint) -> str:
        try:
            return self.gateway.complete(prompt, ep)
        except TransportError as exc:
            raise GeneratorError(str(exc)) from exc

    def _attempt(self, prompt: str, reply: str):
        try:
            found = extract_heuristic(reply)
            HeuristicProgram.from_source(found.code_block, self.domain_id, found.description)
            return Proposal(found.description, found.code_block, reply), None
        except (ExtractionError, DSLError) as exc:
            source = ""
            try:
                source = extract_heuristic(reply).code_block
            except ExtractionError:
                source = reply
            return Proposal("", source, reply, str(exc)), str(exc)

    def _generate(self, prompt: str, ep: ModelEndpoint, operator: str, etype) -> Proposal:
        self.prompts.append((operator, etype, prompt))
        reply = self._ask(prompt, ep)
        proposal, problem = self._attempt(prompt, reply)
        if problem is None:
            return proposal
        fix = repair_prompt(prompt, reply, problem)
        self.prompts.append(("repair", etype, fix))
        proposal, _ = self._attempt(fix, self._ask(fix, ep))
        return proposal

    def propose(self, task_desc: str, n: int) -> list[Proposal]:
        prompt = proposal_prompt(self.domain_id)
        return [self._generate(prompt, self.explore_ep, "propose", None) for _ in range(n)]

    def explore(self, existing: Sequence[HeuristicProgram], evolution_type: int) -> Proposal:
        prompt = evolution_prompt(self.domain_id, existing, evolution_type)
        return self._generate(prompt, self.explore_ep, "explore", evolution_type)

    def modify(self, existing: Sequence[HeuristicProgram], evolution_type: int) -> Proposal:
        prompt = evolution_prompt(self.domain_id, existing, evolution_type)
        return self._generate(prompt, self.modify_ep, "modify", evolution_type)
