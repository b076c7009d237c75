"""Model-backed action generation and transition prediction."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..core import MODEL_BACKED, EncodedState, WorldModel
from .client import Gateway, GatewayError, ModelEndpoint
from .prompts import load_template, render_prompt

ROUTED_DOMAINS = ("blocksworld", "game24")
_BULLET = re.compile(r"^\s*(?:[-*•]|\d+[.)])\s*")
_NEXT = re.compile(r"next state\s*:\s*(.*)", re.IGNORECASE)


@dataclass
class WorldStats:
    proposed: int = 0
    illegal: int = 0
    unparsed: int = 0
    dead_transitions: int = 0
    reprompts: int = 0


def _check_domain(domain) -> None:
    if domain.domain_id not in ROUTED_DOMAINS:
        raise ValueError(f"{domain.domain_id} uses ground-truth transitions only")


def _legalize(domain, payload, action, legal):
    if action in legal:
        return action
    # accept a differently spelled move when it lands in the same state as a legal one
    try:
        target = domain.key(domain.apply(payload, action))
    except (ValueError, ZeroDivisionError):
        return None
    for candidate in legal:
        if domain.key(domain.apply(payload, candidate)) == target:
            return candidate
    return None


def _parse_lines(domain, payload, text):
    parsed, bad = [], 0
    for line in text.splitlines():
        line = _BULLET.sub("", line).strip().strip("`")
        if not line:
            continue
        try:
            parsed.append(domain.parse_action(line, payload))
        except ValueError:
            bad += 1
    return parsed, bad


def llm_actions(gateway: Gateway, domain, payload, endpoint: ModelEndpoint | None = None,
                legality: bool = True, stats: WorldStats | None = None) -> list:
    """Actions the model proposes for ``payload``, filtered by ground-truth legality."""
    _check_domain(domain)
    stats = stats if stats is not None else WorldStats()
    prompt = render_prompt(load_template(f"{domain.domain_id}_actions"), {"state_text": domain.render_state(payload)})
    parsed, bad = _parse_lines(domain, payload, gateway.complete(prompt, endpoint))
    if not parsed:
        stats.reprompts += 1
        retry = prompt + "\n\nYour previous answer contained no action in the required form. Answer again."
        parsed, bad = _parse_lines(domain, payload, gateway.complete(retry, endpoint))
    stats.unparsed += bad
    stats.proposed += len(parsed)
    if not legality:
        return list(dict.fromkeys(parsed))
    legal = domain.actions(payload)
    out = []
    for action in parsed:
        fixed = _legalize(domain, payload, action, legal)
        if fixed is None:
            stats.illegal += 1
        elif fixed not in out:
            out.append(fixed)
    return out


def _parse_state(domain, text):
    m = _NEXT.search(text)
    candidate = m.group(1) if m else text.strip()
    return domain.parse_state(candidate.strip().strip("`"))


def llm_transition(gateway: Gateway, domain, payload, action, endpoint: ModelEndpoint | None = None,
                   stats: WorldStats | None = None):
    """The model's predicted successor, or ``None`` when its answer cannot be parsed twice."""
    _check_domain(domain)
    stats = stats if stats is not None else WorldStats()
    prompt = render_prompt(
        load_template(f"{domain.domain_id}_transition"),
        {"state_text": domain.render_state(payload), "action_text": domain.render_action(action)},
    )
    reply = gateway.complete(prompt, endpoint)
    try:
        return _parse_state(domain, reply)
    except ValueError as exc:
        stats.reprompts += 1
        retry = prompt + f"\n\nYour previous answer could not be read ({exc}). Answer again."
        try:
            return _parse_state(domain, gateway.complete(retry, endpoint))
        except ValueError:
            stats.dead_transitions += 1
            return None


def model_backed_world(domain, gateway: Gateway, endpoint: ModelEndpoint | None = None, legality: bool = True,
                       stats: WorldStats | None = None) -> WorldModel:
    """A WorldModel whose actions and transitions come from the gateway.

    Service failures are not swallowed: a :class:`GatewayError` propagates out
    of the search so the caller can report it.
    """
    _check_domain(domain)
    stats = stats if stats is not None else WorldStats()

    def actions(state: EncodedState):
        return llm_actions(gateway, domain, state.payload, endpoint, legality, stats)

    def transition(state: EncodedState, action):
        nxt = llm_transition(gateway, domain, state.payload, action, endpoint, stats)
        return None if nxt is None else domain.encode(nxt)

    return WorldModel(actions, transition, MODEL_BACKED)


__all__ = ["GatewayError", "WorldStats", "llm_actions", "llm_transition", "model_backed_world"]
