"""Prompt templates with ``<slot>`` markers, shipped as package data."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Mapping, Sequence

from ..core import DOMAIN_IDS

SLOT = re.compile(r"<([a-z][a-z_]*)>")


class TemplateError(KeyError):
    def __str__(self):
        return self.args[0] if self.args else "template error"


@dataclass(frozen=True)
class PromptTemplate:
    name: str
    body: str
    domain_id: str = ""

    @property
    def slots(self) -> tuple:
        return tuple(dict.fromkeys(SLOT.findall(self.body)))


def _read(filename: str) -> str:
    return resources.files("autohd.llm").joinpath("templates", filename).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def load_template(name: str) -> PromptTemplate:
    """Load ``templates/<name>.txt``; names are ``<domain>_<kind>`` or plain."""
    try:
        body = _read(f"{name}.txt")
    except FileNotFoundError:
        raise TemplateError(f"no prompt template named {name!r}") from None
    prefix = name.rsplit("_", 1)[0]
    domain = prefix if prefix in DOMAIN_IDS else ""
    return PromptTemplate(name, body, domain)


@lru_cache(maxsize=None)
def evolution_types() -> dict:
    """Evolution type number -> instruction text."""
    out = {}
    for line in _read("evolution_types.txt").splitlines():
        m = re.match(r"(\d+)\.\s+(.*)", line)
        if m:
            out[int(m.group(1))] = line.strip()
    return out


def render_prompt(template: PromptTemplate, slots: Mapping[str, str]) -> str:
    """Substitute every slot marker in one pass; inserted text is not rescanned."""
    missing = [s for s in template.slots if s not in slots]
    if missing:
        raise TemplateError(f"template {template.name!r} is missing slot(s): {', '.join(missing)}")
    return SLOT.sub(lambda m: str(slots[m.group(1)]), template.body)


def format_existing(programs: Sequence) -> str:
    """Render heuristics for the ``existing_heuristics`` slot."""
    item = load_template("evolution_item")
    parts = [
        render_prompt(item, {"index": i, "description": p.description or "(none)", "source": p.source}).rstrip("\n")
        for i, p in enumerate(programs, start=1)
    ]
    return "\n\n".join(parts)


def proposal_prompt(domain_id: str) -> str:
    return render_prompt(load_template(f"{domain_id}_proposal"), {})


def evolution_prompt(domain_id: str, programs: Sequence, evolution_type: int) -> str:
    types = evolution_types()
    if evolution_type not in types:
        raise TemplateError(f"unknown evolution type {evolution_type}")
    return render_prompt(
        load_template(f"{domain_id}_evolution"),
        {"existing_heuristics": format_existing(programs), "evolution_type": types[evolution_type]},
    )


def repair_prompt(previous_prompt: str, previous_response: str, diagnostic: str) -> str:
    return render_prompt(
        load_template("repair"),
        {"previous_prompt": previous_prompt.rstrip("\n"), "previous_response": previous_response.strip(),
         "diagnostic": diagnostic},
    )
