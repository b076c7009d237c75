"""Pull a heuristic description and program text out of a model reply."""

from __future__ import annotations

import re
from dataclasses import dataclass

FENCE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)
DESCRIPTION = re.compile(r"heuristic description\s*:\s*(.*)", re.IGNORECASE)


class ExtractionError(ValueError):
    pass


@dataclass(frozen=True)
class ExtractionResult:
    description: str
    code_block: str
    raw: str


def _clean_description(text: str) -> str:
    return text.strip().strip("'\"`").strip()


def extract_heuristic(response: str) -> ExtractionResult:
    """Description from the ``Heuristic Description:`` line, code from the
    first fenced block, or from the text after the description when there
    are no fences."""
    if not response or not response.strip():
        raise ExtractionError("empty response")
    lines = response.splitlines()
    desc_line = next((i for i, line in enumerate(lines) if DESCRIPTION.search(line)), None)
    description = _clean_description(DESCRIPTION.search(lines[desc_line]).group(1)) if desc_line is not None else ""

    fence = FENCE.search(response)
    if fence:
        code = fence.group(1).strip()
    elif desc_line is not None:
        code = "\n".join(lines[desc_line + 1:]).strip()
    else:
        code = ""
    if not code:
        raise ExtractionError("no code region found in the response")
    return ExtractionResult(description, code, response)
