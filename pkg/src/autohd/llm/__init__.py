"""Chat-completion gateway: prompts, extraction, generators and model-backed world models."""

from .client import (
    ENV_API_KEY,
    ENV_BASE_URL,
    ENV_FIXTURES,
    FixtureMissing,
    Gateway,
    GatewayError,
    ModelEndpoint,
    PermanentError,
    RateLimiter,
    TransportError,
    complete,
    prompt_hash,
)
from .extract import ExtractionError, ExtractionResult, extract_heuristic
from .generator import LLMGenerator
from .prompts import (
    PromptTemplate,
    TemplateError,
    evolution_prompt,
    evolution_types,
    format_existing,
    load_template,
    proposal_prompt,
    render_prompt,
    repair_prompt,
)
from .world import WorldStats, llm_actions, llm_transition, model_backed_world

__all__ = [
    "ENV_API_KEY",
    "ENV_BASE_URL",
    "ENV_FIXTURES",
    "ExtractionError",
    "ExtractionResult",
    "FixtureMissing",
    "Gateway",
    "GatewayError",
    "LLMGenerator",
    "ModelEndpoint",
    "PermanentError",
    "PromptTemplate",
    "RateLimiter",
    "TemplateError",
    "TransportError",
    "WorldStats",
    "complete",
    "evolution_prompt",
    "evolution_types",
    "extract_heuristic",
    "format_existing",
    "llm_actions",
    "llm_transition",
    "load_template",
    "model_backed_world",
    "prompt_hash",
    "proposal_prompt",
    "render_prompt",
    "repair_prompt",
]
