"""Provider-facing layer: prompts, parsing, and the two agent roles."""

from .mock import MockProvider
from .parsing import Diagnostic, ParseOutcome, parse_structured_output
from .prompts import (
    FUNCTIONAL_TEMPERATURE,
    TUTOR_TEMPERATURE,
    GenerateOptions,
    PromptBundle,
    functional_prompt,
    tutor_prompt,
)
from .provider import ChatMessage, HttpProvider, Provider, ProviderOptions
from .runtime import (
    AgentOutcome,
    AgentSettings,
    FunctionalAgent,
    TutorMessage,
    TutorSession,
    run_functional_agent,
    tutor_reply,
)

__all__ = [
    "AgentOutcome",
    "AgentSettings",
    "ChatMessage",
    "Diagnostic",
    "FUNCTIONAL_TEMPERATURE",
    "FunctionalAgent",
    "GenerateOptions",
    "HttpProvider",
    "MockProvider",
    "ParseOutcome",
    "PromptBundle",
    "Provider",
    "ProviderOptions",
    "TUTOR_TEMPERATURE",
    "TutorMessage",
    "TutorSession",
    "parse_structured_output",
    "run_functional_agent",
    "tutor_reply",
]
