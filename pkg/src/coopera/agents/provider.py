"""Chat-completion providers.

``HttpProvider`` talks to any service exposing the common
``POST {base_url}/chat/completions`` shape. Failures surface as
``ProviderError`` with a ``kind`` of timeout, auth, rate_limit, or
transport; transient kinds get one retry, auth does not.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import httpx

from ..errors import ProviderError
from ..model import Stage

ENV_API_KEY = "PROVIDER_API_KEY"
ENV_BASE_URL = "PROVIDER_BASE_URL"
ENV_MODEL = "PROVIDER_MODEL"

DEFAULT_MODEL = "gpt-4o-mini"
DEFAULT_TIMEOUT = 30.0


@dataclass(frozen=True)
class ChatMessage:
    role: str  # "system" | "user" | "assistant"
    content: str

    def to_dict(self) -> dict:
        return {"role": self.role, "content": self.content}


@dataclass
class ProviderOptions:
    temperature: float = 0.3
    max_tokens: int = 1600
    timeout: float = DEFAULT_TIMEOUT
    purpose: str = "functional"  # or "tutor"
    stage: Stage | None = None
    seed: int | None = None
    # Structured upstream content for providers that synthesize locally
    # instead of calling a model (exact names and ordinals to reuse).
    context_data: dict = field(default_factory=dict)


class Provider(Protocol):
    name: str

    def complete(self, messages: Sequence[ChatMessage], options: ProviderOptions) -> str: ...


class HttpProvider:
    name = "http"

    def __init__(
        self,
        base_url: str,
        api_key: str = "",
        model: str = DEFAULT_MODEL,
        transport: httpx.BaseTransport | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.model = model
        self._client = httpx.Client(transport=transport)

    @classmethod
    def from_env(cls) -> "HttpProvider":
        base_url = os.environ.get(ENV_BASE_URL, "")
        if not base_url:
            raise ProviderError(f"{ENV_BASE_URL} is not set", kind="transport")
        return cls(
            base_url=base_url,
            api_key=os.environ.get(ENV_API_KEY, ""),
            model=os.environ.get(ENV_MODEL, DEFAULT_MODEL),
        )

    def complete(self, messages: Sequence[ChatMessage], options: ProviderOptions) -> str:
        last: ProviderError | None = None
        for attempt in range(2):
            try:
                return self._complete_once(messages, options)
            except ProviderError as exc:
                if exc.kind == "auth":
                    raise
                last = exc
        assert last is not None
        raise last

    def _complete_once(self, messages: Sequence[ChatMessage], options: ProviderOptions) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": self.model,
            "messages": [m.to_dict() for m in messages],
            "temperature": options.temperature,
            "max_tokens": options.max_tokens,
        }
        if options.seed is not None:
            body["seed"] = options.seed
        try:
            response = self._client.post(
                f"{self.base_url}/chat/completions",
                json=body,
                headers=headers,
                timeout=options.timeout,
            )
        except httpx.TimeoutException as exc:
            raise ProviderError(f"completion timed out after {options.timeout}s", kind="timeout") from exc
        except httpx.HTTPError as exc:
            raise ProviderError(f"transport failure: {exc}", kind="transport") from exc
        if response.status_code in (401, 403):
            raise ProviderError(f"provider rejected credentials (HTTP {response.status_code})", kind="auth")
        if response.status_code == 429:
            raise ProviderError("provider rate limit hit (HTTP 429)", kind="rate_limit")
        if response.status_code >= 400:
            raise ProviderError(f"provider returned HTTP {response.status_code}", kind="transport")
        try:
            payload = response.json()
            content = payload["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"malformed completion response: {exc}", kind="transport") from exc
        if not isinstance(content, str):
            raise ProviderError("completion content is not text", kind="transport")
        return content

    def close(self) -> None:
        self._client.close()
