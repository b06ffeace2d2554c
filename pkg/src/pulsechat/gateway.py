"""Chat-completion provider abstraction.

One contract, two implementations: an HTTP provider speaking the widely
adopted chat-completion wire protocol (messages array, bearer credential),
and a deterministic scripted provider for offline tests and CI. Nothing
outside this module performs network activity.

Environment configuration:
  PULSECHAT_LLM_PROVIDER    "http" (default) or "scripted"
  PULSECHAT_LLM_BASE_URL    e.g. https://api.example.com/v1
  PULSECHAT_LLM_MODEL       model name sent in the request body
  PULSECHAT_LLM_API_KEY     bearer credential (never logged)
  PULSECHAT_LLM_TIMEOUT_MS  per-attempt timeout, default 30000
  PULSECHAT_SCRIPT_FILE     JSON array of replies for the scripted provider
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol, Sequence

import httpx

DEFAULT_TIMEOUT_MS = 30_000


class GatewayError(Exception):
    pass


class ProviderUnavailable(GatewayError):
    """Transient failures exhausted every retry attempt."""


class ProviderRejected(GatewayError):
    """The provider refused the request (4xx-class); retrying won't help."""


class EmptyCompletion(GatewayError):
    """The provider returned empty or whitespace-only text."""


class ScriptExhausted(GatewayError):
    def __init__(self, cursor: int, length: int):
        super().__init__(f"script exhausted: cursor {cursor} past {length} entries")


@dataclass(frozen=True)
class GenerationParams:
    temperature: float = 0.7
    max_output_tokens: int = 400
    timeout_s: float = DEFAULT_TIMEOUT_MS / 1000

    def __post_init__(self) -> None:
        if not 0 <= self.temperature <= 2:
            raise ValueError(f"temperature out of range: {self.temperature}")
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be >= 1")
        if self.timeout_s <= 0:
            raise ValueError("timeout must be positive")


@dataclass(frozen=True)
class GenerationRequest:
    """Everything a provider needs for one reply.

    ``history`` is (author, text) pairs with author "assistant" or
    "participant"; consecutive assistant entries are fine (system-composed
    turns produce them) but two participant entries may never be adjacent.
    """

    system_text: str
    history: tuple[tuple[str, str], ...]
    directive_text: str | None = None
    params: GenerationParams = field(default_factory=GenerationParams)

    def __post_init__(self) -> None:
        previous = None
        for author, text in self.history:
            if author not in ("assistant", "participant"):
                raise ValueError(f"unknown author {author!r}")
            if author == "participant" and previous == "participant":
                raise ValueError("history contains two consecutive participant entries")
            previous = author


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    backoff_s: float = 0.25

    def __post_init__(self) -> None:
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")


@dataclass(frozen=True)
class ProviderConfig:
    base_url: str
    model_name: str
    api_key: str = ""
    retry: RetryPolicy = field(default_factory=RetryPolicy)


class ReplySource(Protocol):
    """The one contract the orchestrator depends on."""

    def generate(self, request: GenerationRequest) -> str: ...


def next_scripted_reply(script: Sequence[str], cursor: int) -> tuple[str, int]:
    """Pure cursor advance over a fixed reply list."""
    if cursor >= len(script):
        raise ScriptExhausted(cursor, len(script))
    return script[cursor], cursor + 1


class ScriptedProvider:
    """Deterministic reply source: returns script entries in order."""

    def __init__(self, script: Sequence[str]):
        self.script = list(script)
        self.cursor = 0

    @classmethod
    def from_file(cls, path: str | Path) -> ScriptedProvider:
        entries = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(entries, list) or not all(isinstance(e, str) for e in entries):
            raise ValueError(f"{path}: script file must be a JSON array of strings")
        return cls(entries)

    def generate(self, request: GenerationRequest) -> str:
        reply, self.cursor = next_scripted_reply(self.script, self.cursor)
        if not reply.strip():
            raise EmptyCompletion("scripted reply is empty")
        return reply


class HttpProvider:
    """Chat-completion HTTP client with retry on transient failures.

    Credential material never appears in exception messages or logs; errors
    carry only status codes and exception class names.
    """

    def __init__(
        self,
        config: ProviderConfig,
        *,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self._config = config
        self._sleep = sleep
        self._client = httpx.Client(transport=transport) if transport else httpx.Client()

    def generate(self, request: GenerationRequest) -> str:
        url = self._config.base_url.rstrip("/") + "/chat/completions"
        messages = [{"role": "system", "content": request.system_text}]
        for author, text in request.history:
            role = "assistant" if author == "assistant" else "user"
            messages.append({"role": role, "content": text})
        if request.directive_text:
            messages.append({"role": "system", "content": request.directive_text})
        body = {
            "model": self._config.model_name,
            "messages": messages,
            "temperature": request.params.temperature,
            "max_tokens": request.params.max_output_tokens,
        }
        headers = {}
        if self._config.api_key:
            headers["Authorization"] = f"Bearer {self._config.api_key}"

        policy = self._config.retry
        deadline = time.monotonic() + request.params.timeout_s * policy.max_attempts
        last_error = "no attempt made"
        for attempt in range(policy.max_attempts):
            try:
                response = self._client.post(
                    url, json=body, headers=headers, timeout=request.params.timeout_s
                )
            except httpx.HTTPError as exc:
                last_error = type(exc).__name__
            else:
                if response.status_code < 400:
                    return _extract_content(response)
                if response.status_code < 500:
                    raise ProviderRejected(f"provider returned {response.status_code}")
                last_error = f"status {response.status_code}"
            if attempt + 1 < policy.max_attempts:
                pause = policy.backoff_s * (2**attempt)
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    break
                self._sleep(min(pause, remaining))
        raise ProviderUnavailable(f"all retries exhausted ({last_error})")


def _extract_content(response: httpx.Response) -> str:
    try:
        content = response.json()["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError, json.JSONDecodeError) as exc:
        raise EmptyCompletion(f"malformed completion body: {type(exc).__name__}") from exc
    if not isinstance(content, str) or not content.strip():
        raise EmptyCompletion("completion content is empty")
    return content


def generate_reply(request: GenerationRequest, config: ProviderConfig) -> str:
    """One-shot convenience wrapper around :class:`HttpProvider`."""
    return HttpProvider(config).generate(request)


def provider_from_env(env: dict[str, str] | None = None) -> ReplySource:
    """Build the configured provider from PULSECHAT_LLM_* variables."""
    env = dict(os.environ) if env is None else env
    kind = env.get("PULSECHAT_LLM_PROVIDER", "http").lower()
    if kind == "scripted":
        script_file = env.get("PULSECHAT_SCRIPT_FILE")
        if not script_file:
            raise ValueError("PULSECHAT_LLM_PROVIDER=scripted requires PULSECHAT_SCRIPT_FILE")
        return ScriptedProvider.from_file(script_file)
    if kind != "http":
        raise ValueError(f"unknown provider kind {kind!r}")
    base_url = env.get("PULSECHAT_LLM_BASE_URL")
    model = env.get("PULSECHAT_LLM_MODEL")
    if not base_url or not model:
        raise ValueError(
            "http provider requires PULSECHAT_LLM_BASE_URL and PULSECHAT_LLM_MODEL"
        )
    return HttpProvider(
        ProviderConfig(
            base_url=base_url,
            model_name=model,
            api_key=env.get("PULSECHAT_LLM_API_KEY", ""),
        )
    )


def default_timeout_s(env: dict[str, str] | None = None) -> float:
    env = dict(os.environ) if env is None else env
    return int(env.get("PULSECHAT_LLM_TIMEOUT_MS", DEFAULT_TIMEOUT_MS)) / 1000
