"""Chat-completion providers.

Two implementations of the same ``complete(messages, params) -> str`` surface:

* :class:`OpenAIChatClient` talks to any OpenAI-compatible HTTP endpoint
  (``POST {base_url}/chat/completions``) with bounded retries and full-jitter
  exponential backoff on transient failures.
* :class:`ScriptedProvider` replays canned responses, either in order or
  keyed by a fingerprint of the request, so every engine behavior can be
  tested offline and deterministically.

Both are safe to share across threads; the live client additionally caps the
number of in-flight requests.
"""

from __future__ import annotations

import enum
import hashlib
import os
import random
import threading
import time
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol, Sequence

import requests

from .errors import EngineError, ScriptExhausted

DEFAULT_BASE_URL = "https://api.openai.com/v1"
DEFAULT_CREDENTIAL_ENV = "OPENAI_API_KEY"


@dataclass(frozen=True)
class ChatMessage:
    role: str  # "system" | "user" | "assistant"
    content: str

    def __post_init__(self):
        if self.role not in ("system", "user", "assistant"):
            raise ValueError(f"bad role {self.role!r}")
        if self.role in ("system", "user") and not self.content:
            raise ValueError(f"{self.role} message content is empty")


@dataclass(frozen=True)
class CompletionParams:
    """Decoding knobs. The defaults mirror the deployed configuration; all
    of them are explicitly overridable."""

    model: str = "gpt-4o"
    temperature: float = 0.7
    max_tokens: int = 1024
    timeout: float = 30.0

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be in [0, 2]")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")


DEFAULT_PARAMS = CompletionParams()


class ProviderErrorKind(enum.Enum):
    NETWORK = "network"
    TIMEOUT = "timeout"
    RATE_LIMITED = "rate_limited"
    SERVER_ERROR = "server_error"
    AUTH_ERROR = "auth_error"
    MALFORMED_RESPONSE = "malformed_response"


_RETRYABLE = frozenset(
    {
        ProviderErrorKind.NETWORK,
        ProviderErrorKind.TIMEOUT,
        ProviderErrorKind.RATE_LIMITED,
        ProviderErrorKind.SERVER_ERROR,
    }
)


class ProviderError(EngineError):
    def __init__(self, kind: ProviderErrorKind, detail: str = ""):
        super().__init__(f"{kind.value}: {detail}" if detail else kind.value)
        self.kind = kind
        self.detail = detail

    @property
    def retryable(self) -> bool:
        return self.kind in _RETRYABLE


class Provider(Protocol):
    def complete(
        self, messages: Sequence[ChatMessage], params: CompletionParams = ...
    ) -> str: ...


class OpenAIChatClient:
    """Live client for an OpenAI-compatible chat-completions endpoint.

    The credential is read from the environment on every call (never stored),
    so a missing key fails fast without touching the network. Retryable
    failures (network, timeout, 429, 5xx) are retried up to ``max_retries``
    times with full-jitter backoff: sleep = uniform(0, base * factor**attempt).
    """

    def __init__(
        self,
        base_url: str = DEFAULT_BASE_URL,
        credential_env: str = DEFAULT_CREDENTIAL_ENV,
        *,
        max_retries: int = 3,
        backoff_base: float = 0.5,
        backoff_factor: float = 2.0,
        max_in_flight: int = 4,
        sleep: Callable[[float], None] = time.sleep,
        rng: Callable[[], float] = random.random,
        session: requests.Session | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.credential_env = credential_env
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self.backoff_factor = backoff_factor
        self._sleep = sleep
        self._rng = rng
        self._session = session or requests.Session()
        self._in_flight = threading.BoundedSemaphore(max_in_flight)

    def complete(
        self,
        messages: Sequence[ChatMessage],
        params: CompletionParams = DEFAULT_PARAMS,
    ) -> str:
        if not messages:
            raise ValueError("at least one message is required")
        credential = os.environ.get(self.credential_env, "").strip()
        if not credential:
            raise ProviderError(
                ProviderErrorKind.AUTH_ERROR,
                f"credential env var {self.credential_env} is not set",
            )
        payload = {
            "model": params.model,
            "messages": [{"role": m.role, "content": m.content} for m in messages],
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
        }
        attempt = 0
        while True:
            try:
                with self._in_flight:
                    return self._request(payload, credential, params.timeout)
            except ProviderError as err:
                if not err.retryable or attempt >= self.max_retries:
                    raise
                self._sleep(
                    self._rng() * self.backoff_base * self.backoff_factor**attempt
                )
                attempt += 1

    def _request(self, payload: dict, credential: str, timeout: float) -> str:
        try:
            response = self._session.post(
                f"{self.base_url}/chat/completions",
                json=payload,
                headers={"Authorization": f"Bearer {credential}"},
                timeout=timeout,
            )
        except requests.Timeout as exc:
            raise ProviderError(ProviderErrorKind.TIMEOUT, str(exc)) from exc
        except requests.RequestException as exc:
            raise ProviderError(ProviderErrorKind.NETWORK, str(exc)) from exc

        if response.status_code in (401, 403):
            raise ProviderError(
                ProviderErrorKind.AUTH_ERROR, f"HTTP {response.status_code}"
            )
        if response.status_code == 429:
            raise ProviderError(ProviderErrorKind.RATE_LIMITED, "HTTP 429")
        if response.status_code >= 500:
            raise ProviderError(
                ProviderErrorKind.SERVER_ERROR, f"HTTP {response.status_code}"
            )
        if response.status_code >= 400:
            raise ProviderError(
                ProviderErrorKind.MALFORMED_RESPONSE,
                f"HTTP {response.status_code}: {response.text[:200]}",
            )
        try:
            body = response.json()
            content = body["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ProviderError(
                ProviderErrorKind.MALFORMED_RESPONSE, str(exc)
            ) from exc
        if not isinstance(content, str):
            raise ProviderError(
                ProviderErrorKind.MALFORMED_RESPONSE, "content is not text"
            )
        return content


def fingerprint(messages: Sequence[ChatMessage]) -> str:
    """Stable digest of a message list, for fingerprint-keyed scripts."""
    blob = "\x1e".join(f"{m.role}\x1f{m.content}" for m in messages)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class ScriptedProvider:
    """Deterministic provider replaying canned responses.

    Pass ``responses`` for an ordered queue or ``by_fingerprint`` to key
    responses on :func:`fingerprint` of the request. Raises
    :class:`ScriptExhausted` when the queue empties or a fingerprint has no
    entry. Every request is recorded in ``calls`` so tests can assert on the
    prompts the engine actually sent. ``delay`` adds a per-call sleep for
    latency tests.
    """

    def __init__(
        self,
        responses: Sequence[str] | None = None,
        *,
        by_fingerprint: dict[str, str] | None = None,
        delay: float = 0.0,
    ):
        if not responses and not by_fingerprint:
            raise ValueError("script is empty")
        self._queue = deque(responses or [])
        self._by_fingerprint = dict(by_fingerprint or {})
        self._delay = delay
        self._lock = threading.Lock()
        self.calls: list[list[ChatMessage]] = []

    def complete(
        self,
        messages: Sequence[ChatMessage],
        params: CompletionParams = DEFAULT_PARAMS,
    ) -> str:
        if self._delay:
            time.sleep(self._delay)
        with self._lock:
            self.calls.append(list(messages))
            if self._by_fingerprint:
                key = fingerprint(messages)
                if key not in self._by_fingerprint:
                    raise ScriptExhausted(f"no scripted response for {key[:12]}")
                return self._by_fingerprint[key]
            if not self._queue:
                raise ScriptExhausted("scripted responses used up")
            return self._queue.popleft()


SCRIPT_SEPARATOR = "---"


def load_script(path: str | Path) -> ScriptedProvider:
    """Build an ordered ScriptedProvider from a fixture file.

    The file holds responses separated by lines containing exactly ``---``.
    """
    text = Path(path).read_text(encoding="utf-8")
    responses = []
    current: list[str] = []
    for line in text.splitlines():
        if line.strip() == SCRIPT_SEPARATOR:
            responses.append("\n".join(current).strip("\n"))
            current = []
        else:
            current.append(line)
    responses.append("\n".join(current).strip("\n"))
    responses = [r for r in responses if r.strip()]
    if not responses:
        raise ValueError(f"script file {path} contains no responses")
    return ScriptedProvider(responses)
