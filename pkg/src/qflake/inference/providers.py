"""Pluggable chat-completion providers.

Provider adapters normalize vendor payloads to one contract: ordered messages
in, a single text completion out. Transport-level failures are retried with
backoff; model-content failures are never re-sampled, so each conversation
stage performs exactly one forward pass.
"""

from __future__ import annotations

import logging
import os
import threading
import time
from dataclasses import dataclass, field

import requests

from qflake.errors import ConfigError, ProviderUnavailableError
from qflake.promptkit.conversation import CODE_SECTION_HEADER, USER, Conversation
from qflake.taxonomy import FLAKY_TOKEN, NON_FLAKY_TOKEN, RootCauseClass

logger = logging.getLogger(__name__)

MOCK_PROVIDER_NAME = "mock"

# Scripted markers the deterministic mock provider reacts to. The bundled
# fixtures plant these tokens in report texts.
MOCK_FLAKY_MARKER = "intermittently"
MOCK_CORRUPT_BINARY_MARKER = "(attached: corrupted CI log)"
MOCK_CORRUPT_CAUSE_MARKER = "(attached: truncated stack trace)"
_ROOT_CAUSE_QUESTION_MARKER = "Answer with exactly one of the following categories"

# First matching keyword wins; the fallback class is Others.
MOCK_CAUSE_KEYWORDS: tuple[tuple[str, RootCauseClass], ...] = (
    ("seed", RootCauseClass.RANDOMNESS),
    ("tolerance", RootCauseClass.FLOATING_POINT),
    ("dependency pin", RootCauseClass.SOFTWARE_ENV),
    ("parallel", RootCauseClass.MULTI_THREADING),
    ("reference image", RootCauseClass.VISUALIZATION),
    ("unhandled", RootCauseClass.UNHANDLED_EXCEPTIONS),
    ("socket", RootCauseClass.NETWORK),
    ("insertion order", RootCauseClass.UNORDERED_COLLECTION),
)


@dataclass(frozen=True)
class DecodingConfig:
    temperature: float = 0.0
    max_output_tokens: int = 64

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class ProviderConfig:
    name: str
    model_id: str
    endpoint: str = ""
    decoding: DecodingConfig = field(default_factory=DecodingConfig)
    auth_env: str = ""
    rate_limit_per_minute: int = 60
    max_parallel: int = 2
    max_retries: int = 3
    timeout_s: float = 120.0

    def __post_init__(self) -> None:
        if not self.model_id:
            raise ValueError("model_id must be non-empty")


class TokenBucket:
    """Simple thread-safe token bucket: ``rate_per_minute`` requests/minute."""

    def __init__(self, rate_per_minute: int) -> None:
        self.rate = max(1, rate_per_minute)
        self._tokens = float(self.rate)
        self._last = time.monotonic()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = time.monotonic()
                self._tokens = min(self.rate, self._tokens + (now - self._last) * self.rate / 60.0)
                self._last = now
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                wait = (1.0 - self._tokens) * 60.0 / self.rate
            time.sleep(min(wait, 1.0))


class HttpChatProvider:
    """OpenAI-style ``POST <endpoint>/chat/completions`` adapter."""

    def __init__(self, config: ProviderConfig, session: requests.Session | None = None) -> None:
        if not config.endpoint:
            raise ConfigError(f"provider {config.name!r} has no endpoint configured")
        self.config = config
        self._session = session or requests.Session()
        self._bucket = TokenBucket(config.rate_limit_per_minute)

    @property
    def name(self) -> str:
        return self.config.name

    @property
    def model_id(self) -> str:
        return self.config.model_id

    def complete(self, conversation: Conversation) -> str:
        headers = {"Content-Type": "application/json"}
        if self.config.auth_env:
            token = os.environ.get(self.config.auth_env)
            if not token:
                raise ConfigError(
                    f"environment variable {self.config.auth_env} is not set for "
                    f"provider {self.config.name!r}"
                )
            headers["Authorization"] = f"Bearer {token}"
        payload = {
            "model": self.config.model_id,
            "messages": [{"role": t.role, "content": t.content} for t in conversation.turns],
            "temperature": self.config.decoding.temperature,
            "max_tokens": self.config.decoding.max_output_tokens,
        }
        last_exc: Exception | None = None
        for attempt in range(self.config.max_retries):
            self._bucket.acquire()
            try:
                resp = self._session.post(
                    f"{self.config.endpoint.rstrip('/')}/chat/completions",
                    json=payload,
                    headers=headers,
                    timeout=self.config.timeout_s,
                )
            except requests.RequestException as exc:
                last_exc = exc
                time.sleep(min(5.0, 0.5 * 2**attempt))
                continue
            if resp.status_code == 200:
                body = resp.json()
                return str(body["choices"][0]["message"]["content"])
            if resp.status_code in (500, 502, 503, 504, 429):
                last_exc = ProviderUnavailableError(f"status {resp.status_code}")
                time.sleep(min(5.0, 0.5 * 2**attempt))
                continue
            raise ProviderUnavailableError(
                f"provider {self.config.name!r} returned {resp.status_code}: {resp.text[:200]}"
            )
        raise ProviderUnavailableError(
            f"provider {self.config.name!r} unreachable after "
            f"{self.config.max_retries} attempts: {last_exc}"
        )


class MockChatProvider:
    """Scripted deterministic provider for offline runs and tests.

    Classification rule: predict FLAKY iff the query report contains the
    flaky marker token. Root-cause rule: first cause keyword found in the
    query report wins, falling back to Others. Corruption markers make it
    return an empty or ambiguous response, exercising unusable accounting.
    """

    name = MOCK_PROVIDER_NAME
    model_id = "mock-scripted-v1"

    def __init__(
        self,
        flaky_marker: str = MOCK_FLAKY_MARKER,
        cause_keywords: tuple[tuple[str, RootCauseClass], ...] = MOCK_CAUSE_KEYWORDS,
    ) -> None:
        self.flaky_marker = flaky_marker
        self.cause_keywords = cause_keywords

    def complete(self, conversation: Conversation) -> str:
        user_turns = [t.content for t in conversation.turns if t.role == USER]
        if not user_turns:
            return ""
        is_root_cause_stage = _ROOT_CAUSE_QUESTION_MARKER in user_turns[-1]
        if is_root_cause_stage and len(user_turns) < 2:
            return ""
        query_turn = user_turns[-2] if is_root_cause_stage else user_turns[-1]
        report = query_turn.split(CODE_SECTION_HEADER, 1)[0]

        if is_root_cause_stage:
            if MOCK_CORRUPT_CAUSE_MARKER in report:
                return (
                    f"It could be {RootCauseClass.RANDOMNESS.value} or perhaps "
                    f"{RootCauseClass.NETWORK.value}, hard to say."
                )
            for keyword, cause in self.cause_keywords:
                if keyword in report:
                    return cause.value
            return RootCauseClass.OTHERS.value

        if MOCK_CORRUPT_BINARY_MARKER in report:
            return ""
        return FLAKY_TOKEN if self.flaky_marker in report else NON_FLAKY_TOKEN


def build_provider(config: ProviderConfig):
    if config.name == MOCK_PROVIDER_NAME or config.model_id.startswith("mock"):
        return MockChatProvider()
    return HttpChatProvider(config)
