"""Chat-completion gateways: HTTP backend, scripted mock, record/replay.

Every gateway exposes one method, complete(ChatRequest) -> ChatResponse, so
the generation loop cannot tell live traffic from a mock or a replayed
recording. Requests carry model/messages/temperature/top_p; the HTTP backend
posts them as a chat-completion JSON body to a configurable endpoint with a
bearer token read from the environment. Credentials are never logged and
never written into recordings.
"""

from __future__ import annotations

import json
import logging
import os
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import requests

log = logging.getLogger(__name__)

DEFAULT_TEMPERATURE = 0.8
DEFAULT_TOP_P = 1.0
DEFAULT_KEY_ENV = "OPENAI_API_KEY"


class GatewayError(RuntimeError):
    """Transport or provider failure after exhausting the retry policy."""


class ConfigError(ValueError):
    """Gateway misconfiguration (missing credential, bad policy, bad file)."""


class ScriptExhausted(GatewayError):
    """Scripted mock ran out of responses."""


class ReplayMiss(GatewayError):
    """Replayed session does not contain the issued request."""


@dataclass(frozen=True)
class ChatRequest:
    messages: tuple
    model: str = "gpt-4-turbo"
    temperature: float = DEFAULT_TEMPERATURE
    top_p: float = DEFAULT_TOP_P

    @classmethod
    def user(cls, text: str, **kw) -> "ChatRequest":
        return cls(messages=({"role": "user", "content": text},), **kw)

    def body(self) -> dict:
        return {
            "model": self.model,
            "messages": list(self.messages),
            "temperature": self.temperature,
            "top_p": self.top_p,
        }

    def key(self) -> str:
        return json.dumps(self.body(), sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class ChatResponse:
    content: str
    prompt_tokens: int = 0
    completion_tokens: int = 0
    latency_s: float = 0.0


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 5
    backoff_s: float = 1.0
    max_backoff_s: float = 30.0

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ConfigError("retry policy needs at least one attempt")

    def delay(self, attempt: int, rng: random.Random, retry_after: float | None) -> float:
        if retry_after is not None:
            return min(retry_after, self.max_backoff_s)
        base = min(self.backoff_s * 2 ** (attempt - 1), self.max_backoff_s)
        return base * (0.5 + rng.random())


class HttpGateway:
    """POSTs chat-completion bodies; retries rate limits and server errors."""

    def __init__(
        self,
        endpoint_url: str,
        api_key_env: str = DEFAULT_KEY_ENV,
        policy: RetryPolicy | None = None,
        timeout_s: float = 120.0,
        session: requests.Session | None = None,
        sleeper=time.sleep,
        rng: random.Random | None = None,
    ):
        self.endpoint_url = endpoint_url
        self.api_key_env = api_key_env
        self.policy = policy or RetryPolicy()
        self.timeout_s = timeout_s
        self.session = session or requests.Session()
        self.sleeper = sleeper
        self.rng = rng or random.Random()

    def complete(self, req: ChatRequest) -> ChatResponse:
        key = os.environ.get(self.api_key_env)
        if not key:
            raise ConfigError(
                f"no API credential: set the {self.api_key_env} environment variable"
            )
        headers = {"Authorization": f"Bearer {key}"}
        last_error = "no attempt made"
        for attempt in range(1, self.policy.max_attempts + 1):
            started = time.monotonic()
            try:
                resp = self.session.post(
                    self.endpoint_url,
                    json=req.body(),
                    headers=headers,
                    timeout=self.timeout_s,
                )
            except requests.RequestException as exc:
                last_error = f"transport error: {exc.__class__.__name__}"
                log.warning("chat request failed (attempt %d): %s", attempt, last_error)
                self._wait(attempt, None)
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last_error = f"HTTP {resp.status_code}"
                retry_after = _parse_retry_after(resp.headers.get("Retry-After"))
                log.warning("chat request got %s (attempt %d)", last_error, attempt)
                self._wait(attempt, retry_after)
                continue
            if resp.status_code >= 400:
                raise GatewayError(f"chat endpoint rejected the request: HTTP {resp.status_code}")
            return _parse_completion(resp.json(), time.monotonic() - started)
        raise GatewayError(
            f"giving up after {self.policy.max_attempts} attempts; last: {last_error}"
        )

    def _wait(self, attempt: int, retry_after: float | None) -> None:
        if attempt < self.policy.max_attempts:
            self.sleeper(self.policy.delay(attempt, self.rng, retry_after))


def _parse_retry_after(value: str | None) -> float | None:
    if value is None:
        return None
    try:
        return max(float(value), 0.0)
    except ValueError:
        return None


def _parse_completion(data: dict, latency: float) -> ChatResponse:
    try:
        content = data["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError):
        raise GatewayError(f"malformed completion body: keys {sorted(data)[:8]}")
    if not content:
        raise GatewayError("completion arrived with empty content")
    usage = data.get("usage") or {}
    return ChatResponse(
        content=content,
        prompt_tokens=int(usage.get("prompt_tokens", 0)),
        completion_tokens=int(usage.get("completion_tokens", 0)),
        latency_s=latency,
    )


@dataclass
class MockGateway:
    """Deterministic scripted gateway; remembers every request it saw."""

    responses: Sequence[str]
    requests_seen: list = field(default_factory=list)

    def complete(self, req: ChatRequest) -> ChatResponse:
        self.requests_seen.append(req)
        i = len(self.requests_seen) - 1
        if i >= len(self.responses):
            raise ScriptExhausted(
                f"mock script has {len(self.responses)} responses, call {i + 1} requested"
            )
        text = self.responses[i]
        return ChatResponse(content=text, completion_tokens=len(text.split()))

    @classmethod
    def from_script_file(cls, path: str | Path) -> "MockGateway":
        """Load {"responses": [...]} JSON written by hand or by tooling."""
        try:
            data = json.loads(Path(path).read_text())
            responses = data["responses"]
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"unusable mock script {path}: {exc}")
        if not isinstance(responses, list) or not all(isinstance(r, str) for r in responses):
            raise ConfigError(f"mock script {path} must hold a list of strings")
        return cls(responses)


class RecordingGateway:
    """Wraps another gateway and appends request/response pairs as JSONL."""

    def __init__(self, inner, path: str | Path):
        self.inner = inner
        self.path = Path(path)

    def complete(self, req: ChatRequest) -> ChatResponse:
        resp = self.inner.complete(req)
        entry = {
            "request": req.body(),
            "response": {
                "content": resp.content,
                "prompt_tokens": resp.prompt_tokens,
                "completion_tokens": resp.completion_tokens,
            },
        }
        with open(self.path, "a") as fh:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")
        return resp


class ReplayGateway:
    """Serves responses from a recording, matching requests byte-for-byte.

    Identical requests replay in recorded order; an unknown request raises
    ReplayMiss rather than guessing.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._queues: dict[str, list[dict]] = {}
        try:
            lines = self.path.read_text().splitlines()
        except OSError as exc:
            raise ConfigError(f"cannot read recording {path}: {exc}")
        for line in lines:
            if not line.strip():
                continue
            entry = json.loads(line)
            key = json.dumps(entry["request"], sort_keys=True, separators=(",", ":"))
            self._queues.setdefault(key, []).append(entry["response"])

    def complete(self, req: ChatRequest) -> ChatResponse:
        queue = self._queues.get(req.key())
        if not queue:
            raise ReplayMiss("request not present in the recording (prompt drifted?)")
        stored = queue.pop(0)
        return ChatResponse(
            content=stored["content"],
            prompt_tokens=stored.get("prompt_tokens", 0),
            completion_tokens=stored.get("completion_tokens", 0),
        )


def record_replay(session_path: str | Path, inner=None):
    """Recording wrapper when an inner gateway is given, replay otherwise."""
    if inner is not None:
        return RecordingGateway(inner, session_path)
    return ReplayGateway(session_path)
