"""Chat-completion client with retries, rate limiting and an offline fixture mode.

Wire format::

    POST {base_url}/chat/completions
    {"model": ..., "messages": [{"role": "user", "content": prompt}], "temperature": t}
    -> {"choices": [{"message": {"content": "..."}}]}

With ``AUTOHD_FIXTURES=<dir>`` no connection is ever opened: the response to
a prompt is read from ``<dir>/<sha256(prompt)>.txt``. When the same prompt is
sent again within one gateway, the n-th repeat first looks for
``<hash>-<n>.txt`` and falls back to ``<hash>.txt``.
"""

from __future__ import annotations

import dataclasses
import hashlib
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import httpx

ENV_API_KEY = "AUTOHD_API_KEY"
ENV_BASE_URL = "AUTOHD_BASE_URL"
ENV_FIXTURES = "AUTOHD_FIXTURES"
DEFAULT_BASE_URL = "http://localhost:8000/v1"


class GatewayError(RuntimeError):
    pass


class TransportError(GatewayError):
    """Network failure, timeout, 429/5xx after the last retry, or a malformed reply."""


class PermanentError(GatewayError):
    """A request the service rejected for good (4xx other than 429)."""


class FixtureMissing(PermanentError):
    pass


@dataclass(frozen=True)
class ModelEndpoint:
    base_url: str = DEFAULT_BASE_URL
    model_name: str = "default"
    api_key: Optional[str] = field(default=None, repr=False, compare=False)
    temperature: float = 0.7
    max_retries: int = 4
    rate_limit: float = 0.0  # requests per minute, 0 = unlimited
    timeout: float = 60.0  # seconds
    backoff: float = 0.5  # first retry delay in seconds, doubled each attempt

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")

    @classmethod
    def from_env(cls, **overrides) -> "ModelEndpoint":
        base = os.environ.get(ENV_BASE_URL) or DEFAULT_BASE_URL
        values = {"base_url": base, "api_key": os.environ.get(ENV_API_KEY)}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def with_temperature(self, t: float) -> "ModelEndpoint":
        return dataclasses.replace(self, temperature=t)

    def to_dict(self) -> dict:
        # the key never leaves the process
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self) if f.name != "api_key"}


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class RateLimiter:
    """Spaces requests at least ``60 / per_minute`` seconds apart across threads."""

    def __init__(self, per_minute: float, clock=time.monotonic, sleep=time.sleep):
        self.interval = 60.0 / per_minute if per_minute and per_minute > 0 else 0.0
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._next = 0.0

    def acquire(self) -> float:
        """Block until a slot is free; returns the time waited."""
        if not self.interval:
            return 0.0
        with self._lock:
            now = self._clock()
            slot = max(now, self._next)
            self._next = slot + self.interval
        wait = slot - now
        if wait > 0:
            self._sleep(wait)
        return wait


@dataclass
class GatewayStats:
    calls: int = 0
    network_calls: int = 0
    retries: int = 0
    fixture_hits: int = 0


class Gateway:
    """Shared client state: connection pool, rate limiter, counters and fixtures."""

    def __init__(self, endpoint: ModelEndpoint | None = None, fixtures=None, transport=None,
                 sleep: Callable[[float], None] = time.sleep, record_to=None):
        self.endpoint = endpoint or ModelEndpoint.from_env()
        if fixtures is None:
            fixtures = os.environ.get(ENV_FIXTURES) or None
        self.fixtures = Path(fixtures) if fixtures else None
        self.record_to = Path(record_to) if record_to else None
        self.stats = GatewayStats()
        self._transport = transport
        self._sleep = sleep
        self._http: httpx.Client | None = None
        self._limiters: dict = {}
        self._seen: dict = {}
        self._lock = threading.Lock()

    @property
    def offline(self) -> bool:
        return self.fixtures is not None

    def close(self) -> None:
        if self._http is not None:
            self._http.close()
            self._http = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _limiter(self, ep: ModelEndpoint) -> RateLimiter:
        with self._lock:
            key = (ep.base_url, ep.model_name, ep.rate_limit)
            if key not in self._limiters:
                self._limiters[key] = RateLimiter(ep.rate_limit, sleep=self._sleep)
            return self._limiters[key]

    def _repeat_index(self, digest: str) -> int:
        with self._lock:
            n = self._seen.get(digest, 0)
            self._seen[digest] = n + 1
            return n

    def complete(self, prompt: str, endpoint: ModelEndpoint | None = None) -> str:
        ep = endpoint or self.endpoint
        self.stats.calls += 1
        digest = prompt_hash(prompt)
        n = self._repeat_index(digest)
        if self.fixtures is not None:
            return self._from_fixture(digest, n)
        text = self._post(prompt, ep)
        if self.record_to is not None:
            self._record(prompt, digest, n, text)
        return text

    def _from_fixture(self, digest: str, n: int) -> str:
        names = ([f"{digest}-{n}.txt"] if n else []) + [f"{digest}.txt"]
        for name in names:
            path = self.fixtures / name
            if path.is_file():
                self.stats.fixture_hits += 1
                return path.read_text(encoding="utf-8")
        raise FixtureMissing(f"no fixture for prompt {digest} in {self.fixtures}")

    def _record(self, prompt: str, digest: str, n: int, text: str) -> None:
        self.record_to.mkdir(parents=True, exist_ok=True)
        stem = digest if n == 0 else f"{digest}-{n}"
        (self.record_to / f"{stem}.txt").write_text(text, encoding="utf-8")
        (self.record_to / f"{digest}.prompt").write_text(prompt, encoding="utf-8")

    def _client(self, ep: ModelEndpoint) -> httpx.Client:
        with self._lock:
            if self._http is None:
                self._http = httpx.Client(transport=self._transport)
            return self._http

    def _post(self, prompt: str, ep: ModelEndpoint) -> str:
        if ep.timeout <= 0:
            raise TransportError("request timed out (timeout is 0)")
        url = ep.base_url.rstrip("/") + "/chat/completions"
        body = {
            "model": ep.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": ep.temperature,
        }
        headers = {"Authorization": f"Bearer {ep.api_key}"} if ep.api_key else {}
        limiter = self._limiter(ep)
        last = ""
        for attempt in range(ep.max_retries + 1):
            if attempt:
                self.stats.retries += 1
                self._sleep(ep.backoff * 2 ** (attempt - 1))
            limiter.acquire()
            self.stats.network_calls += 1
            try:
                resp = self._client(ep).post(url, json=body, headers=headers, timeout=ep.timeout)
            except httpx.HTTPError as exc:
                last = f"{type(exc).__name__}: {exc}"
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last = f"HTTP {resp.status_code}"
                continue
            if resp.status_code >= 400:
                raise PermanentError(f"HTTP {resp.status_code} from {url}: {resp.text[:200]}")
            try:
                content = resp.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError):
                last = "malformed completion response"
                continue
            if not isinstance(content, str):
                last = "completion content is not text"
                continue
            return content
        raise TransportError(f"giving up after {ep.max_retries + 1} attempts ({last})")


def complete(endpoint: ModelEndpoint, prompt: str, gateway: Gateway | None = None) -> str:
    """One-shot completion; builds a throwaway gateway when none is given."""
    if gateway is not None:
        return gateway.complete(prompt, endpoint)
    with Gateway(endpoint) as gw:
        return gw.complete(prompt)
