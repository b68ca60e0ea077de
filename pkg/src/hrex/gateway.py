"""Chat-completion gateway with http, replay and mock backends.

Responses are cached one JSON file per cache key. The cache file layout is
the same as a replay fixture, so a cache directory recorded against a live
endpoint can be replayed offline as-is.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from filelock import FileLock

from .errors import AuthMissing, BackendError, BackendTimeout, GatewayError, RateLimited, ReplayMiss
from .prompts import RenderedPrompt

log = logging.getLogger(__name__)

ENV_API_KEY = "HREX_API_KEY"
ENV_API_BASE = "HREX_API_BASE"
DEFAULT_API_BASE = "https://api.openai.com/v1"
DEFAULT_MODEL = "gpt-3.5-turbo"


@dataclass(frozen=True)
class CompletionParams:
    model: str = DEFAULT_MODEL
    temperature: float = 0.0
    max_tokens: int = 1024
    timeout: float = 60.0

    def __post_init__(self):
        if not self.model:
            raise ValueError("model id is empty")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature {self.temperature} outside [0, 2]")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


@dataclass(frozen=True)
class CompletionResult:
    raw_text: str
    backend: str
    cached: bool
    latency: float
    cache_key: str


def cache_key(model: str, temperature: float, prompt_hash: str, run_index: int) -> str:
    payload = json.dumps(
        {"model": model, "temperature": repr(float(temperature)), "prompt_hash": prompt_hash, "run_index": run_index},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def default_max_tokens(serialized_lengths: list[int], floor: int = 256) -> int:
    """Room for four times the longest gold serialization, at roughly four characters per token."""
    longest = max(serialized_lengths, default=0)
    return max(floor, 4 * -(-longest // 4))


# --- backends -----------------------------------------------------------------


class MockBackend:
    """Returns a constant (or computed) text. Counts calls and peak concurrency."""

    name = "mock"

    def __init__(self, text: str | Callable[[RenderedPrompt, int], str] = "", delay: float = 0.0):
        self._text = text
        self.delay = delay
        self.calls = 0
        self.in_flight = 0
        self.max_in_flight = 0
        self._lock = threading.Lock()

    def invoke(self, prompt: RenderedPrompt, params: CompletionParams, run_index: int, key: str) -> str:
        with self._lock:
            self.calls += 1
            self.in_flight += 1
            self.max_in_flight = max(self.max_in_flight, self.in_flight)
        try:
            if self.delay:
                time.sleep(self.delay)
            return self._text(prompt, run_index) if callable(self._text) else self._text
        finally:
            with self._lock:
                self.in_flight -= 1


class ReplayBackend:
    """Serves ``<cache key>.json`` fixtures; a missing fixture is an error."""

    name = "replay"

    def __init__(self, fixture_dir: str | Path):
        self.fixture_dir = Path(fixture_dir)
        self.calls = 0

    def invoke(self, prompt: RenderedPrompt, params: CompletionParams, run_index: int, key: str) -> str:
        self.calls += 1
        entry = read_entry(self.fixture_dir / f"{key}.json")
        if entry is None:
            raise ReplayMiss(key)
        return entry["raw_text"]


class HttpBackend:
    """OpenAI-compatible ``/chat/completions`` over HTTPS."""

    name = "http"

    def __init__(self, api_base: str | None = None, api_key: str | None = None, client=None):
        import httpx

        self.api_key = api_key if api_key is not None else os.environ.get(ENV_API_KEY, "")
        if not self.api_key:
            raise AuthMissing(f"{ENV_API_KEY} is not set")
        base = api_base or os.environ.get(ENV_API_BASE) or DEFAULT_API_BASE
        self.url = base.rstrip("/") + "/chat/completions"
        self._client = client or httpx.Client()
        self.calls = 0

    def invoke(self, prompt: RenderedPrompt, params: CompletionParams, run_index: int, key: str) -> str:
        import httpx

        self.calls += 1
        body = {
            "model": params.model,
            "messages": [
                {"role": "system", "content": prompt.system_text},
                {"role": "user", "content": prompt.user_text},
            ],
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
        }
        headers = {"Authorization": f"Bearer {self.api_key}", "api-key": self.api_key}
        try:
            resp = self._client.post(self.url, json=body, headers=headers, timeout=params.timeout)
        except httpx.TimeoutException as exc:
            raise BackendTimeout(f"no response within {params.timeout}s") from exc
        except httpx.HTTPError as exc:
            raise BackendError(f"transport error: {exc}") from exc
        if resp.status_code == 429:
            retry = resp.headers.get("retry-after")
            try:
                raise RateLimited(float(retry) if retry is not None else None)
            except ValueError:
                raise RateLimited(None) from None
        if resp.status_code in (401, 403):
            raise AuthMissing(f"endpoint rejected credentials ({resp.status_code})")
        if resp.status_code >= 400:
            raise BackendError(f"endpoint returned {resp.status_code}: {resp.text[:200]}", resp.status_code)
        try:
            content = resp.json()["choices"][0]["message"].get("content")
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"unexpected response shape: {exc}") from exc
        return content or ""


# --- cache files --------------------------------------------------------------


def read_entry(path: Path) -> dict | None:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        return None
    except (OSError, ValueError) as exc:
        raise BackendError(f"corrupt cache/fixture file {path}: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("raw_text"), str):
        raise BackendError(f"cache/fixture file {path} lacks a raw_text string")
    return data


def write_entry(path: Path, entry: dict) -> None:
    """Atomic write: temp file in the same directory, then rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(entry, fh, ensure_ascii=False, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- gateway ------------------------------------------------------------------


class Gateway:
    """Cache-first completion access with bounded concurrency and rate-limit retries.

    ``max_in_flight`` caps simultaneous backend calls. Calls for the same key
    are serialized (a file lock when a cache directory is set), so a key is
    sent to the backend at most once.
    """

    def __init__(
        self,
        backend,
        cache_dir: str | Path | None = None,
        max_in_flight: int = 4,
        max_attempts: int = 5,
        backoff: float = 1.0,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if max_in_flight < 1 or max_attempts < 1:
            raise ValueError("max_in_flight and max_attempts must be >= 1")
        self.backend = backend
        self.cache_dir = Path(cache_dir) if cache_dir is not None else None
        self.max_attempts = max_attempts
        self.backoff = backoff
        self._sleep = sleep
        self._slots = threading.BoundedSemaphore(max_in_flight)
        self._memory: dict[str, str] = {}
        self._key_locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()
        self.backend_calls = 0
        self.cache_hits = 0

    def _key_lock(self, key: str) -> threading.Lock:
        with self._guard:
            return self._key_locks.setdefault(key, threading.Lock())

    def _lookup(self, key: str) -> str | None:
        if key in self._memory:
            return self._memory[key]
        if self.cache_dir is not None:
            entry = read_entry(self.cache_dir / f"{key}.json")
            if entry is not None:
                return entry["raw_text"]
        return None

    def _store(self, key: str, text: str, prompt: RenderedPrompt, params: CompletionParams, run_index: int) -> None:
        self._memory[key] = text
        if self.cache_dir is not None:
            write_entry(
                self.cache_dir / f"{key}.json",
                {
                    "raw_text": text,
                    "model": params.model,
                    "temperature": params.temperature,
                    "prompt_hash": prompt.prompt_hash,
                    "run_index": run_index,
                    "backend": self.backend.name,
                    "recorded_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                },
            )

    def _invoke(self, prompt: RenderedPrompt, params: CompletionParams, run_index: int, key: str) -> str:
        attempt = 0
        while True:
            attempt += 1
            try:
                with self._slots:
                    with self._guard:
                        self.backend_calls += 1
                    return self.backend.invoke(prompt, params, run_index, key)
            except RateLimited as exc:
                if attempt >= self.max_attempts:
                    raise
                wait = exc.retry_after if exc.retry_after is not None else self.backoff * 2 ** (attempt - 1)
                log.info("rate limited on %s, attempt %d, waiting %.1fs", key[:12], attempt, wait)
                self._sleep(wait)

    def complete(self, prompt: RenderedPrompt, params: CompletionParams, run_index: int = 0) -> CompletionResult:
        key = cache_key(params.model, params.temperature, prompt.prompt_hash, run_index)
        start = time.perf_counter()
        with self._key_lock(key):
            lock = FileLock(str(self.cache_dir / f".{key}.lock")) if self.cache_dir is not None else None
            if lock is not None:
                self.cache_dir.mkdir(parents=True, exist_ok=True)
                lock.acquire()
            try:
                text = self._lookup(key)
                if text is not None:
                    with self._guard:
                        self.cache_hits += 1
                    return CompletionResult(text, self.backend.name, True, time.perf_counter() - start, key)
                text = self._invoke(prompt, params, run_index, key)
                self._store(key, text, prompt, params, run_index)
            finally:
                if lock is not None:
                    lock.release()
        return CompletionResult(text, self.backend.name, False, time.perf_counter() - start, key)

    def complete_runs(self, prompt: RenderedPrompt, params: CompletionParams, n_runs: int) -> list[CompletionResult]:
        if n_runs < 1:
            raise ValueError("n_runs must be >= 1")
        results = []
        for run_index in range(n_runs):
            try:
                results.append(self.complete(prompt, params, run_index))
            except GatewayError as exc:
                exc.run_index = run_index
                raise
        return results
