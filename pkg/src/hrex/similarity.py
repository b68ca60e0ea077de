"""Pairwise text similarity backends for soft matching.

Every backend maps two strings to [0, 1], is symmetric, and gives 1 for two
identical non-empty strings.
"""

from __future__ import annotations

import math
import threading
from collections import Counter
from typing import Callable

import numpy as np

from .errors import AuthMissing, BackendError, BackendTimeout, RateLimited

SIM_BACKENDS = ("exact", "token_f1", "trigram", "http")


def exact(a: str, b: str) -> float:
    return 1.0 if a == b else 0.0


def token_f1(a: str, b: str) -> float:
    """F1 of the whitespace-token multisets."""
    ta, tb = a.split(), b.split()
    if not ta or not tb:
        return 1.0 if ta == tb else 0.0
    common = sum((Counter(ta) & Counter(tb)).values())
    if common == 0:
        return 0.0
    return 2.0 * common / (len(ta) + len(tb))


def char_trigrams(text: str) -> Counter:
    if not text:
        return Counter()
    padded = f"##{text}##"
    return Counter(padded[i : i + 3] for i in range(len(padded) - 2))


def trigram_cosine(a: str, b: str) -> float:
    va, vb = char_trigrams(a), char_trigrams(b)
    if not va or not vb:
        return 0.0
    dot = sum(n * vb[g] for g, n in va.items() if g in vb)
    norm = math.sqrt(sum(n * n for n in va.values()) * sum(n * n for n in vb.values()))
    return min(1.0, dot / norm)


class HttpEmbeddingSimilarity:
    """BERTScore-style F1 over token embeddings served by an embeddings endpoint.

    Texts are split on whitespace; each distinct token is embedded once via an
    OpenAI-compatible ``/embeddings`` call. Precision is the mean over tokens of
    ``a`` of their best cosine match in ``b``, recall the reverse, and the score
    is their harmonic mean clipped to [0, 1].
    """

    name = "http"

    def __init__(self, api_base: str, api_key: str, model: str, client=None, timeout: float = 30.0,
                 max_in_flight: int = 4):
        import httpx

        if not api_key:
            raise AuthMissing("HREX_API_KEY is not set")
        self.model = model
        self._url = api_base.rstrip("/") + "/embeddings"
        self._headers = {"Authorization": f"Bearer {api_key}"}
        self._client = client or httpx.Client(timeout=timeout)
        self._cache: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()
        self._slots = threading.BoundedSemaphore(max_in_flight)

    def _embed(self, tokens: list[str]) -> None:
        import httpx

        missing = sorted({t for t in tokens if t not in self._cache})
        if not missing:
            return
        try:
            with self._slots:
                resp = self._client.post(self._url, headers=self._headers,
                                         json={"model": self.model, "input": missing})
        except httpx.TimeoutException as exc:
            raise BackendTimeout(str(exc)) from exc
        if resp.status_code == 429:
            raise RateLimited(_retry_after(resp))
        if resp.status_code in (401, 403):
            raise AuthMissing(f"embedding endpoint rejected credentials ({resp.status_code})")
        if resp.status_code >= 400:
            raise BackendError(f"embedding endpoint returned {resp.status_code}", resp.status_code)
        data = sorted(resp.json()["data"], key=lambda d: d["index"])
        with self._lock:
            for token, item in zip(missing, data):
                vec = np.asarray(item["embedding"], dtype=np.float64)
                norm = np.linalg.norm(vec)
                self._cache[token] = vec / norm if norm > 0 else vec

    def _matrix(self, tokens: list[str]) -> np.ndarray:
        return np.vstack([self._cache[t] for t in tokens])

    def __call__(self, a: str, b: str) -> float:
        ta, tb = a.split(), b.split()
        if not ta or not tb:
            return 1.0 if ta == tb else 0.0
        if ta == tb:
            return 1.0
        if a > b:  # fixed operand order keeps floating-point results symmetric
            ta, tb = tb, ta
        self._embed(ta + tb)
        cos = self._matrix(ta) @ self._matrix(tb).T
        p = float(cos.max(axis=1).mean())
        r = float(cos.max(axis=0).mean())
        if p + r <= 0:
            return 0.0
        return min(1.0, max(0.0, 2 * p * r / (p + r)))


def _retry_after(resp) -> float | None:
    value = resp.headers.get("retry-after")
    try:
        return float(value) if value is not None else None
    except ValueError:
        return None


def get_backend(name: str, **kwargs) -> Callable[[str, str], float]:
    if name == "exact":
        return exact
    if name == "token_f1":
        return token_f1
    if name in ("trigram", "trigram_cosine"):
        return trigram_cosine
    if name in ("http", "http_embedding"):
        return HttpEmbeddingSimilarity(**kwargs)
    raise ValueError(f"unknown similarity backend {name!r}; choose from {', '.join(SIM_BACKENDS)}")
