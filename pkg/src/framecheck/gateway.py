"""Uniform access to chat-completion and embedding providers.

Four provider kinds: remote chat, remote embeddings, scripted replay of
recorded transcripts, and a deterministic offline embedding stub. Requests
are keyed by a stable digest of (model, prompt, decode parameters); the
digest drives both the response cache and transcript lookup, so cached,
replayed, and live paths are interchangeable downstream.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from hashlib import sha256
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import requests

log = logging.getLogger(__name__)

STUB_DIMENSION = 256


class GatewayError(Exception):
    pass


class GatewayConfigError(GatewayError):
    pass


class TransportError(GatewayError):
    """Remote call failed after exhausting retries; retryable at a higher level."""


class TranscriptMissError(GatewayError):
    def __init__(self, digest: str, prompt: str):
        head = prompt[:80].replace("\n", " ")
        super().__init__(f"no transcript entry for digest {digest} (prompt: {head!r}...)")
        self.digest = digest


class ProviderKind(Enum):
    REMOTE_CHAT = "remote_chat"
    REMOTE_EMBED = "remote_embed"
    SCRIPTED_REPLAY = "scripted_replay"
    DETERMINISTIC_STUB = "deterministic_stub"


@dataclass(frozen=True)
class ProviderConfig:
    kind: ProviderKind
    model_name: str
    endpoint: str | None = None
    api_key_env: str | None = None
    rate_limit: float = 0.0  # requests/second; 0 disables limiting
    timeout: float = 30.0
    transcript_path: str | None = None
    cache_dir: str | None = None
    max_retries: int = 3

    def __post_init__(self):
        if self.kind is ProviderKind.SCRIPTED_REPLAY and not self.transcript_path:
            raise GatewayConfigError("scripted replay requires a transcript file")
        if self.kind is ProviderKind.REMOTE_CHAT and not self.endpoint:
            raise GatewayConfigError("remote chat requires an endpoint")


def request_digest(model_name: str, prompt: str, params: dict | None = None) -> str:
    """Stable request digest; fixed serialization + sha256 so it survives restarts."""
    payload = json.dumps(
        {"model": model_name, "prompt": prompt, "params": params or {}},
        sort_keys=True,
        ensure_ascii=True,
        separators=(",", ":"),
    )
    return sha256(payload.encode("utf-8")).hexdigest()


@dataclass
class Transcript:
    """Recorded provider responses keyed by exact request digest."""

    entries: dict[str, str]
    metadata: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | Path) -> "Transcript":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        metadata = raw.get("metadata", {})
        entries: dict[str, str] = {}
        for entry in raw.get("entries", []):
            model = entry.get("model", metadata.get("model", ""))
            digest = request_digest(model, entry["prompt"], entry.get("params"))
            entries[digest] = entry["response"]
        return cls(entries=entries, metadata=metadata)


class VirtualClock:
    """Deterministic clock for tests; sleep advances time instantly."""

    def __init__(self, start: float = 0.0):
        self.now = start

    def monotonic(self) -> float:
        return self.now

    def sleep(self, seconds: float) -> None:
        self.now += seconds


class _WallClock:
    monotonic = staticmethod(time.monotonic)
    sleep = staticmethod(time.sleep)


class RateLimiter:
    """Sliding-window limiter: at most `rate` acquisitions per 1-second window."""

    def __init__(self, rate: float, clock=None):
        self.rate = rate
        self.clock = clock or _WallClock()
        self._stamps: deque[float] = deque()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        if self.rate <= 0:
            return
        with self._lock:
            while True:
                now = self.clock.monotonic()
                while self._stamps and now - self._stamps[0] >= 1.0:
                    self._stamps.popleft()
                if len(self._stamps) < self.rate:
                    self._stamps.append(now)
                    return
                self.clock.sleep(self._stamps[0] + 1.0 - now)


def stub_embedding(text: str, dimension: int = STUB_DIMENSION) -> np.ndarray:
    """Hashed bag-of-tokens vector, L2-normalized; all-zero for token-free text."""
    vec = np.zeros(dimension, dtype=np.float64)
    for token in _tokenize(text):
        bucket = int.from_bytes(sha256(token.encode("utf-8")).digest()[:8], "big") % dimension
        vec[bucket] += 1.0
    norm = float(np.linalg.norm(vec))
    if norm > 0.0:
        vec /= norm
    return vec


def _tokenize(text: str) -> list[str]:
    out = []
    word = []
    for ch in text.lower():
        if ch.isalnum():
            word.append(ch)
        elif word:
            out.append("".join(word))
            word = []
    if word:
        out.append("".join(word))
    return out


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


class Gateway:
    """One provider behind a digest-keyed cache, a rate limiter, and optional recording.

    `transport` only applies to remote kinds and is injectable for tests:
    a callable (config, prompt, params) -> str for chat, or
    (config, texts) -> list of vectors for embeddings.
    """

    def __init__(
        self,
        config: ProviderConfig,
        transport: Callable | None = None,
        clock=None,
        record_to: str | Path | None = None,
    ):
        self.config = config
        self.clock = clock or _WallClock()
        self.limiter = RateLimiter(config.rate_limit, clock=self.clock)
        self._transport = transport
        self._memory_cache: dict[str, str] = {}
        self._cache_lock = threading.Lock()
        self._record_to = Path(record_to) if record_to else None
        self._recorded: list[dict] = []
        self._transcript: Transcript | None = None
        if config.kind is ProviderKind.SCRIPTED_REPLAY:
            self._transcript = Transcript.load(config.transcript_path)

    # --- chat ---------------------------------------------------------------

    def digest_for(self, prompt: str, temperature: float = 0.0, **extra) -> str:
        """The digest complete() would use for this request; for provenance logs."""
        return request_digest(self.config.model_name, prompt, {"temperature": temperature, **extra})

    def complete(self, prompt: str, temperature: float = 0.0, **extra) -> str:
        """Return the completion for `prompt`; cache hits short-circuit the network."""
        params = {"temperature": temperature, **extra}
        digest = request_digest(self.config.model_name, prompt, params)

        if self.config.kind is ProviderKind.SCRIPTED_REPLAY:
            try:
                return self._transcript.entries[digest]
            except KeyError:
                raise TranscriptMissError(digest, prompt) from None
        if self.config.kind is not ProviderKind.REMOTE_CHAT:
            raise GatewayConfigError(
                f"provider kind {self.config.kind.value} cannot serve chat completions"
            )

        cached = self._cache_get(digest)
        if cached is not None:
            return cached
        self.limiter.acquire()
        response = self._with_retries(lambda: self._chat_transport()(self.config, prompt, params))
        self._cache_put(digest, response)
        self._record(prompt, params, response)
        return response

    # --- embeddings ---------------------------------------------------------

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        """Order-preserving embeddings; per-text caching by digest."""
        if self.config.kind is ProviderKind.DETERMINISTIC_STUB:
            return [stub_embedding(t) for t in texts]
        if self.config.kind is not ProviderKind.REMOTE_EMBED:
            raise GatewayConfigError(
                f"provider kind {self.config.kind.value} cannot serve embeddings"
            )
        out: list[np.ndarray | None] = [None] * len(texts)
        missing: list[int] = []
        for i, text in enumerate(texts):
            cached = self._cache_get(self._embed_digest(text))
            if cached is not None:
                out[i] = np.asarray(json.loads(cached), dtype=np.float64)
            else:
                missing.append(i)
        if missing:
            self.limiter.acquire()
            batch = [texts[i] for i in missing]
            vectors = self._with_retries(
                lambda: self._embed_transport()(self.config, batch)
            )
            if len(vectors) != len(batch):
                raise GatewayConfigError(
                    f"embedding batch size mismatch: sent {len(batch)}, got {len(vectors)}"
                )
            for i, vec in zip(missing, vectors):
                arr = np.asarray(vec, dtype=np.float64)
                self._cache_put(self._embed_digest(texts[i]), json.dumps(arr.tolist()))
                out[i] = arr
        return [v for v in out]  # type: ignore[misc]

    def _embed_digest(self, text: str) -> str:
        return request_digest(self.config.model_name, text, {"op": "embed"})

    # --- plumbing -----------------------------------------------------------

    def _chat_transport(self):
        return self._transport or _default_chat_transport

    def _embed_transport(self):
        return self._transport or _default_embed_transport

    def _with_retries(self, call):
        delay = 0.5
        last = None
        for attempt in range(self.config.max_retries):
            try:
                return call()
            except (requests.RequestException, ConnectionError, TimeoutError) as exc:
                last = exc
                log.warning("provider call failed (attempt %d): %s", attempt + 1, exc)
                self.clock.sleep(delay)
                delay *= 2
        raise TransportError(f"provider failed after {self.config.max_retries} attempts: {last}")

    def _cache_get(self, digest: str) -> str | None:
        with self._cache_lock:
            if digest in self._memory_cache:
                return self._memory_cache[digest]
        if self.config.cache_dir:
            path = Path(self.config.cache_dir) / f"{digest}.json"
            if path.exists():
                response = json.loads(path.read_text(encoding="utf-8"))["response"]
                with self._cache_lock:
                    self._memory_cache[digest] = response
                return response
        return None

    def _cache_put(self, digest: str, response: str) -> None:
        with self._cache_lock:
            self._memory_cache[digest] = response
        if self.config.cache_dir:
            cache_dir = Path(self.config.cache_dir)
            cache_dir.mkdir(parents=True, exist_ok=True)
            path = cache_dir / f"{digest}.json"
            path.write_text(json.dumps({"response": response}), encoding="utf-8")

    def _record(self, prompt: str, params: dict, response: str) -> None:
        if self._record_to is None:
            return
        self._recorded.append(
            {"model": self.config.model_name, "prompt": prompt, "params": params,
             "response": response}
        )
        payload = {
            "metadata": {"provider": self.config.kind.value, "model": self.config.model_name},
            "entries": self._recorded,
        }
        self._record_to.parent.mkdir(parents=True, exist_ok=True)
        self._record_to.write_text(
            json.dumps(payload, indent=2, ensure_ascii=False), encoding="utf-8"
        )


def _api_key(config: ProviderConfig) -> str:
    if not config.api_key_env:
        return ""
    return os.environ.get(config.api_key_env, "")


def _default_chat_transport(config: ProviderConfig, prompt: str, params: dict) -> str:
    headers = {"Content-Type": "application/json"}
    key = _api_key(config)
    if key:
        headers["Authorization"] = f"Bearer {key}"
    body = {
        "model": config.model_name,
        "messages": [{"role": "user", "content": prompt}],
        **{k: v for k, v in params.items() if v is not None},
    }
    resp = requests.post(config.endpoint, json=body, headers=headers, timeout=config.timeout)
    resp.raise_for_status()
    return resp.json()["choices"][0]["message"]["content"]


def _default_embed_transport(config: ProviderConfig, texts: Sequence[str]) -> list:
    headers = {"Content-Type": "application/json"}
    key = _api_key(config)
    if key:
        headers["Authorization"] = f"Bearer {key}"
    resp = requests.post(
        config.endpoint,
        json={"model": config.model_name, "input": list(texts)},
        headers=headers,
        timeout=config.timeout,
    )
    resp.raise_for_status()
    data = sorted(resp.json()["data"], key=lambda d: d["index"])
    return [d["embedding"] for d in data]


def scripted_gateway(transcript_path: str | Path, model_name: str | None = None) -> Gateway:
    """Convenience constructor for replaying a committed transcript.

    The model name defaults to the transcript's recorded model so digests line up.
    """
    if model_name is None:
        with open(transcript_path, encoding="utf-8") as fh:
            model_name = json.load(fh).get("metadata", {}).get("model", "scripted")
    return Gateway(
        ProviderConfig(
            kind=ProviderKind.SCRIPTED_REPLAY,
            model_name=model_name,
            transcript_path=str(transcript_path),
        )
    )


def stub_embed_gateway(model_name: str = "stub") -> Gateway:
    return Gateway(ProviderConfig(kind=ProviderKind.DETERMINISTIC_STUB, model_name=model_name))
