"""Text-completion and sentence-embedding providers.

Two capabilities back the pipeline: an LLM completion endpoint and a
sentence embedder. Both come with deterministic mocks so every stage is
testable offline: a scripted completion provider and a hashed bag-of-words
embedder (FNV-1a 64-bit token hashing mod D, L2-normalized).
"""

from __future__ import annotations

import json
import math
import os
import threading
from dataclasses import dataclass, field

import httpx

from .errors import (
    DimensionMismatch,
    EmptyText,
    ProviderUnavailable,
    ResponseTooLong,
    ScriptExhausted,
    SchemaViolation,
)
from .model import normalize_text

DEFAULT_TEMPERATURE = 0.8
DEFAULT_MAX_TOKENS = 4096

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    max_tokens: int = DEFAULT_MAX_TOKENS
    temperature: float = DEFAULT_TEMPERATURE
    tag: str = ""  # pipeline stage label, used for logging and scripting

    def __post_init__(self):
        if not self.prompt:
            raise EmptyText("completion prompt must be non-empty")
        if self.max_tokens <= 0:
            raise SchemaViolation("max_tokens must be positive")
        if self.temperature < 0:
            raise SchemaViolation("temperature must be >= 0")


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def cosine(u, v) -> float:
    """Cosine similarity; 0.0 when either vector has zero norm."""
    if len(u) != len(v):
        raise DimensionMismatch(f"dimension {len(u)} vs {len(v)}")
    dot = sum(a * b for a, b in zip(u, v))
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return dot / (nu * nv)


@dataclass
class ScriptEntry:
    tag: str
    substring: str
    response: str
    consumed: bool = False


@dataclass
class ProviderScript:
    """Deterministic fixture driving the mock completion provider.

    Entries are consumed in order; a request matches the first unconsumed
    entry whose tag equals the request tag and whose substring occurs in
    the prompt.
    """

    entries: list = field(default_factory=list)
    embedding_mode: str = "hashed-bag-of-words"  # or "table"
    embedding_table: dict = field(default_factory=dict)

    def add(self, tag: str, substring: str, response: str) -> "ProviderScript":
        self.entries.append(ScriptEntry(tag, substring, response))
        return self

    @classmethod
    def from_file(cls, path) -> "ProviderScript":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        script = cls(embedding_mode=doc.get("embedding_mode", "hashed-bag-of-words"))
        for entry in doc["entries"]:
            script.add(entry["match"]["tag"], entry["match"].get("substring", ""), entry["response"])
        return script


class MockCompletionProvider:
    """Pure function of (script, request history); counts calls for audits."""

    def __init__(self, script: ProviderScript):
        self.script = script
        self.calls = 0
        self._lock = threading.Lock()

    def complete(self, req: CompletionRequest) -> str:
        with self._lock:
            self.calls += 1
            for entry in self.script.entries:
                if entry.consumed:
                    continue
                if entry.tag == req.tag and entry.substring in req.prompt:
                    entry.consumed = True
                    return entry.response
            raise ScriptExhausted(
                f"no scripted response for tag={req.tag!r} prompt={req.prompt[:80]!r}"
            )


class MockEmbedder:
    """Deterministic embedder.

    hashed-bag-of-words mode: each normalized token is hashed (FNV-1a 64)
    to one of D buckets, counts accumulated, vector L2-normalized unless
    all-zero. table mode: exact lookup of the normalized text.
    """

    def __init__(self, dimension: int = 32, mode: str = "hashed-bag-of-words", table=None):
        if dimension < 8:
            raise SchemaViolation("embedding dimension must be >= 8")
        self.dimension = dimension
        self.mode = mode
        self.table = dict(table or {})
        self.calls = 0

    def embed(self, text: str):
        normalized = normalize_text(text)
        if not normalized:
            raise EmptyText("cannot embed empty text")
        self.calls += 1
        if self.mode == "table":
            try:
                return list(self.table[normalized])
            except KeyError:
                raise ScriptExhausted(f"no table embedding for {normalized!r}")
        vec = [0.0] * self.dimension
        for token in normalized.lower().split():
            vec[fnv1a64(token.encode("utf-8")) % self.dimension] += 1.0
        norm = math.sqrt(sum(x * x for x in vec))
        if norm > 0.0:
            vec = [x / norm for x in vec]
        return vec


class HttpCompletionProvider:
    """Generic chat-completion JSON endpoint.

    POSTs {model, messages, temperature, max_tokens}; the vendor is a
    config value, not a code path. The API key is read from the named
    environment variable, never from the config file. Retries a fixed 3
    attempts; a configurable semaphore bounds in-flight requests.
    """

    RETRIES = 3

    def __init__(self, endpoint: str, model: str, api_key_env: str = "",
                 max_in_flight: int = 4, client: httpx.Client | None = None):
        self.endpoint = endpoint
        self.model = model
        self.api_key = os.environ.get(api_key_env, "") if api_key_env else ""
        self._sem = threading.Semaphore(max_in_flight)
        self._client = client or httpx.Client(timeout=60.0)

    def complete(self, req: CompletionRequest) -> str:
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": req.prompt}],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        last_error = None
        with self._sem:
            for _ in range(self.RETRIES):
                try:
                    resp = self._client.post(self.endpoint, json=payload, headers=headers)
                except httpx.HTTPError as exc:
                    last_error = exc
                    continue
                if resp.status_code != 200:
                    last_error = ProviderUnavailable(f"HTTP {resp.status_code}")
                    continue
                text = self._extract_text(resp.json())
                if len(text) > req.max_tokens * 16:  # crude char bound per token
                    raise ResponseTooLong(f"{len(text)} chars for max_tokens={req.max_tokens}")
                return text
        raise ProviderUnavailable(f"completion failed after {self.RETRIES} attempts: {last_error}")

    @staticmethod
    def _extract_text(body: dict) -> str:
        try:
            return body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            pass
        if isinstance(body.get("result"), str):
            return body["result"]
        raise ProviderUnavailable(f"unrecognized completion response shape: {list(body)}")


@dataclass
class Providers:
    """The pair of capabilities handed to pipeline stages."""

    llm: object
    embedder: object


def providers_from_config(cfg: dict, script: ProviderScript | None = None) -> Providers:
    """Build providers from the "provider" section of the main config file."""
    section = cfg.get("provider", {})
    kind = section.get("kind", "mock")
    dimension = int(section.get("dimension", 32))
    if kind == "mock":
        script = script or ProviderScript()
        return Providers(
            llm=MockCompletionProvider(script),
            embedder=MockEmbedder(dimension=dimension, mode=script.embedding_mode,
                                  table=script.embedding_table),
        )
    if kind == "http":
        llm = HttpCompletionProvider(
            endpoint=section["endpoint"],
            model=section.get("model", ""),
            api_key_env=section.get("api_key_env", ""),
        )
        return Providers(llm=llm, embedder=MockEmbedder(dimension=dimension))
    raise SchemaViolation(f"unknown provider kind: {kind!r}")
