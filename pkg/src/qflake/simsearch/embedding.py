"""Embedding vectors and providers.

The default real provider is an HTTP endpoint (model id treated as an opaque
config string, default "mxbai-embed-large-v1"). Tests and offline runs use the
deterministic mock provider: hash-seeded unit vectors with controllable planted
angles, so ranking geometry can be constructed exactly.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Protocol

import numpy as np
import requests

from qflake.corpus.models import CaseArtifact
from qflake.errors import EmptyTextError, ProviderError

logger = logging.getLogger(__name__)

DEFAULT_MODEL_ID = "mxbai-embed-large-v1"


class EmbeddingScope(Enum):
    DESCRIPTION_ONLY = "description_only"
    WITH_COMMENTS = "with_comments"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]
    model_id: str
    dim: int
    truncated: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) != self.dim:
            raise ValueError("values length must equal dim")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("embedding values must be finite")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)


class EmbeddingProvider(Protocol):
    model_id: str

    def embed(self, text: str) -> EmbeddingVector: ...


def embedding_text(
    case: CaseArtifact,
    scope: EmbeddingScope,
    *,
    char_budget: int = 32_000,
) -> tuple[str, bool]:
    """Text handed to the embedder: title + body (+ comments), with a recorded
    truncation flag when the provider budget cuts it short."""
    parts = [case.title, case.description]
    if scope is EmbeddingScope.WITH_COMMENTS:
        parts.extend(c.body for c in case.comments)
    text = "\n".join(p for p in parts if p).strip()
    if len(text) > char_budget:
        return text[:char_budget], True
    return text, False


def embed_case(
    case: CaseArtifact,
    scope: EmbeddingScope,
    provider: EmbeddingProvider,
) -> EmbeddingVector:
    text, truncated = embedding_text(case, scope)
    if not text:
        raise EmptyTextError(f"{case.id} has no text to embed")
    vector = provider.embed(text)
    if truncated:
        return EmbeddingVector(vector.values, vector.model_id, vector.dim, truncated=True)
    return vector


def embed_cases(
    cases: Iterable[CaseArtifact],
    scope: EmbeddingScope,
    provider: EmbeddingProvider,
    *,
    parallelism: int = 4,
) -> dict[str, EmbeddingVector]:
    items = list(cases)
    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        vectors = list(pool.map(lambda c: embed_case(c, scope, provider), items))
    return {case.id: vec for case, vec in zip(items, vectors)}


class CachedEmbedder:
    """Memoizing wrapper so repeated selection passes embed each text once."""

    def __init__(self, provider: EmbeddingProvider) -> None:
        self._provider = provider
        self._cache: dict[str, EmbeddingVector] = {}

    @property
    def model_id(self) -> str:
        return self._provider.model_id

    def embed(self, text: str) -> EmbeddingVector:
        hit = self._cache.get(text)
        if hit is None:
            hit = self._provider.embed(text)
            self._cache[text] = hit
        return hit


class HttpEmbeddingProvider:
    """OpenAI-style ``POST <base>/embeddings`` adapter."""

    def __init__(
        self,
        base_url: str,
        model_id: str = DEFAULT_MODEL_ID,
        *,
        api_key: str | None = None,
        max_retries: int = 3,
        timeout_s: float = 60.0,
        session: requests.Session | None = None,
    ) -> None:
        self.base_url = base_url.rstrip("/")
        self.model_id = model_id
        self.api_key = api_key
        self.max_retries = max_retries
        self.timeout_s = timeout_s
        self._session = session or requests.Session()

    def embed(self, text: str) -> EmbeddingVector:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {"model": self.model_id, "input": text}
        last_exc: Exception | None = None
        for attempt in range(self.max_retries):
            try:
                resp = self._session.post(
                    f"{self.base_url}/embeddings",
                    json=payload,
                    headers=headers,
                    timeout=self.timeout_s,
                )
            except requests.RequestException as exc:
                last_exc = exc
                time.sleep(min(2.0, 0.2 * 2**attempt))
                continue
            if resp.status_code == 200:
                body = resp.json()
                values = body["data"][0]["embedding"]
                return EmbeddingVector(tuple(values), self.model_id, len(values))
            last_exc = ProviderError(f"embedding endpoint returned {resp.status_code}")
            if resp.status_code < 500:
                break
            time.sleep(min(2.0, 0.2 * 2**attempt))
        raise ProviderError(f"embedding provider failed: {last_exc}")


def save_embeddings(embeddings: dict[str, EmbeddingVector], path: str | Path) -> None:
    lines = []
    for case_id in sorted(embeddings):
        vec = embeddings[case_id]
        lines.append(
            json.dumps(
                {
                    "case_id": case_id,
                    "model_id": vec.model_id,
                    "dim": vec.dim,
                    "truncated": vec.truncated,
                    "values": list(vec.values),
                },
                ensure_ascii=False,
                sort_keys=True,
            )
        )
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_embeddings(path: str | Path) -> dict[str, EmbeddingVector]:
    embeddings: dict[str, EmbeddingVector] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        embeddings[rec["case_id"]] = EmbeddingVector(
            tuple(rec["values"]), rec["model_id"], rec["dim"], rec.get("truncated", False)
        )
    return embeddings


class MockEmbeddingProvider:
    """Deterministic embedder: every text maps to a sha256-seeded unit vector.

    ``plant`` registers a text whose vector sits at an exact angle from another
    text's vector, which lets tests construct ranking geometry precisely.
    """

    def __init__(self, dim: int = 256, model_id: str = "mock-embed") -> None:
        self.dim = dim
        self.model_id = model_id
        self._planted: dict[str, tuple[str, float]] = {}

    def plant(self, text: str, base_text: str, angle_degrees: float) -> None:
        self._planted[text] = (base_text, angle_degrees)

    def _hash_vector(self, text: str) -> np.ndarray:
        seed = int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")
        rng = np.random.default_rng(seed)
        vec = rng.standard_normal(self.dim)
        return vec / np.linalg.norm(vec)

    def embed(self, text: str) -> EmbeddingVector:
        planted = self._planted.get(text)
        if planted is None:
            vec = self._hash_vector(text)
        else:
            base_text, angle = planted
            base = self._embed_array(base_text)
            ortho = self._hash_vector("orthogonal-direction:" + text)
            ortho = ortho - np.dot(ortho, base) * base
            ortho = ortho / np.linalg.norm(ortho)
            theta = math.radians(angle)
            vec = math.cos(theta) * base + math.sin(theta) * ortho
        return EmbeddingVector(tuple(vec.tolist()), self.model_id, self.dim)

    def _embed_array(self, text: str) -> np.ndarray:
        return self.embed(text).as_array()
