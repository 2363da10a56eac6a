"""Sentence embeddings behind a provider abstraction.

Two providers speak the same contract: a deterministic built-in embedder
(signed feature hashing of character n-grams and tokens) and a client for a
remote embedding service. The built-in embedder is model-free and exists so
the whole pipeline runs with zero external dependencies; its similarity
scale is NOT comparable to a neural sentence encoder, which is why filter
thresholds are per-provider configuration.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import httpx
import numpy as np

__all__ = [
    "EmbeddingError",
    "EmbeddingProvider",
    "BuiltinHashEmbedder",
    "RemoteEmbedder",
    "embed_texts",
    "cosine",
]

DEFAULT_DIMENSION = 256
NGRAM_SIZES = (3, 4, 5)


class EmbeddingError(RuntimeError):
    """Remote failure, dimension mismatch, or protocol violation."""


class EmbeddingProvider:
    """Common surface: a fixed dimension and an order-preserving batch encode."""

    kind: str
    dimension: int

    def embed(self, texts: Sequence[str]) -> np.ndarray:  # (n, dimension) float64
        raise NotImplementedError


def _feature_hash(feature: str) -> int:
    digest = hashlib.blake2b(feature.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


class BuiltinHashEmbedder(EmbeddingProvider):
    """Signed feature hashing of character 3-5-grams plus whole tokens.

    Term frequencies are accumulated into `dimension` signed buckets and the
    result is L2-normalized. Empty or whitespace-only text maps to the zero
    vector so degenerate posts filter out naturally.
    """

    kind = "builtin-hash"

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.dimension = dimension

    def _features(self, text: str):
        lowered = text.lower()
        for token in lowered.split():
            yield "t:" + token
        for n in NGRAM_SIZES:
            for i in range(len(lowered) - n + 1):
                yield f"g{n}:" + lowered[i : i + n]

    def embed_one(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dimension, dtype=np.float64)
        if not text or not text.strip():
            return vec
        for feature in self._features(text):
            h = _feature_hash(feature)
            sign = 1.0 if (h >> 63) & 1 == 0 else -1.0
            vec[h % self.dimension] += sign
        norm = float(np.linalg.norm(vec))
        if norm > 0.0:
            vec /= norm
        return vec

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dimension), dtype=np.float64)
        return np.stack([self.embed_one(t) for t in texts])


class RemoteEmbedder(EmbeddingProvider):
    """Client for the embedding wire protocol.

    POST {endpoint}/embed {"texts": [...]} -> {"vectors": [...], "dim": D}
    GET  {endpoint}/health -> {"status": "ok", "dim": D}

    Large batches are chunked; at most `max_in_flight` requests run
    concurrently and results are reassembled in input order.
    """

    kind = "remote"

    def __init__(
        self,
        endpoint: str,
        client: Optional[httpx.Client] = None,
        batch_size: int = 256,
        max_in_flight: int = 4,
        timeout: float = 30.0,
    ):
        self.endpoint = endpoint.rstrip("/")
        self._client = client or httpx.Client(timeout=timeout)
        self.batch_size = batch_size
        self.max_in_flight = max(1, max_in_flight)
        self.dimension = self._health_dim()

    def _health_dim(self) -> int:
        try:
            resp = self._client.get(self.endpoint + "/health")
        except httpx.HTTPError as e:
            raise EmbeddingError(f"embedding service unreachable: {e}") from e
        if resp.status_code != 200:
            raise EmbeddingError(f"embedding service unhealthy: HTTP {resp.status_code}")
        body = resp.json()
        if body.get("status") != "ok" or not isinstance(body.get("dim"), int):
            raise EmbeddingError(f"bad /health response: {body!r}")
        return body["dim"]

    def _embed_chunk(self, offset: int, chunk: list[str]) -> np.ndarray:
        try:
            resp = self._client.post(self.endpoint + "/embed", json={"texts": chunk})
        except httpx.HTTPError as e:
            raise EmbeddingError(f"embed request failed at index {offset}: {e}") from e
        if resp.status_code != 200:
            raise EmbeddingError(
                f"embed request failed at index {offset}: HTTP {resp.status_code}"
            )
        body = resp.json()
        vectors = body.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(chunk):
            raise EmbeddingError(
                f"embed response at index {offset}: expected {len(chunk)} vectors"
            )
        for j, v in enumerate(vectors):
            if len(v) != self.dimension:
                raise EmbeddingError(
                    f"dimension mismatch at index {offset + j}: "
                    f"got {len(v)}, provider dimension is {self.dimension}"
                )
        return np.asarray(vectors, dtype=np.float64)

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dimension), dtype=np.float64)
        chunks = [
            (i, list(texts[i : i + self.batch_size]))
            for i in range(0, len(texts), self.batch_size)
        ]
        if len(chunks) == 1:
            return self._embed_chunk(*chunks[0])
        with ThreadPoolExecutor(max_workers=self.max_in_flight) as pool:
            parts = list(pool.map(lambda c: self._embed_chunk(*c), chunks))
        return np.concatenate(parts, axis=0)


def embed_texts(provider: EmbeddingProvider, texts: Sequence[str]) -> np.ndarray:
    """One vector per input text, order-preserving."""
    vectors = provider.embed(texts)
    if vectors.shape != (len(texts), provider.dimension):
        raise EmbeddingError(
            f"provider returned shape {vectors.shape}, "
            f"expected {(len(texts), provider.dimension)}"
        )
    return vectors


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity in [-1, 1]; zero vectors compare as 0."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))
