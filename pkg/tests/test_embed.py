import hashlib
import math
import random
from collections import Counter

import numpy as np
import pytest
from fastapi.testclient import TestClient
from hypothesis import given
from hypothesis import strategies as st

from epipulse.embed import (
    NGRAM_SIZES,
    BuiltinHashEmbedder,
    EmbeddingError,
    RemoteEmbedder,
    cosine,
    embed_texts,
)


def test_empty_texts_map_to_zero():
    emb = BuiltinHashEmbedder(dimension=32)
    vectors = embed_texts(emb, ["", "   "])
    assert vectors.shape == (2, 32)
    assert not vectors.any()


def test_determinism():
    emb = BuiltinHashEmbedder(dimension=64)
    a, b = embed_texts(emb, ["covid", "covid"])
    assert np.array_equal(a, b)
    again = embed_texts(BuiltinHashEmbedder(dimension=64), ["covid"])[0]
    assert np.array_equal(a, again)


def test_unit_norm():
    emb = BuiltinHashEmbedder()
    for text in ["x", "the virus spread", "a b c d e f", "über virus"]:
        v = emb.embed([text])[0]
        assert abs(float(np.linalg.norm(v)) - 1.0) < 1e-6


def _reference_embedding(text: str, dim: int) -> np.ndarray:
    """Second implementation of the hashing scheme, structured differently."""
    lowered = text.lower()
    feats = Counter()
    for tok in lowered.split():
        feats["t:" + tok] += 1
    for n in NGRAM_SIZES:
        for i in range(len(lowered) - n + 1):
            feats[f"g{n}:{lowered[i:i + n]}"] += 1
    vec = np.zeros(dim)
    for feat, count in feats.items():
        h = int.from_bytes(hashlib.blake2b(feat.encode("utf-8"), digest_size=8).digest(), "big")
        vec[h % dim] += (1.0 if (h >> 63) & 1 == 0 else -1.0) * count
    n = np.linalg.norm(vec)
    return vec / n if n > 0 else vec


def test_matches_independent_reimplementation():
    emb = BuiltinHashEmbedder(dimension=64)
    for text in ["the virus spread", "fever and cough", "#(monkey pox) is here"]:
        got = emb.embed([text])[0]
        want = _reference_embedding(text, 64)
        assert np.allclose(got, want, atol=1e-12)
        assert abs(float(np.linalg.norm(got)) - 1.0) < 1e-6


def test_collision_fuzz_10k():
    rng = random.Random(42)
    alphabet = "abcdefghijklmnopqrstuvwxyz0123456789 "
    texts = set()
    while len(texts) < 10_000:
        texts.add("".join(rng.choice(alphabet) for _ in range(rng.randint(5, 24))).strip())
    emb = BuiltinHashEmbedder()
    seen = {}
    collisions = 0
    for text in sorted(texts):
        key = tuple(np.round(emb.embed_one(text), 12))
        if key in seen:
            collisions += 1
        else:
            seen[key] = text
    assert collisions <= 1


# --- cosine ----------------------------------------------------------------------

def test_cosine_examples():
    v = np.array([3.0, 4.0]) / 5.0
    assert abs(cosine(v, v) - 1.0) < 1e-9
    assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0
    u = np.array([1.0, 1.0]) / math.sqrt(2)
    assert abs(cosine(u, np.array([1.0, 0.0])) - 0.7071) < 1e-4


def test_cosine_zero_vector():
    assert cosine(np.zeros(3), np.array([1.0, 2.0, 3.0])) == 0.0


def test_cosine_dimension_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        cosine(np.zeros(3), np.zeros(4))


vectors = st.lists(
    st.floats(min_value=-100, max_value=100, allow_nan=False), min_size=3, max_size=3
)


@given(vectors, vectors)
def test_cosine_symmetry(u, v):
    assert cosine(np.array(u), np.array(v)) == pytest.approx(cosine(np.array(v), np.array(u)))


@given(vectors, vectors, st.floats(min_value=0.01, max_value=50))
def test_cosine_scale_invariance(u, v, alpha):
    u, v = np.array(u), np.array(v)
    assert cosine(alpha * u, v) == pytest.approx(cosine(u, v), abs=1e-9)


@given(st.text(max_size=40), st.text(max_size=40))
def test_builtin_cosine_bounded(a, b):
    emb = BuiltinHashEmbedder(dimension=32)
    s = cosine(emb.embed_one(a), emb.embed_one(b))
    assert -1.0 - 1e-9 <= s <= 1.0 + 1e-9


# --- remote provider against an in-process stub server -----------------------------

@pytest.fixture(scope="module")
def service_client():
    from epipulse.service import create_app

    app = create_app()
    with TestClient(app) as client:
        yield client


def test_remote_matches_builtin(service_client):
    remote = RemoteEmbedder("", client=service_client)
    builtin = BuiltinHashEmbedder(dimension=remote.dimension)
    texts = ["fever is rising", "", "stay safe"]
    got = embed_texts(remote, texts)
    want = embed_texts(builtin, texts)
    assert np.allclose(got, want, atol=1e-9)


def test_remote_health_dimension(service_client):
    remote = RemoteEmbedder("", client=service_client)
    assert remote.dimension == 256
    vectors = remote.embed(["a"])
    assert vectors.shape == (1, 256)


def test_remote_chunking_preserves_order(service_client):
    remote = RemoteEmbedder("", client=service_client, batch_size=3, max_in_flight=2)
    texts = [f"text number {i}" for i in range(10)]
    got = remote.embed(texts)
    builtin = BuiltinHashEmbedder(dimension=remote.dimension)
    assert np.allclose(got, builtin.embed(texts), atol=1e-9)


def test_remote_unreachable():
    with pytest.raises(EmbeddingError, match="unreachable"):
        RemoteEmbedder("http://127.0.0.1:1", timeout=0.2)


def test_remote_dimension_mismatch():
    import httpx

    def handler(request: httpx.Request) -> httpx.Response:
        if request.url.path.endswith("/health"):
            return httpx.Response(200, json={"status": "ok", "dim": 8})
        return httpx.Response(200, json={"vectors": [[0.0] * 4], "dim": 4})

    client = httpx.Client(transport=httpx.MockTransport(handler), base_url="http://stub")
    remote = RemoteEmbedder("http://stub", client=client)
    with pytest.raises(EmbeddingError, match="dimension mismatch at index 0"):
        remote.embed(["x"])
