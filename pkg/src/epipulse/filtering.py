"""Event-based corpus filtering against per-event seed repositories.

Each post is scored by its maximum embedding similarity over all seed texts
of all events; posts below the threshold are rejected. Also provides the
keyword-frequency analysis used to gauge how often each event type is talked
about in a corpus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .detect import match_keywords
from .embed import EmbeddingProvider, cosine, embed_texts
from .ontology import EventType, OntologySpec, Tier

__all__ = [
    "FilterTag",
    "FrequencyReport",
    "DEFAULT_BUILTIN_THRESHOLD",
    "DEFAULT_REMOTE_THRESHOLD",
    "default_threshold",
    "seed_vectors_for",
    "tag_post",
    "filter_corpus",
    "keyword_frequency",
]

# The remote (neural sentence encoder) scale and the builtin hashing scale
# are not comparable; each provider kind gets its own default cut.
DEFAULT_REMOTE_THRESHOLD = 0.9
DEFAULT_BUILTIN_THRESHOLD = 0.35


def default_threshold(provider: EmbeddingProvider) -> float:
    return DEFAULT_REMOTE_THRESHOLD if provider.kind == "remote" else DEFAULT_BUILTIN_THRESHOLD


@dataclass(frozen=True)
class FilterTag:
    post_id: str
    best_event: EventType
    score: float

    def to_record(self) -> dict:
        return {"event": self.best_event.value, "score": self.score}


@dataclass(frozen=True)
class FrequencyReport:
    counts: dict[EventType, int]
    total_posts: int

    def to_record(self) -> dict:
        return {
            "total_posts": self.total_posts,
            "counts": {e.value: self.counts.get(e, 0) for e in EventType},
        }


def seed_vectors_for(spec: OntologySpec, provider: EmbeddingProvider) -> dict[EventType, np.ndarray]:
    """Embed every event's seed repository; every event must have seeds."""
    out: dict[EventType, np.ndarray] = {}
    for event in EventType:
        seeds = spec.seeds_for(event)
        if not seeds:
            raise ValueError(f"event {event.value!r} has no seed texts")
        out[event] = embed_texts(provider, list(seeds))
    return out


def tag_post(post_id: str, seed_vectors: dict[EventType, np.ndarray], post_vector: np.ndarray) -> FilterTag:
    """Max similarity over all (event, seed) pairs; ties break in event order."""
    best_event = EventType.INFECT
    best_score = -np.inf
    for event in EventType:
        vectors = seed_vectors.get(event)
        if vectors is None or len(vectors) == 0:
            raise ValueError(f"event {event.value!r} has no seed vectors")
        for vec in vectors:
            s = cosine(post_vector, vec)
            if s > best_score:
                best_score = s
                best_event = event
    return FilterTag(post_id=post_id, best_event=best_event, score=float(best_score))


def filter_corpus(posts, spec: OntologySpec, provider: EmbeddingProvider, threshold: float):
    """Retain posts whose best seed similarity reaches the threshold.

    Posts marked dropped by preprocessing are excluded before tagging.
    Returns (retained [(post, tag)], rejected_count) with input order
    preserved among the retained posts.
    """
    if not -1.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [-1, 1], got {threshold}")
    seed_vectors = seed_vectors_for(spec, provider)
    candidates = [p for p in posts if p.dropped is None]
    vectors = embed_texts(provider, [p.text for p in candidates])
    retained = []
    rejected = 0
    for post, vec in zip(candidates, vectors):
        tag = tag_post(post.id, seed_vectors, vec)
        if tag.score >= threshold:
            retained.append((post, tag))
        else:
            rejected += 1
    return retained, rejected


def keyword_frequency(posts, spec: OntologySpec) -> FrequencyReport:
    """Per-event count of posts containing at least one event keyword.

    Matching reuses the keyword detector semantics (token equality on word
    boundaries, all tiers); a post counts at most once per event.
    """
    counts = {e: 0 for e in EventType}
    total = 0
    for post in posts:
        total += 1
        seen = {m.event for m in match_keywords(post, spec, min_tier=Tier.LOW)}
        for event in seen:
            counts[event] += 1
    return FrequencyReport(counts=counts, total_posts=total)
