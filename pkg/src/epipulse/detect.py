"""Trigger-level event prediction.

Two detectors share one output shape: a curated-keyword baseline that runs
locally, and a client for external neural detectors spoken to over a small
HTTP protocol. Keyword matching is word-boundary exact: a token (or adjacent
token pair) matches only if its punctuation-trimmed core equals the keyword,
so "cure" never fires inside "security".
"""

from __future__ import annotations

import unicodedata
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import httpx

from .ontology import EventType, OntologySpec, Tier, keyword_index
from .preprocess import CleanPost, Token

__all__ = [
    "TriggerSpan",
    "EventMention",
    "PredictionSet",
    "DetectorError",
    "detect_keyword",
    "match_keywords",
    "ExternalDetector",
    "detect_external",
]


class DetectorError(RuntimeError):
    """Endpoint unreachable, protocol violation, or invalid span."""


@dataclass(frozen=True)
class TriggerSpan:
    start: int
    end: int
    surface: str

    def __post_init__(self) -> None:
        if not 0 <= self.start < self.end:
            raise ValueError(f"bad trigger span ({self.start}, {self.end})")


@dataclass(frozen=True)
class EventMention:
    event: EventType
    trigger: TriggerSpan

    def key(self) -> tuple[int, int, int]:
        return (self.trigger.start, self.event.order, self.trigger.end)

    def to_record(self) -> dict:
        return {
            "type": self.event.value,
            "start": self.trigger.start,
            "end": self.trigger.end,
            "text": self.trigger.surface,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "EventMention":
        return cls(
            event=EventType(rec["type"]),
            trigger=TriggerSpan(start=rec["start"], end=rec["end"], surface=rec["text"]),
        )


@dataclass(frozen=True)
class PredictionSet:
    post_id: str
    mentions: tuple[EventMention, ...]
    detector: str

    def to_record(self) -> dict:
        return {
            "id": self.post_id,
            "mentions": [m.to_record() for m in self.mentions],
            "detector": self.detector,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "PredictionSet":
        return make_prediction_set(
            rec["id"],
            (EventMention.from_record(m) for m in rec.get("mentions", [])),
            rec.get("detector", "unknown"),
        )


def make_prediction_set(post_id: str, mentions: Iterable[EventMention], detector: str) -> PredictionSet:
    """Dedup on (event, start, end) and sort by (start, event order)."""
    unique: dict[tuple[EventType, int, int], EventMention] = {}
    for m in mentions:
        unique.setdefault((m.event, m.trigger.start, m.trigger.end), m)
    ordered = tuple(sorted(unique.values(), key=EventMention.key))
    return PredictionSet(post_id=post_id, mentions=ordered, detector=detector)


def _is_trimmable(ch: str) -> bool:
    return unicodedata.category(ch)[0] in ("P", "S")


def _core(token: Token) -> Optional[tuple[int, int]]:
    """Offsets of the token with punctuation/symbols stripped from both ends."""
    start, end = token.start, token.end
    surface = token.surface
    lo, hi = 0, len(surface)
    while lo < hi and _is_trimmable(surface[lo]):
        lo += 1
    while hi > lo and _is_trimmable(surface[hi - 1]):
        hi -= 1
    if lo >= hi:
        return None
    return (start + lo, start + hi)


def match_keywords(post: CleanPost, spec: OntologySpec, min_tier: Tier = Tier.LOW) -> list[EventMention]:
    """All keyword hits in a post, at word boundaries, case-insensitively."""
    unigrams, bigrams = keyword_index(spec.keywords, min_tier)
    text = post.text
    cores = [_core(t) for t in post.tokens]
    mentions: list[EventMention] = []

    for core in cores:
        if core is None:
            continue
        lo, hi = core
        surface = text[lo:hi]
        for event in unigrams.get(surface.lower(), ()):
            mentions.append(EventMention(event, TriggerSpan(lo, hi, surface)))

    if bigrams:
        for left, right in zip(cores, cores[1:]):
            if left is None or right is None:
                continue
            lo, hi = left[0], right[1]
            surface = text[lo:hi]
            for event in bigrams.get(surface.lower(), ()):
                mentions.append(EventMention(event, TriggerSpan(lo, hi, surface)))
    return mentions


def detect_keyword(post: CleanPost, spec: OntologySpec, min_tier: Tier = Tier.LOW) -> PredictionSet:
    """Curated-keyword baseline detector."""
    if post.dropped is not None:
        raise ValueError(f"post {post.id!r} was dropped ({post.dropped}); cannot detect")
    return make_prediction_set(post.id, match_keywords(post, spec, min_tier), "keyword")


# --- external detector client -------------------------------------------------

class ExternalDetector:
    """Client for the detector wire protocol.

    POST {endpoint}/detect {"posts": [{"id","text"}]} ->
        {"predictions": [{"id", "mentions": [{"type","start","end","text"}]}]}

    Every received span is validated against the post text before it is
    accepted; a bad span rejects the whole response.
    """

    def __init__(
        self,
        endpoint: str,
        detector_name: str = "external",
        client: Optional[httpx.Client] = None,
        batch_size: int = 64,
        max_in_flight: int = 4,
        timeout: float = 60.0,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.detector_name = detector_name
        self._client = client or httpx.Client(timeout=timeout)
        self.batch_size = batch_size
        self.max_in_flight = max(1, max_in_flight)

    def _validate(self, post: CleanPost, rec: dict) -> PredictionSet:
        if rec.get("id") != post.id:
            raise DetectorError(
                f"protocol violation: prediction id {rec.get('id')!r} "
                f"does not match post {post.id!r}"
            )
        mentions = []
        for m in rec.get("mentions", []):
            try:
                event = EventType(m.get("type"))
            except ValueError:
                raise DetectorError(
                    f"post {post.id!r}: unknown event type {m.get('type')!r}"
                ) from None
            start, end = m.get("start"), m.get("end")
            if (
                not isinstance(start, int)
                or not isinstance(end, int)
                or not 0 <= start < end <= len(post.text)
            ):
                raise DetectorError(
                    f"post {post.id!r}: span ({start}, {end}) out of bounds "
                    f"for text of length {len(post.text)}"
                )
            surface = post.text[start:end]
            claimed = m.get("text")
            if claimed is not None and claimed != surface:
                raise DetectorError(
                    f"post {post.id!r}: span ({start}, {end}) slices to {surface!r} "
                    f"but response claims {claimed!r}"
                )
            mentions.append(EventMention(event, TriggerSpan(start, end, surface)))
        return make_prediction_set(post.id, mentions, self.detector_name)

    def _detect_chunk(self, chunk: Sequence[CleanPost]) -> list[PredictionSet]:
        payload = {"posts": [{"id": p.id, "text": p.text} for p in chunk]}
        try:
            resp = self._client.post(self.endpoint + "/detect", json=payload)
        except httpx.HTTPError as e:
            raise DetectorError(f"detector endpoint unreachable: {e}") from e
        if resp.status_code != 200:
            raise DetectorError(f"detector endpoint returned HTTP {resp.status_code}")
        body = resp.json()
        preds = body.get("predictions")
        if not isinstance(preds, list) or len(preds) != len(chunk):
            raise DetectorError(
                f"protocol violation: expected {len(chunk)} predictions, "
                f"got {len(preds) if isinstance(preds, list) else type(preds).__name__}"
            )
        return [self._validate(post, rec) for post, rec in zip(chunk, preds)]

    def detect(self, posts: Sequence[CleanPost]) -> list[PredictionSet]:
        if not posts:
            return []
        chunks = [
            posts[i : i + self.batch_size] for i in range(0, len(posts), self.batch_size)
        ]
        if len(chunks) == 1:
            return self._detect_chunk(chunks[0])
        with ThreadPoolExecutor(max_workers=self.max_in_flight) as pool:
            parts = list(pool.map(self._detect_chunk, chunks))
        return [ps for part in parts for ps in part]


def detect_external(
    posts: Sequence[CleanPost],
    endpoint: str,
    detector_name: str = "external",
    client: Optional[httpx.Client] = None,
) -> list[PredictionSet]:
    """One PredictionSet per input post, order preserved."""
    return ExternalDetector(endpoint, detector_name, client=client).detect(posts)
