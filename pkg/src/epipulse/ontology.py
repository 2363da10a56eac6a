"""Epidemic event ontology: event types, keyword lexicon, and seed repositories.

The ontology is disease-agnostic and fixed to seven event types. Keyword
entries carry a specificity tier (high > medium > low) and seed sets hold
per-event example texts used for embedding-similarity corpus filtering.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Union

__all__ = [
    "EventType",
    "Tier",
    "KeywordEntry",
    "SeedSet",
    "OntologySpec",
    "OntologyError",
    "load_ontology",
    "parse_ontology",
    "dump_ontology",
    "keywords_for",
    "default_ontology_path",
]


class EventType(str, Enum):
    """The seven epidemic event types, in fixed canonical order."""

    INFECT = "infect"
    SPREAD = "spread"
    SYMPTOM = "symptom"
    PREVENT = "prevent"
    CONTROL = "control"
    CURE = "cure"
    DEATH = "death"

    def __str__(self) -> str:  # serialize as the bare id
        return self.value

    @property
    def order(self) -> int:
        return _EVENT_ORDER[self]


_EVENT_ORDER = {e: i for i, e in enumerate(EventType)}


class Tier(str, Enum):
    """Keyword specificity tier, ordered high > medium > low."""

    HIGH = "high"
    MEDIUM = "medium"
    LOW = "low"

    def __str__(self) -> str:
        return self.value

    @property
    def rank(self) -> int:
        return _TIER_RANK[self]


_TIER_RANK = {Tier.HIGH: 3, Tier.MEDIUM: 2, Tier.LOW: 1}

# Keyword phrases are matched against single tokens or adjacent token pairs;
# anything longer is rejected at load time.
MAX_KEYWORD_TOKENS = 2


class OntologyError(ValueError):
    """Raised when an ontology file violates the schema or an invariant."""


@dataclass(frozen=True)
class KeywordEntry:
    surface: str
    event: EventType
    tier: Tier


@dataclass(frozen=True)
class SeedSet:
    event: EventType
    seeds: tuple[str, ...]


@dataclass(frozen=True)
class OntologySpec:
    """Validated, immutable ontology: events, lexicon, and seed repositories."""

    events: dict[EventType, dict[str, str]]  # event -> {"name", "definition"}
    keywords: tuple[KeywordEntry, ...]
    seed_sets: tuple[SeedSet, ...] = field(default=())

    def seeds_for(self, event: EventType) -> tuple[str, ...]:
        for ss in self.seed_sets:
            if ss.event is event:
                return ss.seeds
        return ()

    def definition(self, event: EventType) -> str:
        return self.events[event]["definition"]


def default_ontology_path() -> Path:
    """Path of the bundled starter ontology file."""
    return Path(str(resources.files("epipulse").joinpath("data/default_ontology.json")))


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise OntologyError(msg)


def _parse_event(raw: object, where: str) -> EventType:
    try:
        return EventType(raw)
    except ValueError:
        raise OntologyError(
            f"{where}: unknown event {raw!r} (expected one of "
            f"{[e.value for e in EventType]})"
        ) from None


def _parse_tier(raw: object, where: str) -> Tier:
    try:
        return Tier(raw)
    except ValueError:
        raise OntologyError(
            f"{where}: bad tier {raw!r} (expected 'high', 'medium' or 'low')"
        ) from None


def parse_ontology(doc: object, source: str = "<memory>") -> OntologySpec:
    """Validate a decoded ontology document and build an OntologySpec.

    Validation is total: either every invariant holds and a spec is returned,
    or an OntologyError naming the offending field is raised.
    """
    _require(isinstance(doc, dict), f"{source}: top level must be a JSON object")
    assert isinstance(doc, dict)
    unknown = set(doc) - {"events", "keywords", "seeds"}
    _require(not unknown, f"{source}: unknown top-level keys {sorted(unknown)}")

    raw_events = doc.get("events")
    _require(isinstance(raw_events, dict), f"{source}: 'events' must be an object")
    assert isinstance(raw_events, dict)
    events: dict[EventType, dict[str, str]] = {}
    for key, val in raw_events.items():
        ev = _parse_event(key, f"{source}: events.{key}")
        _require(
            isinstance(val, dict),
            f"{source}: events.{key} must be an object with 'name' and 'definition'",
        )
        name = val.get("name", ev.value.capitalize())
        definition = val.get("definition")
        _require(
            isinstance(definition, str) and definition.strip() != "",
            f"{source}: events.{key}.definition must be a non-empty string",
        )
        _require(isinstance(name, str) and name != "", f"{source}: events.{key}.name must be a non-empty string")
        events[ev] = {"name": name, "definition": definition}
    missing = [e.value for e in EventType if e not in events]
    _require(not missing, f"{source}: missing event definitions for {missing}")

    keywords: list[KeywordEntry] = []
    seen_pairs: set[tuple[str, EventType]] = set()
    raw_keywords = doc.get("keywords", [])
    _require(isinstance(raw_keywords, list), f"{source}: 'keywords' must be a list")
    for i, item in enumerate(raw_keywords):
        where = f"{source}: keywords[{i}]"
        _require(isinstance(item, dict), f"{where}: must be an object")
        unknown = set(item) - {"surface", "event", "tier"}
        _require(not unknown, f"{where}: unknown keys {sorted(unknown)}")
        surface = item.get("surface")
        _require(isinstance(surface, str) and surface != "", f"{where}.surface: must be a non-empty string")
        assert isinstance(surface, str)
        _require(surface == surface.strip(), f"{where}.surface: {surface!r} has leading/trailing whitespace")
        _require(surface == surface.lower(), f"{where}.surface: {surface!r} must be lowercase")
        parts = surface.split(" ")
        _require(
            all(parts) and "\t" not in surface and "\n" not in surface,
            f"{where}.surface: {surface!r} has irregular internal whitespace",
        )
        _require(
            len(parts) <= MAX_KEYWORD_TOKENS,
            f"{where}.surface: {surface!r} has {len(parts)} tokens; at most {MAX_KEYWORD_TOKENS} are supported",
        )
        ev = _parse_event(item.get("event"), f"{where}.event")
        tier = _parse_tier(item.get("tier"), f"{where}.tier")
        pair = (surface, ev)
        _require(pair not in seen_pairs, f"{where}: duplicate keyword {surface!r} for event {ev.value!r}")
        seen_pairs.add(pair)
        keywords.append(KeywordEntry(surface=surface, event=ev, tier=tier))

    seed_sets: list[SeedSet] = []
    raw_seeds = doc.get("seeds", {})
    _require(isinstance(raw_seeds, dict), f"{source}: 'seeds' must be an object")
    assert isinstance(raw_seeds, dict)
    for key, val in raw_seeds.items():
        where = f"{source}: seeds.{key}"
        ev = _parse_event(key, where)
        _require(isinstance(val, list) and len(val) >= 1, f"{where}: must be a non-empty list of texts")
        texts: list[str] = []
        for j, t in enumerate(val):
            _require(isinstance(t, str) and t.strip() != "", f"{where}[{j}]: must be a non-empty string")
            _require(t not in texts, f"{where}[{j}]: duplicate seed text {t!r}")
            texts.append(t)
        seed_sets.append(SeedSet(event=ev, seeds=tuple(texts)))

    return OntologySpec(events=events, keywords=tuple(keywords), seed_sets=tuple(seed_sets))


def load_ontology(path: Union[str, Path]) -> OntologySpec:
    """Load and validate an ontology file (see parse_ontology for the schema)."""
    p = Path(path)
    if not p.is_file():
        raise OntologyError(f"ontology file not found: {p}")
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise OntologyError(f"{p}: invalid JSON ({e})") from e
    return parse_ontology(doc, source=str(p))


def dump_ontology(spec: OntologySpec) -> dict:
    """Serialize a spec back into the ontology file document shape."""
    return {
        "events": {e.value: dict(spec.events[e]) for e in EventType if e in spec.events},
        "keywords": [
            {"surface": k.surface, "event": k.event.value, "tier": k.tier.value}
            for k in spec.keywords
        ],
        "seeds": {ss.event.value: list(ss.seeds) for ss in spec.seed_sets},
    }


def keywords_for(spec: OntologySpec, event: EventType, min_tier: Tier = Tier.LOW) -> list[KeywordEntry]:
    """Entries for one event with tier >= min_tier, in spec file order."""
    floor = min_tier.rank
    return [k for k in spec.keywords if k.event is event and k.tier.rank >= floor]


def keyword_index(
    entries: Iterable[KeywordEntry], min_tier: Tier = Tier.LOW
) -> tuple[dict[str, list[EventType]], dict[str, list[EventType]]]:
    """Split entries into unigram and bigram lookup tables (surface -> events)."""
    floor = min_tier.rank
    unigrams: dict[str, list[EventType]] = {}
    bigrams: dict[str, list[EventType]] = {}
    for k in entries:
        if k.tier.rank < floor:
            continue
        table = bigrams if " " in k.surface else unigrams
        events = table.setdefault(k.surface, [])
        if k.event not in events:
            events.append(k.event)
    return unigrams, bigrams
