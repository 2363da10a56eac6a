import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from epipulse.ontology import (
    EventType,
    KeywordEntry,
    OntologyError,
    OntologySpec,
    SeedSet,
    Tier,
    default_ontology_path,
    dump_ontology,
    keywords_for,
    load_ontology,
    parse_ontology,
)

EVENT_IDS = ["infect", "spread", "symptom", "prevent", "control", "cure", "death"]


def minimal_doc(**overrides):
    doc = {
        "events": {e: {"name": e.capitalize(), "definition": f"def of {e}"} for e in EVENT_IDS},
        "keywords": [],
        "seeds": {},
    }
    doc.update(overrides)
    return doc


def test_event_type_fixed_order_and_count():
    assert [e.value for e in EventType] == EVENT_IDS
    assert len(EventType) == 7
    for e in EventType:
        assert EventType(e.value) is e  # round-trip


def test_load_bundled_default(default_spec):
    assert set(default_spec.events) == set(EventType)
    assert (
        default_spec.definition(EventType.INFECT)
        == "The process of a disease/pathogen invading host(s)"
    )
    assert len(default_spec.keywords) > 0
    for e in EventType:
        assert len(default_spec.seeds_for(e)) >= 1


def test_empty_lexicon_is_valid():
    spec = parse_ontology(minimal_doc())
    assert spec.keywords == ()
    assert set(spec.events) == set(EventType)


def test_unknown_event_named_in_error(tmp_path):
    doc = minimal_doc(keywords=[{"surface": "surge", "event": "outbreak", "tier": "high"}])
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(OntologyError, match="outbreak"):
        load_ontology(path)


def test_missing_file():
    with pytest.raises(OntologyError, match="not found"):
        load_ontology("/nonexistent/ontology.json")


@pytest.mark.parametrize(
    "keyword,match",
    [
        ({"surface": "", "event": "cure", "tier": "high"}, "non-empty"),
        ({"surface": " cure", "event": "cure", "tier": "high"}, "whitespace"),
        ({"surface": "Cure", "event": "cure", "tier": "high"}, "lowercase"),
        ({"surface": "cure", "event": "cure", "tier": "highest"}, "tier"),
        ({"surface": "one two three", "event": "cure", "tier": "low"}, "tokens"),
    ],
)
def test_keyword_validation(keyword, match):
    with pytest.raises(OntologyError, match=match):
        parse_ontology(minimal_doc(keywords=[keyword]))


def test_duplicate_keyword_rejected():
    kws = [
        {"surface": "cure", "event": "cure", "tier": "high"},
        {"surface": "cure", "event": "cure", "tier": "low"},
    ]
    with pytest.raises(OntologyError, match="duplicate"):
        parse_ontology(minimal_doc(keywords=kws))


def test_same_surface_two_events_allowed():
    kws = [
        {"surface": "spread", "event": "spread", "tier": "high"},
        {"surface": "spread", "event": "infect", "tier": "low"},
    ]
    spec = parse_ontology(minimal_doc(keywords=kws))
    assert len(spec.keywords) == 2


def test_missing_definition_rejected():
    doc = minimal_doc()
    doc["events"]["cure"] = {"name": "Cure", "definition": "  "}
    with pytest.raises(OntologyError, match="cure"):
        parse_ontology(doc)


def test_missing_event_rejected():
    doc = minimal_doc()
    del doc["events"]["death"]
    with pytest.raises(OntologyError, match="death"):
        parse_ontology(doc)


def test_duplicate_seed_rejected():
    doc = minimal_doc(seeds={"cure": ["got better", "got better"]})
    with pytest.raises(OntologyError, match="duplicate seed"):
        parse_ontology(doc)


def test_keywords_for_tier_floor():
    kws = [
        {"surface": "cure", "event": "cure", "tier": "high"},
        {"surface": "recovery", "event": "cure", "tier": "high"},
    ]
    spec = parse_ontology(minimal_doc(keywords=kws))
    got = keywords_for(spec, EventType.CURE, Tier.HIGH)
    assert [k.surface for k in got] == ["cure", "recovery"]


def test_keywords_for_medium_floor():
    kws = [
        {"surface": "quarantine", "event": "control", "tier": "high"},
        {"surface": "restrict", "event": "control", "tier": "medium"},
        {"surface": "battle", "event": "control", "tier": "low"},
    ]
    spec = parse_ontology(minimal_doc(keywords=kws))
    got = keywords_for(spec, EventType.CONTROL, Tier.MEDIUM)
    assert [k.surface for k in got] == ["quarantine", "restrict"]
    assert [k.surface for k in keywords_for(spec, EventType.CONTROL, Tier.LOW)] == [
        "quarantine",
        "restrict",
        "battle",
    ]


def test_low_floor_returns_everything(default_spec):
    for e in EventType:
        assert keywords_for(default_spec, e, Tier.LOW) == [
            k for k in default_spec.keywords if k.event is e
        ]


# --- properties ----------------------------------------------------------------

surfaces = st.text(
    alphabet=st.characters(whitelist_categories=("Ll",), max_codepoint=0x2FF),
    min_size=1,
    max_size=10,
).filter(lambda s: s == s.strip() and s == s.lower())


@st.composite
def ontology_specs(draw):
    n = draw(st.integers(min_value=0, max_value=12))
    seen = set()
    keywords = []
    for _ in range(n):
        surface = draw(surfaces)
        event = draw(st.sampled_from(list(EventType)))
        if (surface, event) in seen:
            continue
        seen.add((surface, event))
        keywords.append(KeywordEntry(surface, event, draw(st.sampled_from(list(Tier)))))
    seed_sets = tuple(
        SeedSet(e, (f"seed one about {e.value}", f"seed two about {e.value}"))
        for e in draw(st.sets(st.sampled_from(list(EventType))))
    )
    return OntologySpec(
        events={e: {"name": e.value.capitalize(), "definition": f"def {e.value}"} for e in EventType},
        keywords=tuple(keywords),
        seed_sets=seed_sets,
    )


@given(ontology_specs())
def test_roundtrip_identity(spec):
    assert parse_ontology(dump_ontology(spec)) == spec


@given(ontology_specs(), st.sampled_from(list(EventType)))
def test_tier_partition(spec, event):
    full = keywords_for(spec, event, Tier.LOW)
    high = keywords_for(spec, event, Tier.HIGH)
    med = keywords_for(spec, event, Tier.MEDIUM)
    assert len(high) <= len(med) <= len(full)
    by_tier = {
        t: [k for k in full if k.tier is t] for t in Tier
    }
    assert sorted(map(id, full)) == sorted(
        map(id, by_tier[Tier.HIGH] + by_tier[Tier.MEDIUM] + by_tier[Tier.LOW])
    )
    assert med == [k for k in full if k.tier in (Tier.HIGH, Tier.MEDIUM)]


def test_file_roundtrip(tmp_path, default_spec):
    path = tmp_path / "onto.json"
    path.write_text(json.dumps(dump_ontology(default_spec)), encoding="utf-8")
    assert load_ontology(path) == default_spec


def test_default_path_exists():
    assert default_ontology_path().is_file()
