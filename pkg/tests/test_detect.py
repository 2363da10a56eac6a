import httpx
import pytest
from fastapi import FastAPI
from fastapi.testclient import TestClient
from hypothesis import given, settings
from hypothesis import strategies as st

from epipulse.detect import (
    DetectorError,
    EventMention,
    PredictionSet,
    TriggerSpan,
    detect_external,
    detect_keyword,
    make_prediction_set,
)
from epipulse.ontology import EventType, Tier, parse_ontology

from helpers import make_clean

EVENT_IDS = [e.value for e in EventType]


def spec_with(keywords):
    doc = {
        "events": {e: {"name": e, "definition": f"def {e}"} for e in EVENT_IDS},
        "keywords": keywords,
        "seeds": {},
    }
    return parse_ontology(doc)


# --- keyword detector ------------------------------------------------------------

def test_infect_sentence_mapping(default_spec):
    post = make_clean("Three students infected with COVID-19")
    preds = detect_keyword(post, default_spec)
    hits = {(m.event, m.trigger.surface) for m in preds.mentions}
    assert (EventType.INFECT, "infected") in hits


def test_symptom_sentence_mapping(default_spec):
    post = make_clean("COVID-19 symptoms include fever, cough")
    preds = detect_keyword(post, default_spec)
    hits = {(m.event, m.trigger.surface) for m in preds.mentions}
    assert (EventType.SYMPTOM, "symptoms") in hits
    # punctuation-glued tokens still match on their core
    assert (EventType.SYMPTOM, "fever") in hits


def test_no_hits_empty_mentions(default_spec):
    post = make_clean("nothing to see here folks")
    assert detect_keyword(post, default_spec).mentions == ()


def test_mentions_offsets_slice_text(default_spec):
    post = make_clean("The outbreak spread; many died.")
    preds = detect_keyword(post, default_spec)
    assert preds.mentions
    for m in preds.mentions:
        assert post.text[m.trigger.start : m.trigger.end] == m.trigger.surface


def test_case_insensitive():
    spec = spec_with([{"surface": "cure", "event": "cure", "tier": "high"}])
    upper = make_clean("CURE found")
    lower = make_clean("cure found")
    up = detect_keyword(upper, spec)
    lo = detect_keyword(lower, spec)
    assert [(m.event, m.trigger.start, m.trigger.end) for m in up.mentions] == [
        (m.event, m.trigger.start, m.trigger.end) for m in lo.mentions
    ]
    assert up.mentions[0].trigger.surface == "CURE"


def test_word_boundary_no_substring_hit():
    spec = spec_with([{"surface": "cure", "event": "cure", "tier": "high"}])
    post = make_clean("security concerns procure nothing")
    assert detect_keyword(post, spec).mentions == ()


def test_multiword_keyword_adjacent_pair():
    spec = spec_with([{"surface": "social distancing", "event": "control", "tier": "high"}])
    post = make_clean("strict social distancing rules")
    preds = detect_keyword(post, spec)
    assert len(preds.mentions) == 1
    m = preds.mentions[0]
    assert m.trigger.surface == "social distancing"
    assert post.text[m.trigger.start : m.trigger.end] == "social distancing"


def test_multiword_blocked_by_punctuation():
    spec = spec_with([{"surface": "social distancing", "event": "control", "tier": "high"}])
    post = make_clean("social, distancing")
    assert detect_keyword(post, spec).mentions == ()


def test_multilabel_keyword_two_events():
    spec = spec_with(
        [
            {"surface": "spread", "event": "spread", "tier": "high"},
            {"surface": "spread", "event": "infect", "tier": "low"},
        ]
    )
    post = make_clean("it can spread fast")
    events = {m.event for m in detect_keyword(post, spec).mentions}
    assert events == {EventType.SPREAD, EventType.INFECT}


def test_tier_monotonicity(default_spec):
    post = make_clean("quarantine now or battle the outbreak and restrict travel")
    high = detect_keyword(post, default_spec, Tier.HIGH).mentions
    med = detect_keyword(post, default_spec, Tier.MEDIUM).mentions
    low = detect_keyword(post, default_spec, Tier.LOW).mentions
    assert set(high) <= set(med) <= set(low)


def test_dropped_post_rejected(default_spec):
    post = make_clean("la cura llego", lang="fr")
    with pytest.raises(ValueError, match="dropped"):
        detect_keyword(post, default_spec)


def test_mentions_sorted_and_unique():
    spec = spec_with(
        [
            {"surface": "died", "event": "death", "tier": "high"},
            {"surface": "outbreak", "event": "spread", "tier": "high"},
        ]
    )
    post = make_clean("outbreak grows; many died in the outbreak")
    preds = detect_keyword(post, spec)
    keys = [(m.trigger.start, m.event.order, m.trigger.end) for m in preds.mentions]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)


WORD = st.text(alphabet="abcdefghijklmnopqrstuvwxyz", min_size=2, max_size=8)


@settings(max_examples=120)
@given(
    keywords=st.lists(WORD, min_size=1, max_size=5, unique=True),
    words=st.lists(WORD, min_size=0, max_size=12),
)
def test_soundness_fuzz(keywords, words):
    spec = spec_with(
        [
            {"surface": kw, "event": EVENT_IDS[i % 7], "tier": "low"}
            for i, kw in enumerate(keywords)
        ]
    )
    post = make_clean(" ".join(words), pid="fz")
    preds = detect_keyword(post, spec)
    kw_set = set(keywords)
    for m in preds.mentions:
        assert post.text[m.trigger.start : m.trigger.end] == m.trigger.surface
        assert m.trigger.surface.lower() in kw_set
    # completeness at the token level
    expected_hits = sum(1 for w in words if w in kw_set)
    identified = {}
    for m in preds.mentions:
        identified.setdefault((m.trigger.start, m.trigger.end), 0)
    assert len(identified) <= len(words)
    assert len(identified) >= min(1, expected_hits) if expected_hits else True


# --- prediction sets ---------------------------------------------------------------

def test_make_prediction_set_dedup_and_order():
    m1 = EventMention(EventType.DEATH, TriggerSpan(10, 14, "died"))
    m2 = EventMention(EventType.INFECT, TriggerSpan(0, 4, "sick"))
    m3 = EventMention(EventType.DEATH, TriggerSpan(10, 14, "died"))
    ps = make_prediction_set("p", [m1, m2, m3], "k")
    assert len(ps.mentions) == 2
    assert ps.mentions[0].trigger.start == 0


def test_prediction_record_roundtrip():
    ps = make_prediction_set(
        "p", [EventMention(EventType.CURE, TriggerSpan(3, 8, "cured"))], "keyword"
    )
    rec = ps.to_record()
    assert rec == {
        "id": "p",
        "mentions": [{"type": "cure", "start": 3, "end": 8, "text": "cured"}],
        "detector": "keyword",
    }
    assert PredictionSet.from_record(rec) == ps


def test_bad_span_rejected():
    with pytest.raises(ValueError):
        TriggerSpan(5, 5, "")
    with pytest.raises(ValueError):
        TriggerSpan(-1, 3, "abc")


# --- external detector ----------------------------------------------------------------

def stub_app(respond):
    app = FastAPI()

    @app.post("/detect")
    def detect(payload: dict):
        return respond(payload)

    return app


def client_for(respond):
    return TestClient(stub_app(respond))


def test_external_empty_mentions():
    posts = [make_clean("died of COVID", pid="a"), make_clean("all fine", pid="b")]

    def respond(payload):
        return {"predictions": [{"id": p["id"], "mentions": []} for p in payload["posts"]]}

    preds = detect_external(posts, "", detector_name="null", client=client_for(respond))
    assert [p.post_id for p in preds] == ["a", "b"]
    assert all(p.mentions == () for p in preds)
    assert all(p.detector == "null" for p in preds)


def test_external_valid_span_accepted():
    posts = [make_clean("died of COVID", pid="a")]

    def respond(payload):
        return {
            "predictions": [
                {
                    "id": "a",
                    "mentions": [{"type": "death", "start": 0, "end": 4, "text": "died"}],
                }
            ]
        }

    preds = detect_external(posts, "", client=client_for(respond))
    assert preds[0].mentions[0].event is EventType.DEATH
    assert preds[0].mentions[0].trigger.surface == "died"


def test_external_out_of_bounds_span_rejected():
    posts = [make_clean("short text", pid="a")]

    def respond(payload):
        return {
            "predictions": [
                {"id": "a", "mentions": [{"type": "death", "start": 0, "end": 99, "text": "x"}]}
            ]
        }

    with pytest.raises(DetectorError, match=r"a.*\(0, 99\)"):
        detect_external(posts, "", client=client_for(respond))


def test_external_id_mismatch_rejected():
    posts = [make_clean("x y", pid="a")]

    def respond(payload):
        return {"predictions": [{"id": "zz", "mentions": []}]}

    with pytest.raises(DetectorError, match="zz"):
        detect_external(posts, "", client=client_for(respond))


def test_external_count_mismatch_rejected():
    posts = [make_clean("x y", pid="a")]

    def respond(payload):
        return {"predictions": []}

    with pytest.raises(DetectorError, match="expected 1"):
        detect_external(posts, "", client=client_for(respond))


def test_external_surface_mismatch_rejected():
    posts = [make_clean("died of COVID", pid="a")]

    def respond(payload):
        return {
            "predictions": [
                {"id": "a", "mentions": [{"type": "death", "start": 0, "end": 4, "text": "dead"}]}
            ]
        }

    with pytest.raises(DetectorError, match="claims"):
        detect_external(posts, "", client=client_for(respond))


def test_external_unreachable():
    posts = [make_clean("x", pid="a")]
    with pytest.raises(DetectorError, match="unreachable"):
        detect_external(posts, "http://127.0.0.1:1", client=httpx.Client(timeout=0.2))


def test_external_unknown_type_rejected():
    posts = [make_clean("died of COVID", pid="a")]

    def respond(payload):
        return {
            "predictions": [
                {"id": "a", "mentions": [{"type": "plague", "start": 0, "end": 4, "text": "died"}]}
            ]
        }

    with pytest.raises(DetectorError, match="plague"):
        detect_external(posts, "", client=client_for(respond))
