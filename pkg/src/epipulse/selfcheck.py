"""Built-in worked examples runnable via `epipulse selfcheck`.

Each check constructs a small input by hand, runs one pipeline operation,
and compares against an expected value computed by hand. They double as a
smoke test of an installed copy.
"""

from __future__ import annotations

import math
from datetime import date, timedelta
from typing import Callable

import numpy as np

from .detect import EventMention, TriggerSpan, detect_keyword, make_prediction_set
from .embed import BuiltinHashEmbedder, cosine
from .evaluate import GoldCorpus, fleiss_kappa, score
from .filtering import FilterTag, tag_post
from .monitor import EventTimeSeries, WarningRule, detect_warnings, disease_profile, rolling_mean
from .ontology import EventType, Tier, default_ontology_path, load_ontology
from .preprocess import RawPost, normalize_post, split_hashtag, tokenize
from .sampling import SamplingPlan, draw_sample

Check = tuple[str, Callable[[], None]]


def _post(pid: str, text: str, day: int = 0):
    raw = RawPost(
        id=pid,
        created_at=(date(2022, 5, 11) + timedelta(days=day)).isoformat() + "T12:00:00+00:00",
        text=text,
    )
    return normalize_post(raw)


def check_hashtag_split() -> None:
    assert split_hashtag("#MonkeyPox") == ["monkey", "pox"]
    assert split_hashtag("#COVID19") == ["covid", "19"]
    assert split_hashtag("#covid") == ["covid"]


def check_anonymization() -> None:
    got = _post("p", "@john check https://t.co/xyz").text
    assert got == "(user) check (url)", got


def check_hashtag_rendering() -> None:
    got = _post("p", "#MonkeyPox is here").text
    assert got == "#(monkey pox) is here", got


def check_tokenize_offsets() -> None:
    got = tokenize("died of COVID ...")
    assert [(t.surface, t.start, t.end) for t in got] == [
        ("died", 0, 4),
        ("of", 5, 7),
        ("COVID", 8, 13),
        ("...", 14, 17),
    ], got


def check_cosine() -> None:
    u = np.array([1.0, 1.0]) / math.sqrt(2.0)
    v = np.array([1.0, 0.0])
    assert abs(cosine(u, v) - 0.7071) < 1e-4
    assert abs(cosine(v, v) - 1.0) < 1e-9
    assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0


def check_builtin_embedder() -> None:
    emb = BuiltinHashEmbedder(dimension=64)
    a, b = emb.embed(["covid", "covid"])
    assert np.array_equal(a, b)
    assert abs(float(np.linalg.norm(a)) - 1.0) < 1e-9
    z = emb.embed([""])[0]
    assert not z.any()


def check_tag_post() -> None:
    e1 = np.array([1.0, 0.0])
    seeds = {e: np.stack([e1 if e is EventType.INFECT else np.array([0.0, 1.0])]) for e in EventType}
    tag = tag_post("p", seeds, e1)
    assert tag.best_event is EventType.INFECT and abs(tag.score - 1.0) < 1e-9
    orth = tag_post("p", {e: np.stack([np.array([0.0, 1.0])]) for e in EventType}, e1)
    assert orth.best_event is EventType.INFECT and abs(orth.score) < 1e-9


def check_uniform_sampling() -> None:
    pool = []
    sizes = {e: (2 if e is EventType.CURE else 10) for e in EventType}
    for e in EventType:
        for i in range(sizes[e]):
            pid = f"{e.value}-{i}"
            pool.append((_post(pid, "text"), FilterTag(pid, e, 0.9)))

    def counts(n: int) -> dict[EventType, int]:
        sample = draw_sample(pool, SamplingPlan(target_total=n, mode="uniform", rng_seed=7))
        out = {e: 0 for e in EventType}
        for post in sample:
            out[EventType(post.id.rsplit("-", 1)[0])] += 1
        return out

    c14 = counts(14)
    assert all(v == 2 for v in c14.values()), c14
    c16 = counts(16)
    expect = {e: 2 for e in EventType}
    expect[EventType.INFECT] = 3
    expect[EventType.SPREAD] = 3
    assert c16 == expect, c16


def check_keyword_detector() -> None:
    spec = load_ontology(default_ontology_path())
    p1 = _post("p1", "Three students infected with COVID-19")
    got1 = detect_keyword(p1, spec, Tier.LOW)
    assert any(
        m.event is EventType.INFECT and m.trigger.surface == "infected" for m in got1.mentions
    ), got1
    p2 = _post("p2", "COVID-19 symptoms include fever, cough")
    got2 = detect_keyword(p2, spec, Tier.LOW)
    assert any(
        m.event is EventType.SYMPTOM and m.trigger.surface == "symptoms" for m in got2.mentions
    ), got2


def check_score() -> None:
    gold = GoldCorpus(
        annotations={
            "p1": (EventMention(EventType.INFECT, TriggerSpan(5, 13, "infected")),)
        }
    )
    pred = make_prediction_set(
        "p1", [EventMention(EventType.SPREAD, TriggerSpan(5, 13, "infected"))], "x"
    )
    report = score(gold, [pred])
    assert report.tri_i.f1 == 1.0 and report.tri_c.f1 == 0.0, report


def check_fleiss_kappa() -> None:
    report = fleiss_kappa([[2, 0], [1, 1]], n_raters=2)
    assert abs(report.kappa - (-1.0 / 3.0)) < 1e-4, report.kappa
    perfect = fleiss_kappa([[3, 0], [0, 3]], n_raters=3)
    assert perfect.kappa == 1.0


def check_rolling_mean() -> None:
    assert rolling_mean([1, 2, 3, 4, 5], 3) == [2.0, 3.0, 4.0]
    assert rolling_mean([4, 4], 1) == [4.0, 4.0]


def check_warning_rule() -> None:
    values = [2] * 40 + [20] * 20
    series = EventTimeSeries(
        start_date=date(2022, 5, 11),
        overall=tuple(values),
        per_event={e: tuple(values) if e is EventType.INFECT else tuple([0] * 60) for e in EventType},
    )
    flat = EventTimeSeries(
        start_date=date(2022, 5, 11),
        overall=tuple([2] * 60),
        per_event={e: tuple([0] * 60) for e in EventType},
    )
    assert detect_warnings(flat, WarningRule()) == []
    signals = detect_warnings(series, WarningRule())
    assert len(signals) == 1, signals
    assert signals[0].fired_on == date(2022, 5, 11) + timedelta(days=41), signals[0]


def check_disease_profile() -> None:
    preds = [
        make_prediction_set("a", [EventMention(EventType.INFECT, TriggerSpan(0, 1, "x"))], "k"),
        make_prediction_set(
            "b",
            [
                EventMention(EventType.SPREAD, TriggerSpan(0, 1, "x")),
                EventMention(EventType.SPREAD, TriggerSpan(2, 3, "y")),
            ],
            "k",
        ),
        make_prediction_set("c", [EventMention(EventType.DEATH, TriggerSpan(0, 1, "x"))], "k"),
    ]
    profile = disease_profile(preds)
    assert abs(profile.shares[EventType.INFECT] - 25.0) < 1e-9
    assert abs(profile.shares[EventType.SPREAD] - 50.0) < 1e-9
    assert abs(profile.shares[EventType.DEATH] - 25.0) < 1e-9


CHECKS: list[Check] = [
    ("hashtag-split", check_hashtag_split),
    ("anonymization", check_anonymization),
    ("hashtag-rendering", check_hashtag_rendering),
    ("tokenize-offsets", check_tokenize_offsets),
    ("cosine", check_cosine),
    ("builtin-embedder", check_builtin_embedder),
    ("filter-tagging", check_tag_post),
    ("uniform-sampling", check_uniform_sampling),
    ("keyword-detector", check_keyword_detector),
    ("trigger-scoring", check_score),
    ("fleiss-kappa", check_fleiss_kappa),
    ("rolling-mean", check_rolling_mean),
    ("warning-rule", check_warning_rule),
    ("disease-profile", check_disease_profile),
]


def run_selfcheck(report: Callable[[str], None] = print) -> bool:
    """Run every check; returns True when all pass."""
    all_ok = True
    for name, fn in CHECKS:
        try:
            fn()
        except Exception as e:  # report and keep going
            all_ok = False
            report(f"FAIL - {name}: {e!r}")
        else:
            report(f"ok - {name}")
    return all_ok
