"""Scoring of trigger predictions, inter-annotator agreement, and coverage.

Trigger identification (Tri-I) matches on exact character spans; trigger
classification (Tri-C) additionally requires the event type. Both are
micro-averaged with one-to-one matching, which for equality matching reduces
to multiset intersection counts.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .detect import EventMention, PredictionSet
from .ontology import EventType

__all__ = [
    "GoldCorpus",
    "Metrics",
    "EvalReport",
    "KappaReport",
    "score",
    "fleiss_kappa",
    "kappa_from_annotations",
    "event_coverage",
]


@dataclass(frozen=True)
class GoldCorpus:
    """Gold annotations over a post universe; unannotated posts are empty entries."""

    annotations: dict[str, tuple[EventMention, ...]]

    @classmethod
    def from_records(cls, records: Iterable[dict]) -> "GoldCorpus":
        annotations: dict[str, tuple[EventMention, ...]] = {}
        for rec in records:
            post_id = rec["id"]
            if post_id in annotations:
                raise ValueError(f"duplicate gold entry for post {post_id!r}")
            mentions = tuple(EventMention.from_record(m) for m in rec.get("mentions", []))
            seen = set()
            for m in mentions:
                key = (m.event, m.trigger.start, m.trigger.end)
                if key in seen:
                    raise ValueError(
                        f"post {post_id!r}: duplicate gold mention "
                        f"({m.event.value}, {m.trigger.start}, {m.trigger.end})"
                    )
                seen.add(key)
            annotations[post_id] = mentions
        return cls(annotations=annotations)

    def validate_spans(self, texts: Mapping[str, str]) -> list[str]:
        """Check every mention slices its post text to the recorded surface."""
        problems = []
        for post_id, mentions in self.annotations.items():
            text = texts.get(post_id)
            if text is None:
                problems.append(f"post {post_id!r}: no text available for span validation")
                continue
            for m in mentions:
                lo, hi = m.trigger.start, m.trigger.end
                if hi > len(text):
                    problems.append(
                        f"post {post_id!r}: span ({lo}, {hi}) out of bounds (len {len(text)})"
                    )
                elif text[lo:hi] != m.trigger.surface:
                    problems.append(
                        f"post {post_id!r}: span ({lo}, {hi}) slices to "
                        f"{text[lo:hi]!r}, gold says {m.trigger.surface!r}"
                    )
        return problems

    def total_mentions(self) -> int:
        return sum(len(v) for v in self.annotations.values())


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float

    def to_record(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


def _prf(matched: int, predicted: int, gold: int, flags: list[str], label: str) -> Metrics:
    if predicted == 0:
        flags.append(f"{label}_precision_undefined")
        p = 0.0
    else:
        p = matched / predicted
    if gold == 0:
        flags.append(f"{label}_recall_undefined")
        r = 0.0
    else:
        r = matched / gold
    f1 = 0.0 if p + r == 0.0 else 2.0 * p * r / (p + r)
    return Metrics(precision=p, recall=r, f1=f1)


@dataclass(frozen=True)
class EvalReport:
    tri_i: Metrics
    tri_c: Metrics
    per_event_recall: dict[EventType, float]
    counts: dict[str, int]
    flags: tuple[str, ...] = field(default=())

    def to_record(self) -> dict:
        return {
            "tri_i": self.tri_i.to_record(),
            "tri_c": self.tri_c.to_record(),
            "per_event_recall": {e.value: r for e, r in self.per_event_recall.items()},
            "counts": dict(self.counts),
            "flags": list(self.flags),
        }


def score(gold: GoldCorpus, preds: Sequence[PredictionSet], match: str = "span") -> EvalReport:
    """Micro-averaged Tri-I/Tri-C P/R/F1 against gold annotations.

    match="span" (default) compares exact character spans; match="text" is
    the looser mode comparing trigger surfaces only.
    """
    if match not in ("span", "text"):
        raise ValueError(f"match must be 'span' or 'text', got {match!r}")

    def ident_key(m: EventMention):
        if match == "span":
            return (m.trigger.start, m.trigger.end)
        return m.trigger.surface

    def class_key(m: EventMention):
        return (ident_key(m), m.event)

    pred_by_post: dict[str, PredictionSet] = {}
    for ps in preds:
        if ps.post_id not in gold.annotations:
            raise ValueError(f"prediction for unknown post id {ps.post_id!r}")
        if ps.post_id in pred_by_post:
            raise ValueError(f"duplicate prediction set for post {ps.post_id!r}")
        pred_by_post[ps.post_id] = ps

    gold_total = 0
    pred_total = 0
    matched_i = 0
    matched_c = 0
    gold_per_event: Counter = Counter()
    matched_per_event: Counter = Counter()

    for post_id, gold_mentions in gold.annotations.items():
        pred_mentions = pred_by_post[post_id].mentions if post_id in pred_by_post else ()
        gold_total += len(gold_mentions)
        pred_total += len(pred_mentions)
        for m in gold_mentions:
            gold_per_event[m.event] += 1

        gi = Counter(ident_key(m) for m in gold_mentions)
        pi = Counter(ident_key(m) for m in pred_mentions)
        matched_i += sum((gi & pi).values())

        gc = Counter(class_key(m) for m in gold_mentions)
        pc = Counter(class_key(m) for m in pred_mentions)
        both = gc & pc
        matched_c += sum(both.values())
        for (_, event), n in both.items():
            matched_per_event[event] += n

    flags: list[str] = []
    tri_i = _prf(matched_i, pred_total, gold_total, flags, "tri_i")
    tri_c = _prf(matched_c, pred_total, gold_total, flags, "tri_c")
    per_event_recall = {
        e: (matched_per_event[e] / gold_per_event[e]) if gold_per_event[e] else 0.0
        for e in EventType
    }
    return EvalReport(
        tri_i=tri_i,
        tri_c=tri_c,
        per_event_recall=per_event_recall,
        counts={
            "gold": gold_total,
            "predicted": pred_total,
            "matched_i": matched_i,
            "matched_c": matched_c,
        },
        flags=tuple(flags),
    )


@dataclass(frozen=True)
class KappaReport:
    kappa: float
    n_items: int
    n_raters: int
    per_category: dict[str, float]
    degenerate_chance: bool = False

    def to_record(self) -> dict:
        return {
            "kappa": self.kappa,
            "n_items": self.n_items,
            "n_raters": self.n_raters,
            "per_category": dict(self.per_category),
            "degenerate_chance": self.degenerate_chance,
        }


def fleiss_kappa(
    table: Sequence[Sequence[int]],
    n_raters: int,
    categories: Optional[Sequence[str]] = None,
) -> KappaReport:
    """Fleiss' kappa for an item x category matrix of rating counts.

    Every row must sum to n_raters. When chance agreement is degenerate
    (all ratings in one category) kappa is defined as 1.0 and flagged.
    """
    n_items = len(table)
    if n_items < 1:
        raise ValueError("kappa needs at least one item")
    n_cats = len(table[0])
    if n_cats < 2:
        raise ValueError("kappa needs at least two categories")
    if n_raters < 2:
        raise ValueError("kappa needs at least two raters")
    if categories is None:
        categories = [f"c{j}" for j in range(n_cats)]
    elif len(categories) != n_cats:
        raise ValueError("category labels do not match table width")

    for i, row in enumerate(table):
        if len(row) != n_cats:
            raise ValueError(f"row {i} has {len(row)} columns, expected {n_cats}")
        if any((not isinstance(x, int)) or x < 0 for x in row):
            raise ValueError(f"row {i} has negative or non-integer counts")
        if sum(row) != n_raters:
            raise ValueError(f"row {i} sums to {sum(row)}, expected n_raters={n_raters}")

    n = n_raters
    p_i = [(sum(x * x for x in row) - n) / (n * (n - 1)) for row in table]
    p_bar = sum(p_i) / n_items
    col_totals = [sum(row[j] for row in table) for j in range(n_cats)]
    p_j = [c / (n_items * n) for c in col_totals]
    p_e = sum(p * p for p in p_j)

    degenerate = p_e >= 1.0
    kappa = 1.0 if degenerate else (p_bar - p_e) / (1.0 - p_e)

    per_category: dict[str, float] = {}
    for j in range(n_cats):
        pq = p_j[j] * (1.0 - p_j[j])
        if pq == 0.0:
            continue
        disagree = sum(row[j] * (n - row[j]) for row in table)
        per_category[str(categories[j])] = 1.0 - disagree / (n_items * n * (n - 1) * pq)

    return KappaReport(
        kappa=kappa,
        n_items=n_items,
        n_raters=n_raters,
        per_category=per_category,
        degenerate_chance=degenerate,
    )


def kappa_from_annotations(corpora: Sequence[GoldCorpus]) -> KappaReport:
    """Agreement between annotator corpora over the same post universe.

    Items are (post, event type) pairs rated present/absent by each
    annotator; the pooled kappa runs over all items and per_category holds
    one kappa per event type.
    """
    if len(corpora) < 2:
        raise ValueError("agreement needs at least two annotators")
    universe = set(corpora[0].annotations)
    for i, corpus in enumerate(corpora[1:], start=2):
        if set(corpus.annotations) != universe:
            raise ValueError(f"annotator {i} covers a different post set")
    if not universe:
        raise ValueError("annotators cover no posts")

    n_raters = len(corpora)
    post_ids = sorted(universe)
    pooled: list[list[int]] = []
    per_event_tables: dict[EventType, list[list[int]]] = {e: [] for e in EventType}
    for post_id in post_ids:
        for event in EventType:
            present = sum(
                1
                for corpus in corpora
                if any(m.event is event for m in corpus.annotations[post_id])
            )
            row = [present, n_raters - present]
            pooled.append(row)
            per_event_tables[event].append(row)

    report = fleiss_kappa(pooled, n_raters, categories=["present", "absent"])
    per_event: dict[str, float] = {}
    degenerate = report.degenerate_chance
    for event, table in per_event_tables.items():
        sub = fleiss_kappa(table, n_raters, categories=["present", "absent"])
        per_event[event.value] = sub.kappa
        degenerate = degenerate or sub.degenerate_chance
    return KappaReport(
        kappa=report.kappa,
        n_items=report.n_items,
        n_raters=n_raters,
        per_category=per_event,
        degenerate_chance=degenerate,
    )


def event_coverage(gold: GoldCorpus, universe: Sequence[str]) -> float:
    """Fraction of universe posts carrying at least one gold mention."""
    if not universe:
        raise ValueError("universe must be non-empty")
    universe_set = set(universe)
    stray = [pid for pid in gold.annotations if pid not in universe_set]
    if stray:
        raise ValueError(f"gold post ids outside the universe: {sorted(stray)[:5]}")
    covered = sum(
        1 for pid in universe_set if gold.annotations.get(pid) and len(gold.annotations[pid]) > 0
    )
    return covered / len(universe_set)
