"""Time-series aggregation of detections, early-warning rules, and profiles.

Event mentions (not posts) are bucketed into contiguous UTC calendar days.
A warning fires on day t when the w-day rolling mean of detections clears
its trailing b-day baseline by k standard deviations and an absolute floor;
consecutive firings within a cooldown window collapse into one episode.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Mapping, Optional, Sequence

import numpy as np

from .detect import PredictionSet
from .ontology import EventType
from .preprocess import parse_timestamp

__all__ = [
    "EventTimeSeries",
    "WarningRule",
    "WarningSignal",
    "DiseaseProfile",
    "aggregate_daily",
    "rolling_mean",
    "fired_days",
    "detect_warnings",
    "disease_profile",
    "series_to_csv",
    "series_from_csv",
]


@dataclass(frozen=True)
class EventTimeSeries:
    """Per-day mention counts, overall and per event, over a contiguous range."""

    start_date: Optional[date]
    overall: tuple[int, ...]
    per_event: dict[EventType, tuple[int, ...]]

    def __len__(self) -> int:
        return len(self.overall)

    @property
    def empty(self) -> bool:
        return self.start_date is None or len(self.overall) == 0

    def dates(self) -> list[date]:
        if self.start_date is None:
            return []
        return [self.start_date + timedelta(days=i) for i in range(len(self.overall))]

    def to_record(self) -> dict:
        return {
            "start_date": self.start_date.isoformat() if self.start_date else None,
            "overall": list(self.overall),
            "per_event": {e.value: list(v) for e, v in self.per_event.items()},
        }

    @classmethod
    def from_record(cls, rec: dict) -> "EventTimeSeries":
        start = rec.get("start_date")
        return cls(
            start_date=date.fromisoformat(start) if start else None,
            overall=tuple(rec.get("overall", [])),
            per_event={
                EventType(k): tuple(v) for k, v in rec.get("per_event", {}).items()
            },
        )


def aggregate_daily(
    preds: Sequence[PredictionSet],
    timestamps: Mapping[str, str],
) -> EventTimeSeries:
    """Bucket mentions by UTC calendar day, zero-filling interior gaps."""
    day_events: list[tuple[date, EventType]] = []
    for ps in preds:
        if ps.post_id not in timestamps:
            raise ValueError(f"no timestamp for post {ps.post_id!r}")
        day = parse_timestamp(timestamps[ps.post_id]).date()
        for m in ps.mentions:
            day_events.append((day, m.event))

    if not day_events:
        return EventTimeSeries(start_date=None, overall=(), per_event={e: () for e in EventType})

    first = min(d for d, _ in day_events)
    last = max(d for d, _ in day_events)
    n = (last - first).days + 1
    overall = [0] * n
    per_event = {e: [0] * n for e in EventType}
    for day, event in day_events:
        i = (day - first).days
        overall[i] += 1
        per_event[event][i] += 1
    return EventTimeSeries(
        start_date=first,
        overall=tuple(overall),
        per_event={e: tuple(v) for e, v in per_event.items()},
    )


def rolling_mean(values: Sequence[float], w: int) -> list[float]:
    """Mean over the trailing w days; defined from day w-1 onward."""
    if w < 1:
        raise ValueError(f"window must be >= 1, got {w}")
    n = len(values)
    if n < w:
        return []
    arr = np.asarray(values, dtype=np.float64)
    csum = np.concatenate([[0.0], np.cumsum(arr)])
    return list((csum[w:] - csum[:-w]) / w)


@dataclass(frozen=True)
class WarningRule:
    w: int = 7
    b: int = 28
    k: float = 2.0
    min_events: float = 5.0
    cooldown: int = 14

    def __post_init__(self) -> None:
        if self.w < 1 or self.b < 1 or self.cooldown < 0:
            raise ValueError("rule windows must be positive (cooldown >= 0)")

    def to_record(self) -> dict:
        return {
            "w": self.w,
            "b": self.b,
            "k": self.k,
            "min_events": self.min_events,
            "cooldown": self.cooldown,
        }


@dataclass(frozen=True)
class WarningSignal:
    fired_on: date
    window_mean: float
    baseline_mean: float
    baseline_std: float
    rule: WarningRule
    episode_id: int

    def to_record(self) -> dict:
        return {
            "fired_on": self.fired_on.isoformat(),
            "window_mean": self.window_mean,
            "baseline_mean": self.baseline_mean,
            "baseline_std": self.baseline_std,
            "rule": self.rule.to_record(),
            "episode_id": self.episode_id,
        }


def fired_days(values: Sequence[float], rule: WarningRule) -> list[tuple[int, float, float, float]]:
    """Days (index, window mean, baseline mean, baseline std) where the rule fires.

    Baseline is the b days ending at t-w; with a zero-variance baseline the
    comparison degenerates to a strict r > mu.
    """
    n = len(values)
    if n < rule.w + rule.b:
        raise ValueError(
            f"series too short: {n} days, rule needs at least {rule.w + rule.b}"
        )
    arr = np.asarray(values, dtype=np.float64)
    out = []
    for t in range(rule.b + rule.w - 1, n):
        r = float(arr[t - rule.w + 1 : t + 1].mean())
        base = arr[t - rule.w - rule.b + 1 : t - rule.w + 1]
        mu = float(base.mean())
        sigma = float(base.std())
        if r < rule.min_events:
            continue
        exceeded = r >= mu + rule.k * sigma if sigma > 0.0 else r > mu
        if exceeded:
            out.append((t, r, mu, sigma))
    return out


def detect_warnings(series: EventTimeSeries, rule: WarningRule = WarningRule()) -> list[WarningSignal]:
    """Group fired days into episodes; each episode reports its first day."""
    if series.empty:
        raise ValueError("cannot scan an empty series for warnings")
    assert series.start_date is not None
    hits = fired_days(series.overall, rule)
    signals: list[WarningSignal] = []
    episode = -1
    prev_day: Optional[int] = None
    for t, r, mu, sigma in hits:
        if prev_day is None or t - prev_day > rule.cooldown:
            episode += 1
            signals.append(
                WarningSignal(
                    fired_on=series.start_date + timedelta(days=t),
                    window_mean=r,
                    baseline_mean=mu,
                    baseline_std=sigma,
                    rule=rule,
                    episode_id=episode,
                )
            )
        prev_day = t
    return signals


@dataclass(frozen=True)
class DiseaseProfile:
    shares: dict[EventType, float]  # percentages; sum to 100 when nonzero
    total_mentions: int

    def to_record(self) -> dict:
        return {
            "total_mentions": self.total_mentions,
            "shares": {e.value: s for e, s in self.shares.items()},
        }


def disease_profile(preds: Sequence[PredictionSet]) -> DiseaseProfile:
    """Percentage of mentions per event type."""
    counts = {e: 0 for e in EventType}
    for ps in preds:
        for m in ps.mentions:
            counts[m.event] += 1
    total = sum(counts.values())
    if total == 0:
        return DiseaseProfile(shares={e: 0.0 for e in EventType}, total_mentions=0)
    return DiseaseProfile(
        shares={e: 100.0 * counts[e] / total for e in EventType},
        total_mentions=total,
    )


# --- CSV interchange ----------------------------------------------------------

_CSV_HEADER = ["date", "overall"] + [e.value for e in EventType]


def series_to_csv(series: EventTimeSeries) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_HEADER)
    for i, day in enumerate(series.dates()):
        row = [day.isoformat(), series.overall[i]]
        row += [series.per_event[e][i] for e in EventType]
        writer.writerow(row)
    return buf.getvalue()


def series_from_csv(text: str) -> EventTimeSeries:
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    if not rows or rows[0] != _CSV_HEADER:
        raise ValueError(f"bad series CSV header; expected {','.join(_CSV_HEADER)}")
    body = rows[1:]
    if not body:
        return EventTimeSeries(start_date=None, overall=(), per_event={e: () for e in EventType})
    dates = [date.fromisoformat(r[0]) for r in body]
    for prev, cur in zip(dates, dates[1:]):
        if (cur - prev).days != 1:
            raise ValueError(f"series days not contiguous at {cur.isoformat()}")
    overall = tuple(int(r[1]) for r in body)
    per_event = {
        e: tuple(int(r[2 + j]) for r in body) for j, e in enumerate(EventType)
    }
    return EventTimeSeries(start_date=dates[0], overall=overall, per_event=per_event)
