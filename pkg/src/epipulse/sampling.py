"""Event-based uniform sampling of a filtered pool, plus a random control.

Uniform mode targets equal per-event counts: each event gets a quota of
floor(n/7), the n mod 7 remainder goes to the first events in canonical
order, and any shortfall from a thin bucket is redistributed round-robin to
events that still have unused posts. Sampling uses numpy's PCG64 generator
so draws reproduce across platforms for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .filtering import FilterTag
from .ontology import EventType
from .preprocess import CleanPost

__all__ = ["SamplingPlan", "draw_sample"]


@dataclass(frozen=True)
class SamplingPlan:
    target_total: int
    mode: str = "uniform"  # "uniform" | "random"
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.target_total < 0:
            raise ValueError("target_total must be >= 0")
        if self.mode not in ("uniform", "random"):
            raise ValueError(f"unknown sampling mode {self.mode!r}")

    def to_record(self) -> dict:
        return {"n": self.target_total, "mode": self.mode, "seed": self.rng_seed}


def _uniform_quotas(bucket_sizes: dict[EventType, int], n: int) -> dict[EventType, int]:
    events = list(EventType)
    base, remainder = divmod(n, len(events))
    quotas = {e: base + (1 if i < remainder else 0) for i, e in enumerate(events)}
    take = {e: min(quotas[e], bucket_sizes.get(e, 0)) for e in events}
    deficit = n - sum(take.values())
    while deficit > 0:
        progressed = False
        for e in events:
            if deficit == 0:
                break
            if take[e] < bucket_sizes.get(e, 0):
                take[e] += 1
                deficit -= 1
                progressed = True
        if not progressed:  # unreachable when n <= pool size
            raise ValueError("pool too small to satisfy the sampling plan")
    return take


def draw_sample(
    pool: Sequence[tuple[CleanPost, FilterTag]],
    plan: SamplingPlan,
) -> list[CleanPost]:
    """Draw plan.target_total posts from a tagged pool, without replacement.

    The returned sample preserves the pool's original order. Identical
    (pool, plan) inputs produce identical samples.
    """
    n = plan.target_total
    if n > len(pool):
        raise ValueError(f"target_total {n} exceeds pool size {len(pool)}")
    seen_ids = set()
    for post, _ in pool:
        if post.id in seen_ids:
            raise ValueError(f"duplicate post id in pool: {post.id!r}")
        seen_ids.add(post.id)
    if n == 0:
        return []

    rng = np.random.Generator(np.random.PCG64(plan.rng_seed))

    if plan.mode == "random":
        # reservoir (Algorithm R) over the pool stream
        reservoir: list[int] = list(range(min(n, len(pool))))
        for i in range(n, len(pool)):
            j = int(rng.integers(0, i + 1))
            if j < n:
                reservoir[j] = i
        chosen = sorted(reservoir)
        return [pool[i][0] for i in chosen]

    buckets: dict[EventType, list[int]] = {e: [] for e in EventType}
    for i, (_, tag) in enumerate(pool):
        buckets[tag.best_event].append(i)
    take = _uniform_quotas({e: len(v) for e, v in buckets.items()}, n)

    chosen: list[int] = []
    for e in EventType:
        bucket = buckets[e]
        want = take[e]
        if want == 0:
            continue
        picks = rng.choice(len(bucket), size=want, replace=False)
        chosen.extend(bucket[int(i)] for i in picks)
    chosen.sort()
    return [pool[i][0] for i in chosen]
