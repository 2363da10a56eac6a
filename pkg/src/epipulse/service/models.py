"""Pydantic request/response models for the HTTP service.

These models define the wire shapes; the on-disk JSONL formats mirror the
same objects line by line, so the CLI and the service cannot drift apart.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..detect import EventMention, PredictionSet, TriggerSpan, make_prediction_set
from ..filtering import FilterTag
from ..monitor import EventTimeSeries, WarningRule
from ..ontology import EventType
from ..preprocess import CleanPost, NormalizationPolicy, RawPost, Token


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


# --- posts --------------------------------------------------------------------

class RawPostModel(StrictModel):
    id: str
    created_at: str
    text: str
    lang: Optional[str] = None

    def to_core(self) -> RawPost:
        return RawPost(id=self.id, created_at=self.created_at, text=self.text, lang=self.lang)


class CleanPostModel(StrictModel):
    id: str
    created_at: str
    text: str
    lang: Optional[str] = None
    tokens: list[tuple[str, int, int]] = Field(default_factory=list)
    dropped: Optional[str] = None

    def to_core(self) -> CleanPost:
        return CleanPost(
            id=self.id,
            created_at=self.created_at,
            text=self.text,
            tokens=tuple(Token(*t) for t in self.tokens),
            lang=self.lang,
            dropped=self.dropped,
        )

    @classmethod
    def from_core(cls, post: CleanPost) -> "CleanPostModel":
        return cls(
            id=post.id,
            created_at=post.created_at,
            text=post.text,
            lang=post.lang,
            tokens=[tuple(t) for t in post.tokens],
            dropped=post.dropped,
        )


class FilterTagModel(StrictModel):
    event: str
    score: float


class FilteredPostModel(CleanPostModel):
    filter: FilterTagModel

    def to_tagged(self) -> tuple[CleanPost, FilterTag]:
        post = self.to_core()
        return post, FilterTag(
            post_id=post.id,
            best_event=EventType(self.filter.event),
            score=self.filter.score,
        )

    @classmethod
    def from_tagged(cls, post: CleanPost, tag: FilterTag) -> "FilteredPostModel":
        base = CleanPostModel.from_core(post)
        return cls(**base.model_dump(), filter=FilterTagModel(event=tag.best_event.value, score=tag.score))


class PolicyModel(StrictModel):
    anonymize: bool = True
    strip_retweet: bool = True
    remove_emoji: bool = True
    split_hashtags: bool = True
    drop_non_english: bool = True

    def to_core(self) -> NormalizationPolicy:
        return NormalizationPolicy(**self.model_dump())


# --- mentions and predictions ---------------------------------------------------

class MentionModel(StrictModel):
    type: str
    start: int
    end: int
    text: str

    def to_core(self) -> EventMention:
        return EventMention(
            event=EventType(self.type),
            trigger=TriggerSpan(start=self.start, end=self.end, surface=self.text),
        )

    @classmethod
    def from_core(cls, m: EventMention) -> "MentionModel":
        return cls(type=m.event.value, start=m.trigger.start, end=m.trigger.end, text=m.trigger.surface)


class GoldEntryModel(StrictModel):
    id: str
    mentions: list[MentionModel] = Field(default_factory=list)


class PredictionModel(StrictModel):
    id: str
    mentions: list[MentionModel] = Field(default_factory=list)
    detector: str = "unknown"

    def to_core(self) -> PredictionSet:
        return make_prediction_set(self.id, (m.to_core() for m in self.mentions), self.detector)

    @classmethod
    def from_core(cls, ps: PredictionSet) -> "PredictionModel":
        return cls(
            id=ps.post_id,
            mentions=[MentionModel.from_core(m) for m in ps.mentions],
            detector=ps.detector,
        )


class WirePredictionModel(StrictModel):
    """Detector-protocol prediction: no detector attribution on the wire."""

    id: str
    mentions: list[MentionModel] = Field(default_factory=list)


# --- requests/responses ---------------------------------------------------------

class PreprocessRequest(StrictModel):
    posts: list[RawPostModel]
    policy: PolicyModel = Field(default_factory=PolicyModel)


class PreprocessResponse(StrictModel):
    posts: list[CleanPostModel]


class FilterRequest(StrictModel):
    posts: list[CleanPostModel]
    threshold: Optional[float] = None


class FilterResponse(StrictModel):
    retained: list[FilteredPostModel]
    rejected_count: int


class FrequencyRequest(StrictModel):
    posts: list[CleanPostModel]


class FrequencyResponse(StrictModel):
    total_posts: int
    counts: dict[str, int]


class SamplePlanModel(StrictModel):
    n: int
    mode: Literal["uniform", "random"] = "uniform"
    seed: int = 0


class SampleRequest(StrictModel):
    pool: list[FilteredPostModel]
    plan: SamplePlanModel


class SampleResponse(StrictModel):
    posts: list[FilteredPostModel]
    plan: SamplePlanModel


class DetectInPostModel(StrictModel):
    id: str
    text: str


class DetectRequest(StrictModel):
    posts: list[DetectInPostModel]


class DetectResponse(StrictModel):
    predictions: list[WirePredictionModel]


class EmbedRequest(StrictModel):
    texts: list[str]


class EmbedResponse(StrictModel):
    vectors: list[list[float]]
    dim: int


class HealthResponse(BaseModel):
    status: str
    dim: int


class MetricsModel(StrictModel):
    precision: float
    recall: float
    f1: float


class ScoreRequest(StrictModel):
    gold: list[GoldEntryModel]
    predictions: list[PredictionModel]
    match: Literal["span", "text"] = "span"


class ScoreResponse(StrictModel):
    tri_i: MetricsModel
    tri_c: MetricsModel
    per_event_recall: dict[str, float]
    counts: dict[str, int]
    flags: list[str]


class KappaTableRequest(StrictModel):
    table: list[list[int]]
    n_raters: int
    categories: Optional[list[str]] = None


class KappaAnnotationsRequest(StrictModel):
    annotations: list[list[GoldEntryModel]]


class KappaResponse(StrictModel):
    kappa: float
    n_items: int
    n_raters: int
    per_category: dict[str, float]
    degenerate_chance: bool


class CoverageRequest(StrictModel):
    gold: list[GoldEntryModel]
    universe: list[str]


class CoverageResponse(StrictModel):
    coverage: float
    universe_size: int
    covered: int


class AggregateRequest(StrictModel):
    predictions: list[PredictionModel]
    timestamps: dict[str, str]


class SeriesModel(StrictModel):
    start_date: Optional[str] = None
    overall: list[int] = Field(default_factory=list)
    per_event: dict[str, list[int]] = Field(default_factory=dict)

    def to_core(self) -> EventTimeSeries:
        return EventTimeSeries.from_record(self.model_dump())

    @classmethod
    def from_core(cls, series: EventTimeSeries) -> "SeriesModel":
        return cls(**series.to_record())


class AggregateResponse(StrictModel):
    series: SeriesModel


class RuleModel(StrictModel):
    w: int = 7
    b: int = 28
    k: float = 2.0
    min_events: float = 5.0
    cooldown: int = 14

    def to_core(self) -> WarningRule:
        return WarningRule(**self.model_dump())


class WarningsRequest(StrictModel):
    series: SeriesModel
    rule: RuleModel = Field(default_factory=RuleModel)


class WarningModel(StrictModel):
    fired_on: str
    window_mean: float
    baseline_mean: float
    baseline_std: float
    rule: RuleModel
    episode_id: int


class WarningsResponse(StrictModel):
    warnings: list[WarningModel]


class ProfileRequest(StrictModel):
    predictions: list[PredictionModel]


class ProfileResponse(StrictModel):
    total_mentions: int
    shares: dict[str, float]
