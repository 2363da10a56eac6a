"""Typed handlers shared by the HTTP routes and the in-process CLI backend."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .. import filtering, monitor
from ..config import PipelineConfig
from ..detect import detect_keyword
from ..embed import BuiltinHashEmbedder, EmbeddingProvider, RemoteEmbedder, embed_texts
from ..evaluate import GoldCorpus, event_coverage, fleiss_kappa, kappa_from_annotations, score
from ..ontology import EventType, OntologySpec, Tier, default_ontology_path, load_ontology
from ..preprocess import normalize_post
from ..sampling import SamplingPlan, draw_sample
from . import models as m


@dataclass
class ServiceState:
    """Everything a request handler needs: the ontology and the embedder."""

    config: PipelineConfig

    @cached_property
    def ontology(self) -> OntologySpec:
        path = self.config.ontology_path or default_ontology_path()
        return load_ontology(path)

    @cached_property
    def provider(self) -> EmbeddingProvider:
        emb = self.config.embedding
        if emb.kind == "remote":
            if not emb.endpoint:
                raise ValueError("embedding.kind is 'remote' but no endpoint is configured")
            return RemoteEmbedder(emb.endpoint)
        return BuiltinHashEmbedder(dimension=emb.dimension)

    @cached_property
    def seed_vectors(self) -> dict[EventType, np.ndarray]:
        return filtering.seed_vectors_for(self.ontology, self.provider)

    @property
    def threshold(self) -> float:
        if self.config.embedding.threshold is not None:
            return self.config.embedding.threshold
        return filtering.default_threshold(self.provider)


def handle_preprocess(state: ServiceState, req: m.PreprocessRequest) -> m.PreprocessResponse:
    policy = req.policy.to_core()
    cleaned = [normalize_post(p.to_core(), policy) for p in req.posts]
    return m.PreprocessResponse(posts=[m.CleanPostModel.from_core(c) for c in cleaned])


def handle_filter(state: ServiceState, req: m.FilterRequest) -> m.FilterResponse:
    threshold = req.threshold if req.threshold is not None else state.threshold
    posts = [p.to_core() for p in req.posts]
    candidates = [p for p in posts if p.dropped is None]
    vectors = embed_texts(state.provider, [p.text for p in candidates])
    retained = []
    rejected = 0
    for post, vec in zip(candidates, vectors):
        tag = filtering.tag_post(post.id, state.seed_vectors, vec)
        if tag.score >= threshold:
            retained.append(m.FilteredPostModel.from_tagged(post, tag))
        else:
            rejected += 1
    return m.FilterResponse(retained=retained, rejected_count=rejected)


def handle_frequency(state: ServiceState, req: m.FrequencyRequest) -> m.FrequencyResponse:
    report = filtering.keyword_frequency([p.to_core() for p in req.posts], state.ontology)
    rec = report.to_record()
    return m.FrequencyResponse(total_posts=rec["total_posts"], counts=rec["counts"])


def handle_sample(state: ServiceState, req: m.SampleRequest) -> m.SampleResponse:
    pool = [p.to_tagged() for p in req.pool]
    plan = SamplingPlan(target_total=req.plan.n, mode=req.plan.mode, rng_seed=req.plan.seed)
    sampled = draw_sample(pool, plan)
    sampled_ids = {p.id for p in sampled}
    kept = [pm for pm in req.pool if pm.id in sampled_ids]
    return m.SampleResponse(posts=kept, plan=req.plan)


def handle_detect(state: ServiceState, req: m.DetectRequest, min_tier: str = "low") -> m.DetectResponse:
    tier = Tier(min_tier)
    predictions = []
    for post in req.posts:
        clean = _as_clean(post)
        ps = detect_keyword(clean, state.ontology, min_tier=tier)
        predictions.append(
            m.WirePredictionModel(
                id=ps.post_id,
                mentions=[m.MentionModel.from_core(x) for x in ps.mentions],
            )
        )
    return m.DetectResponse(predictions=predictions)


def _as_clean(post: m.DetectInPostModel):
    # the detector protocol ships only id+text; tokenize on the fly
    from ..preprocess import CleanPost, tokenize

    return CleanPost(
        id=post.id,
        created_at="1970-01-01T00:00:00+00:00",
        text=post.text,
        tokens=tuple(tokenize(post.text)),
    )


def handle_embed(state: ServiceState, req: m.EmbedRequest) -> m.EmbedResponse:
    vectors = embed_texts(state.provider, req.texts)
    return m.EmbedResponse(vectors=[[float(x) for x in v] for v in vectors], dim=state.provider.dimension)


def handle_health(state: ServiceState) -> m.HealthResponse:
    return m.HealthResponse(status="ok", dim=state.provider.dimension)


def handle_score(state: ServiceState, req: m.ScoreRequest) -> m.ScoreResponse:
    gold = GoldCorpus.from_records([g.model_dump() for g in req.gold])
    preds = [p.to_core() for p in req.predictions]
    report = score(gold, preds, match=req.match)
    rec = report.to_record()
    return m.ScoreResponse(**rec)


def handle_kappa_table(state: ServiceState, req: m.KappaTableRequest) -> m.KappaResponse:
    report = fleiss_kappa(req.table, req.n_raters, categories=req.categories)
    return m.KappaResponse(**report.to_record())


def handle_kappa_annotations(state: ServiceState, req: m.KappaAnnotationsRequest) -> m.KappaResponse:
    corpora = [
        GoldCorpus.from_records([g.model_dump() for g in rater]) for rater in req.annotations
    ]
    report = kappa_from_annotations(corpora)
    return m.KappaResponse(**report.to_record())


def handle_coverage(state: ServiceState, req: m.CoverageRequest) -> m.CoverageResponse:
    gold = GoldCorpus.from_records([g.model_dump() for g in req.gold])
    cov = event_coverage(gold, req.universe)
    covered = sum(1 for pid, ms in gold.annotations.items() if ms)
    return m.CoverageResponse(coverage=cov, universe_size=len(set(req.universe)), covered=covered)


def handle_aggregate(state: ServiceState, req: m.AggregateRequest) -> m.AggregateResponse:
    preds = [p.to_core() for p in req.predictions]
    series = monitor.aggregate_daily(preds, req.timestamps)
    return m.AggregateResponse(series=m.SeriesModel.from_core(series))


def handle_warnings(state: ServiceState, req: m.WarningsRequest) -> m.WarningsResponse:
    series = req.series.to_core()
    rule = req.rule.to_core()
    signals = monitor.detect_warnings(series, rule)
    return m.WarningsResponse(
        warnings=[m.WarningModel(**s.to_record()) for s in signals]
    )


def handle_profile(state: ServiceState, req: m.ProfileRequest) -> m.ProfileResponse:
    profile = monitor.disease_profile([p.to_core() for p in req.predictions])
    rec = profile.to_record()
    return m.ProfileResponse(**rec)
