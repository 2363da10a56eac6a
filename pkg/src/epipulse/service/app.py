"""FastAPI application wrapping the core package.

Besides the pipeline endpoints, the app speaks two small wire protocols that
external components can implement or consume interchangeably:

- embedding:  GET /health, POST /embed
- detection:  POST /detect

Domain validation failures map to 400, upstream service failures to 502;
body-shape violations are FastAPI's usual 422.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse

from ..config import PipelineConfig
from ..detect import DetectorError
from ..embed import EmbeddingError
from ..ontology import OntologyError
from . import handlers
from . import models as m


def create_app(config: Optional[PipelineConfig] = None) -> FastAPI:
    state = handlers.ServiceState(config=config or PipelineConfig())
    app = FastAPI(title="epipulse", version="0.1.0")
    app.state.pipeline = state

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(OntologyError)
    async def _ontology_error(request: Request, exc: OntologyError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(EmbeddingError)
    async def _embedding_error(request: Request, exc: EmbeddingError):
        return JSONResponse(status_code=502, content={"detail": str(exc)})

    @app.exception_handler(DetectorError)
    async def _detector_error(request: Request, exc: DetectorError):
        return JSONResponse(status_code=502, content={"detail": str(exc)})

    @app.get("/health", response_model=m.HealthResponse)
    def health() -> m.HealthResponse:
        return handlers.handle_health(state)

    @app.post("/embed", response_model=m.EmbedResponse)
    def embed(req: m.EmbedRequest) -> m.EmbedResponse:
        return handlers.handle_embed(state, req)

    @app.post("/detect", response_model=m.DetectResponse)
    def detect(
        req: m.DetectRequest,
        min_tier: str = Query(default="low", pattern="^(high|medium|low)$"),
    ) -> m.DetectResponse:
        return handlers.handle_detect(state, req, min_tier=min_tier)

    @app.post("/preprocess", response_model=m.PreprocessResponse)
    def preprocess(req: m.PreprocessRequest) -> m.PreprocessResponse:
        return handlers.handle_preprocess(state, req)

    @app.post("/filter", response_model=m.FilterResponse)
    def filter_posts(req: m.FilterRequest) -> m.FilterResponse:
        return handlers.handle_filter(state, req)

    @app.post("/frequency", response_model=m.FrequencyResponse)
    def frequency(req: m.FrequencyRequest) -> m.FrequencyResponse:
        return handlers.handle_frequency(state, req)

    @app.post("/sample", response_model=m.SampleResponse)
    def sample(req: m.SampleRequest) -> m.SampleResponse:
        return handlers.handle_sample(state, req)

    @app.post("/score", response_model=m.ScoreResponse)
    def score(req: m.ScoreRequest) -> m.ScoreResponse:
        return handlers.handle_score(state, req)

    @app.post("/kappa", response_model=m.KappaResponse)
    def kappa(req: m.KappaTableRequest) -> m.KappaResponse:
        return handlers.handle_kappa_table(state, req)

    @app.post("/kappa/annotations", response_model=m.KappaResponse)
    def kappa_annotations(req: m.KappaAnnotationsRequest) -> m.KappaResponse:
        return handlers.handle_kappa_annotations(state, req)

    @app.post("/coverage", response_model=m.CoverageResponse)
    def coverage(req: m.CoverageRequest) -> m.CoverageResponse:
        return handlers.handle_coverage(state, req)

    @app.post("/aggregate", response_model=m.AggregateResponse)
    def aggregate(req: m.AggregateRequest) -> m.AggregateResponse:
        return handlers.handle_aggregate(state, req)

    @app.post("/warnings", response_model=m.WarningsResponse)
    def warnings_(req: m.WarningsRequest) -> m.WarningsResponse:
        return handlers.handle_warnings(state, req)

    @app.post("/profile", response_model=m.ProfileResponse)
    def profile(req: m.ProfileRequest) -> m.ProfileResponse:
        return handlers.handle_profile(state, req)

    return app
