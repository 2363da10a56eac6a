"""HTTP surface: GET /health and POST /embed.

Wire protocol:
    GET  /health -> 200 {"status": "ok", "dim": D} once the model is up,
                    503 {"status": "loading"|"failed", ...} before that
    POST /embed {"texts": [str, ...]} -> 200 {"vectors": [[float, ...], ...], "dim": D}

Vectors are L2-normalized server-side; clients never renormalize. Malformed
bodies and oversized batches return 400.
"""

from __future__ import annotations

from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .config import Settings
from .model import ModelHolder


class EmbedRequest(BaseModel):
    texts: list[str]


def create_app(settings: Settings | None = None) -> FastAPI:
    settings = settings or Settings.from_env()
    holder = ModelHolder(settings.model, device=settings.device)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if not settings.preload:
            holder.load_in_background()
        yield

    app = FastAPI(title="embed-service", version="0.1.0", lifespan=lifespan)
    app.state.holder = holder
    app.state.settings = settings

    if settings.preload:
        holder.load()

    @app.exception_handler(RequestValidationError)
    async def _malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    def _unavailable() -> JSONResponse:
        body = {"status": holder.status}
        if holder.error:
            body["error"] = holder.error
        return JSONResponse(status_code=503, content=body)

    @app.get("/health")
    def health():
        if not holder.ready:
            return _unavailable()
        return {"status": "ok", "dim": holder.dim}

    @app.post("/embed")
    def embed(req: EmbedRequest):
        if not holder.ready:
            return _unavailable()
        if len(req.texts) > settings.max_batch:
            return JSONResponse(
                status_code=400,
                content={
                    "detail": f"batch of {len(req.texts)} exceeds max {settings.max_batch}"
                },
            )
        if not req.texts:
            return {"vectors": [], "dim": holder.dim}
        vectors = holder.encode(req.texts)
        return {"vectors": [[float(x) for x in row] for row in vectors], "dim": holder.dim}

    return app
