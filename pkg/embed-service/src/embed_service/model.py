"""Model lifecycle: background loading with an explicit readiness state."""

from __future__ import annotations

import logging
import threading
from typing import Optional

logger = logging.getLogger("embed_service")


class ModelHolder:
    """Holds the sentence encoder; requests arriving before load finishes get 503."""

    def __init__(self, model_name: str, device: str = "cpu"):
        self.model_name = model_name
        self.device = device
        self.status = "loading"
        self.error: Optional[str] = None
        self._model = None
        self._dim: Optional[int] = None
        self._lock = threading.Lock()
        self._thread: Optional[threading.Thread] = None

    def load(self) -> None:
        try:
            from sentence_transformers import SentenceTransformer

            model = SentenceTransformer(self.model_name, device=self.device)
            getter = getattr(model, "get_embedding_dimension", None) or getattr(
                model, "get_sentence_embedding_dimension"
            )
            dim = int(getter())
            with self._lock:
                self._model = model
                self._dim = dim
                self.status = "ready"
            logger.info("loaded %s (dim=%d)", self.model_name, dim)
        except Exception as e:  # surfaced via /health
            with self._lock:
                self.status = "failed"
                self.error = str(e)
            logger.error("failed to load %s: %s", self.model_name, e)

    def load_in_background(self) -> None:
        self._thread = threading.Thread(target=self.load, daemon=True, name="model-loader")
        self._thread.start()

    @property
    def ready(self) -> bool:
        return self.status == "ready"

    @property
    def dim(self) -> int:
        if self._dim is None:
            raise RuntimeError("model not loaded")
        return self._dim

    def encode(self, texts: list[str]):
        if not self.ready or self._model is None:
            raise RuntimeError("model not loaded")
        return self._model.encode(
            texts,
            convert_to_numpy=True,
            normalize_embeddings=True,
            show_progress_bar=False,
        )
