import os
from dataclasses import dataclass

DEFAULT_MODEL = "sentence-transformers/all-MiniLM-L6-v2"


@dataclass(frozen=True)
class Settings:
    """Service configuration; the embedding dimension is reported, not set."""

    model: str = DEFAULT_MODEL
    max_batch: int = 10_000
    device: str = "cpu"
    preload: bool = False  # load the model before serving instead of in the background

    @classmethod
    def from_env(cls) -> "Settings":
        return cls(
            model=os.environ.get("EMBED_SERVICE_MODEL", DEFAULT_MODEL),
            max_batch=int(os.environ.get("EMBED_SERVICE_MAX_BATCH", "10000")),
            device=os.environ.get("EMBED_SERVICE_DEVICE", "cpu"),
        )
