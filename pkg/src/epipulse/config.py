"""Pipeline configuration: JSON config file, env fallbacks, flag overrides.

Precedence, strongest first: command-line flags, config file, environment,
built-in defaults. Unknown config keys are rejected up front so a typo never
silently changes a run.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, ValidationError

ENV_EMBED_ENDPOINT = "EPIPULSE_EMBED_ENDPOINT"
ENV_ONTOLOGY = "EPIPULSE_ONTOLOGY"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class EmbeddingConfig(_Section):
    kind: Literal["builtin-hash", "remote"] = "builtin-hash"
    dimension: int = 256
    endpoint: Optional[str] = None
    threshold: Optional[float] = None  # None -> provider-specific default


class SamplingConfig(_Section):
    n: Optional[int] = None
    mode: Literal["uniform", "random"] = "uniform"
    seed: int = 0


class WarningConfig(_Section):
    w: int = 7
    b: int = 28
    k: float = 2.0
    min_events: float = 5.0
    cooldown: int = 14


class IoConfig(_Section):
    input: Optional[str] = None
    output: Optional[str] = None


class PipelineConfig(_Section):
    ontology_path: Optional[str] = None  # None -> bundled default
    embedding: EmbeddingConfig = EmbeddingConfig()
    sampling: SamplingConfig = SamplingConfig()
    warning: WarningConfig = WarningConfig()
    io: IoConfig = IoConfig()
    workers: Optional[int] = None  # None -> cpu count
    batch_size: int = 500
    detector_name: str = "keyword"


class ConfigError(ValueError):
    pass


def load_config(path: Optional[str] = None) -> PipelineConfig:
    """Build a validated config from an optional file plus env fallbacks."""
    doc: dict = {}
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        try:
            doc = json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"{p}: invalid JSON ({e})") from None
        if not isinstance(doc, dict):
            raise ConfigError(f"{p}: config must be a JSON object")
    try:
        config = PipelineConfig.model_validate(doc)
    except ValidationError as e:
        raise ConfigError(f"invalid config: {e}") from None

    if config.embedding.endpoint is None:
        env_endpoint = os.environ.get(ENV_EMBED_ENDPOINT)
        if env_endpoint:
            config.embedding.endpoint = env_endpoint
    if config.ontology_path is None:
        env_ontology = os.environ.get(ENV_ONTOLOGY)
        if env_ontology:
            config.ontology_path = env_ontology
    return config
