"""Declarative run configuration.

One YAML file describes the whole pipeline run; ``${VAR}`` values are
interpolated from the environment (secrets never live in the file itself) and
command-line flags override file values.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from qflake.errors import ConfigError
from qflake.inference.providers import DecodingConfig, ProviderConfig

_ENV_REF = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)\}")


def _interpolate(value: Any) -> Any:
    if isinstance(value, str):
        def replace(match: re.Match) -> str:
            name = match.group(1)
            resolved = os.environ.get(name)
            if resolved is None:
                raise ConfigError(f"environment variable {name} is not set")
            return resolved

        return _ENV_REF.sub(replace, value)
    if isinstance(value, dict):
        return {k: _interpolate(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_interpolate(v) for v in value]
    return value


@dataclass(frozen=True)
class EmbeddingConfig:
    provider: str = "mock"          # "mock" or "http"
    base_url: str = ""
    model_id: str = "mxbai-embed-large-v1"
    api_key_env: str = ""
    scope: str = "with_comments"


@dataclass(frozen=True)
class RunConfig:
    snapshot_path: str = ""
    dataset_root: str = ""
    embedding: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    providers: tuple[ProviderConfig, ...] = ()
    conditions: str = "all"          # "base" (4 cells) or "all" (12 cells)
    template_version: str = "v1"
    parallelism: int = 4
    request_budget: int = 50_000
    queue_size: int = 50

    def require_providers(self) -> tuple[ProviderConfig, ...]:
        if not self.providers:
            raise ConfigError("at least one provider must be configured for `experiment`")
        return self.providers


def _provider_from_mapping(raw: dict[str, Any]) -> ProviderConfig:
    decoding_raw = raw.get("decoding", {})
    decoding = DecodingConfig(
        temperature=float(decoding_raw.get("temperature", 0.0)),
        max_output_tokens=int(decoding_raw.get("max_output_tokens", 64)),
    )
    try:
        return ProviderConfig(
            name=raw.get("name", raw.get("model_id", "")),
            model_id=raw["model_id"],
            endpoint=raw.get("endpoint", ""),
            decoding=decoding,
            auth_env=raw.get("auth_env", ""),
            rate_limit_per_minute=int(raw.get("rate_limit_per_minute", 60)),
            max_parallel=int(raw.get("max_parallel", 2)),
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad provider entry: {exc}") from exc


def load_config(path: str | Path) -> RunConfig:
    source = Path(path)
    try:
        raw = yaml.safe_load(source.read_text(encoding="utf-8")) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read config {source}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {source}: {exc}") from exc
    raw = _interpolate(raw)

    embedding_raw = raw.get("embedding", {})
    embedding = EmbeddingConfig(
        provider=embedding_raw.get("provider", "mock"),
        base_url=embedding_raw.get("base_url", ""),
        model_id=embedding_raw.get("model_id", "mxbai-embed-large-v1"),
        api_key_env=embedding_raw.get("api_key_env", ""),
        scope=embedding_raw.get("scope", "with_comments"),
    )
    providers = tuple(_provider_from_mapping(p) for p in raw.get("providers", []))
    return RunConfig(
        snapshot_path=raw.get("snapshot_path", ""),
        dataset_root=raw.get("dataset_root", ""),
        embedding=embedding,
        providers=providers,
        conditions=raw.get("conditions", "all"),
        template_version=raw.get("template_version", "v1"),
        parallelism=int(raw.get("parallelism", 4)),
        request_budget=int(raw.get("request_budget", 50_000)),
        queue_size=int(raw.get("queue_size", 50)),
    )
