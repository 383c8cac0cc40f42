"""Engine configuration: one JSON document plus ACE_* environment overrides.

Two backend profiles are named — `generator` for long-form synthesis and
`validator` for routing/validation calls — and may alias the same server.
When neither a config file nor ACE_BACKEND_URL provides a server, the
engine runs on the deterministic mock backend.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from ace.errors import InputError
from ace.gateway.types import BackendProfile

ENV_BACKEND_URL = "ACE_BACKEND_URL"
ENV_API_KEY = "ACE_API_KEY"
ENV_CHAT_MODEL = "ACE_CHAT_MODEL"
ENV_EMBED_MODEL = "ACE_EMBED_MODEL"
ENV_RERANK_MODEL = "ACE_RERANK_MODEL"


@dataclass
class RetrievalConfig:
    k_per_channel: int = 20
    final_k: int = 5
    mmr_lambda: float = 0.7
    mmr_pool_size: int = 50
    mmr_select_count: int = 25


@dataclass
class QaConfig:
    insufficiency_threshold: float = 0.15


@dataclass
class QuizConfig:
    items_per_call: int = 3
    start_bloom: str = "Apply"


@dataclass
class TutorConfig:
    language: str = "Python"
    max_steps: int = 12
    sandbox_timeout: float = 5.0
    sandbox_memory_mib: int = 256
    sandbox_pool_size: int = 4


@dataclass
class ChunkingConfig:
    target_tokens: int = 300
    min_tokens: int = 80
    boundary_threshold: float = 0.55


@dataclass
class MockConfig:
    dim: int = 64
    script_path: str | None = None
    fallback_template: str | None = None


@dataclass
class EngineConfig:
    generator: BackendProfile | None = None
    validator: BackendProfile | None = None
    use_mock: bool = True
    mock: MockConfig = field(default_factory=MockConfig)
    index_dir: str = "indices"
    transcripts_dir: str = "transcripts"
    prompts_dir: str | None = None
    session_ttl: float = 1800.0
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)
    qa: QaConfig = field(default_factory=QaConfig)
    quiz: QuizConfig = field(default_factory=QuizConfig)
    tutor: TutorConfig = field(default_factory=TutorConfig)
    chunking: ChunkingConfig = field(default_factory=ChunkingConfig)

    @property
    def hybrid_index_path(self) -> Path:
        return Path(self.index_dir) / "hybrid.aceidx"

    @property
    def quiz_index_path(self) -> Path:
        return Path(self.index_dir) / "quiz.aceidx"


def _profile_from_dict(data: dict, defaults: dict | None = None) -> BackendProfile:
    merged = dict(defaults or {})
    merged.update(data)
    return BackendProfile(
        base_url=merged["base_url"],
        chat_model=merged.get("chat_model", "default"),
        embed_model=merged.get("embed_model", "default"),
        api_key=merged.get("api_key"),
        rerank_model=merged.get("rerank_model"),
        rerank_path=merged.get("rerank_path", "/v1/rerank"),
        timeout=float(merged.get("timeout", 60.0)),
    )


def _section(data: dict, name: str, cls):
    section = data.get(name, {})
    if not isinstance(section, dict):
        raise InputError(f"config section {name!r} must be an object")
    known = {f for f in cls.__dataclass_fields__}
    unknown = set(section) - known
    if unknown:
        raise InputError(f"unknown keys in config section {name!r}: {sorted(unknown)}")
    return cls(**section)


def load_config(path: str | Path | None = None, env: dict | None = None) -> EngineConfig:
    env = os.environ if env is None else env
    data: dict = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise InputError(f"config file {path} not found")
        except ValueError as exc:
            raise InputError(f"config file {path} is not valid JSON: {exc}") from exc

    config = EngineConfig(
        index_dir=data.get("index_dir", "indices"),
        transcripts_dir=data.get("transcripts_dir", "transcripts"),
        prompts_dir=data.get("prompts_dir"),
        session_ttl=float(data.get("session_ttl", 1800.0)),
        retrieval=_section(data, "retrieval", RetrievalConfig),
        qa=_section(data, "qa", QaConfig),
        quiz=_section(data, "quiz", QuizConfig),
        tutor=_section(data, "tutor", TutorConfig),
        chunking=_section(data, "chunking", ChunkingConfig),
        mock=_section(data, "mock", MockConfig),
    )

    env_overrides = {
        key: env[name]
        for key, name in (
            ("base_url", ENV_BACKEND_URL),
            ("api_key", ENV_API_KEY),
            ("chat_model", ENV_CHAT_MODEL),
            ("embed_model", ENV_EMBED_MODEL),
            ("rerank_model", ENV_RERANK_MODEL),
        )
        if env.get(name)
    }

    generator_data = data.get("generator") or data.get("backend") or {}
    validator_data = data.get("validator") or {}
    if env_overrides or generator_data.get("base_url"):
        generator_defaults = dict(generator_data)
        generator_defaults.update(env_overrides)
        config.generator = _profile_from_dict(generator_defaults)
        if validator_data.get("base_url"):
            config.validator = _profile_from_dict(validator_data)
        else:
            # The two roles may alias one server; model may still differ.
            alias = dict(generator_defaults)
            alias.update(validator_data)
            config.validator = _profile_from_dict(alias)
        config.use_mock = bool(data.get("use_mock", False))
    else:
        config.use_mock = True
    return config
