"""Wire-level types for the model gateway.

Messages follow the four-role chat structure (system / developer / user /
assistant) used by OpenAI-compatible servers. Embeddings are plain numpy
float32 vectors; `as_unit_vector` is the single place where normalization
and finiteness are enforced.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ace.errors import InputError


class Role(str, Enum):
    SYSTEM = "system"
    DEVELOPER = "developer"
    USER = "user"
    ASSISTANT = "assistant"


@dataclass(frozen=True)
class ChatMessage:
    role: Role
    content: str

    def __post_init__(self):
        if self.role != Role.ASSISTANT and not self.content:
            raise InputError(f"{self.role.value} message must have content")


@dataclass(frozen=True)
class ChatRequest:
    model: str
    messages: tuple[ChatMessage, ...]
    temperature: float = 0.0
    max_tokens: int = 1024

    def __post_init__(self):
        if not self.messages:
            raise InputError("ChatRequest needs at least one message")
        if not 0.0 <= self.temperature <= 2.0:
            raise InputError(f"temperature {self.temperature} outside [0, 2]")
        if self.max_tokens <= 0:
            raise InputError("max_tokens must be positive")


def make_request(
    model: str,
    messages: list[ChatMessage],
    temperature: float = 0.0,
    max_tokens: int = 1024,
) -> ChatRequest:
    return ChatRequest(model, tuple(messages), temperature, max_tokens)


@dataclass(frozen=True)
class BackendProfile:
    """Connection profile for one OpenAI-compatible inference server."""

    base_url: str
    chat_model: str
    embed_model: str
    api_key: str | None = None
    rerank_model: str | None = None
    rerank_path: str = "/v1/rerank"
    timeout: float = 60.0
    extra_headers: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.base_url.startswith(("http://", "https://")):
            raise InputError(f"base_url {self.base_url!r} is not an http(s) URL")
        if self.timeout <= 0:
            raise InputError("timeout must be positive")


def render_prompt(messages: tuple[ChatMessage, ...] | list[ChatMessage]) -> str:
    """Canonical textual rendering of a message list (for hashing and mocks)."""
    return "\n".join(f"{m.role.value}: {m.content}" for m in messages)


def prompt_key(request: ChatRequest) -> str:
    """Stable hash of the rendered prompt; keys mock scripts and audit logs."""
    return hashlib.sha256(render_prompt(request.messages).encode("utf-8")).hexdigest()


def as_unit_vector(values) -> np.ndarray:
    """Coerce to a finite float32 unit vector; raises InputError otherwise."""
    vec = np.asarray(values, dtype=np.float32)
    if vec.ndim != 1 or vec.size == 0:
        raise InputError("embedding must be a non-empty 1-d vector")
    if not np.all(np.isfinite(vec)):
        raise InputError("embedding contains non-finite values")
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise InputError("embedding has zero norm")
    return (vec / norm).astype(np.float32)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity; inputs are expected to be unit vectors already."""
    return float(np.dot(a, b))
