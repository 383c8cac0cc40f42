"""Deterministic offline backend.

Chat responses are resolved in order: exact prompt-hash script entries,
then substring/callable rules, then a fallback template. Embeddings are
hash-seeded pseudo-random unit vectors, so the same text always maps to
the same vector and distinct texts are near-orthogonal. Rerank scores are
cosines between those hash embeddings, giving a self-consistent offline
relevance signal in [-1, 1].

Every response is a pure function of the request, which is what makes the
whole engine testable without a model server.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Callable, Union

import numpy as np

from ace.errors import CapabilityMissingError
from ace.gateway.types import (
    BackendProfile,
    ChatRequest,
    as_unit_vector,
    prompt_key,
    render_prompt,
)

MOCK_PROFILE = BackendProfile(
    base_url="http://mock.invalid",
    chat_model="mock-chat",
    embed_model="mock-embed",
    rerank_model="mock-rerank",
    timeout=5.0,
)

DEFAULT_FALLBACK = "MOCK-RESPONSE {hash8}"

Responder = Union[str, Callable[[str], str]]


def hash_embedding(text: str, dim: int = 64) -> np.ndarray:
    """Deterministic pseudo-random unit vector seeded by the text's sha256."""
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    seed = int.from_bytes(digest[:8], "little")
    rng = np.random.default_rng(seed)
    vec = rng.standard_normal(dim)
    return as_unit_vector(vec)


class MockBackend:
    """Scripted stand-in for an inference server.

    Args:
        script: map of prompt-hash (see `prompt_key`) to response text,
            typically loaded from a JSON script file.
        fallback_template: used when nothing matches; supports the
            placeholders {hash}, {hash8}, {last_user} and {prompt}.
        dim: embedding dimensionality.
    """

    def __init__(
        self,
        script: dict[str, str] | None = None,
        fallback_template: str = DEFAULT_FALLBACK,
        dim: int = 64,
        profile: BackendProfile = MOCK_PROFILE,
    ):
        self.profile = profile
        self.script = dict(script or {})
        self.fallback_template = fallback_template
        self.dim = dim
        self._rules: list[tuple[str, Responder]] = []

    @classmethod
    def from_script_data(cls, data: dict, **kwargs) -> "MockBackend":
        """Build from parsed script-file content.

        Two layouts are accepted: a flat JSON object mapping prompt-hash to
        response text, or an extended object with optional "hashes" (same
        map), "rules" (list of {contains, response}, matched in order
        against the rendered prompt), and "fallback" (template override).
        """
        if not isinstance(data, dict):
            raise ValueError("mock script must be a JSON object")
        if not ({"hashes", "rules", "fallback"} & set(data)):
            return cls(script=data, **kwargs)
        if "fallback" in data and "fallback_template" not in kwargs:
            kwargs["fallback_template"] = data["fallback"]
        backend = cls(script=data.get("hashes", {}), **kwargs)
        for rule in data.get("rules", []):
            backend.add_rule(rule["contains"], rule["response"])
        return backend

    @classmethod
    def from_script_file(cls, path: str | Path, **kwargs) -> "MockBackend":
        return cls.from_script_data(
            json.loads(Path(path).read_text(encoding="utf-8")), **kwargs
        )

    def add_rule(self, contains: str, respond: Responder) -> None:
        """Register a rule matched by substring against the rendered prompt.

        `respond` may be a string or a pure function of the rendered prompt;
        callables must be deterministic to preserve the mock's purity.
        """
        self._rules.append((contains, respond))

    def script_response(self, messages, response: str) -> None:
        """Script an exact response for the given message list."""
        from ace.gateway.types import make_request

        request = make_request("mock-chat", list(messages))
        self.script[prompt_key(request)] = response

    def chat(self, request: ChatRequest) -> str:
        key = prompt_key(request)
        if key in self.script:
            return self.script[key]
        rendered = render_prompt(request.messages)
        for contains, respond in self._rules:
            if contains in rendered:
                return respond(rendered) if callable(respond) else respond
        last_user = ""
        for msg in reversed(request.messages):
            if msg.role.value == "user":
                last_user = msg.content
                break
        return (
            self.fallback_template.replace("{hash}", key)
            .replace("{hash8}", key[:8])
            .replace("{last_user}", last_user)
            .replace("{prompt}", rendered)
        )

    def embed(self, texts: list[str]) -> list[np.ndarray]:
        return [hash_embedding(t, self.dim) for t in texts]

    def rerank(self, query: str, passages: list[str]) -> list[float]:
        if self.profile.rerank_model is None:
            raise CapabilityMissingError("mock profile has no rerank_model")
        q = hash_embedding(query, self.dim)
        return [float(np.dot(q, hash_embedding(p, self.dim))) for p in passages]
