"""Uniform client for chat completion, embedding, and pair reranking."""

from ace.gateway.http import HttpBackend
from ace.gateway.mock import MockBackend, hash_embedding
from ace.gateway.ops import chat_complete, embed_texts, rerank_pairs
from ace.gateway.types import (
    BackendProfile,
    ChatMessage,
    ChatRequest,
    Role,
    as_unit_vector,
    cosine,
    make_request,
    prompt_key,
    render_prompt,
)

__all__ = [
    "BackendProfile",
    "ChatMessage",
    "ChatRequest",
    "HttpBackend",
    "MockBackend",
    "Role",
    "as_unit_vector",
    "chat_complete",
    "cosine",
    "embed_texts",
    "hash_embedding",
    "make_request",
    "prompt_key",
    "rerank_pairs",
    "render_prompt",
]
