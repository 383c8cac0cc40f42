"""Gateway operations: the one retry/validation envelope around any backend.

`chat_complete` retries exactly once on transport failure and never on a
backend error. `embed_texts` guarantees unit-normalized vectors of a single
dimension regardless of what the backend returned. `rerank_pairs` guarantees
one finite score per passage, in order.
"""

from __future__ import annotations

import numpy as np

from ace.errors import BackendError, InputError, TransportError
from ace.gateway.types import ChatRequest, as_unit_vector


def chat_complete(backend, request: ChatRequest) -> str:
    try:
        return backend.chat(request)
    except TransportError:
        return backend.chat(request)


def embed_texts(backend, texts: list[str]) -> list[np.ndarray]:
    if not texts:
        raise InputError("embed_texts needs at least one text")
    if any(not t for t in texts):
        raise InputError("embed_texts got an empty text")
    try:
        raw = backend.embed(texts)
    except TransportError:
        raw = backend.embed(texts)
    if len(raw) != len(texts):
        raise BackendError(f"expected {len(texts)} embeddings, got {len(raw)}")
    vectors = [as_unit_vector(v) for v in raw]
    dims = {v.shape[0] for v in vectors}
    if len(dims) != 1:
        raise BackendError(f"embedding dimensions differ within one batch: {sorted(dims)}")
    return vectors


def rerank_pairs(backend, query: str, passages: list[str]) -> list[float]:
    if not passages:
        raise InputError("rerank_pairs needs at least one passage")
    try:
        scores = backend.rerank(query, passages)
    except TransportError:
        scores = backend.rerank(query, passages)
    if len(scores) != len(passages):
        raise BackendError(f"expected {len(passages)} rerank scores, got {len(scores)}")
    scores = [float(s) for s in scores]
    if any(not np.isfinite(s) for s in scores):
        raise BackendError("rerank returned non-finite scores")
    return scores
