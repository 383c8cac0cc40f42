"""Corpus ingestion: manifest -> documents -> chunks -> the two indices."""

from __future__ import annotations

import json
import logging
from pathlib import Path

from ace.corpus.chunking import semantic_chunk
from ace.corpus.index import (
    Chunk,
    Document,
    HybridIndex,
    QuizIndex,
    build_hybrid_index,
    build_quiz_index,
)
from ace.errors import InputError
from ace.gateway.ops import embed_texts

log = logging.getLogger(__name__)

EMBED_BATCH = 64


def load_manifest(path: str | Path) -> list[Document]:
    """Read a corpus manifest: JSON list of {doc_id, title, source_path}.

    source_path is resolved relative to the manifest's directory; each file
    is consumed as UTF-8 plain text (PDF extraction happens upstream).
    """
    path = Path(path)
    try:
        entries = json.loads(path.read_text(encoding="utf-8"))
    except ValueError as exc:
        raise InputError(f"manifest {path} is not valid JSON") from exc
    if not isinstance(entries, list) or not entries:
        raise InputError(f"manifest {path} must be a non-empty JSON list")
    documents = []
    seen = set()
    for entry in entries:
        doc_id = entry.get("doc_id")
        if not doc_id or doc_id in seen:
            raise InputError(f"manifest {path}: missing or duplicate doc_id {doc_id!r}")
        seen.add(doc_id)
        source = (path.parent / entry["source_path"]).resolve()
        documents.append(
            Document(
                doc_id=doc_id,
                title=entry.get("title", doc_id),
                body=source.read_text(encoding="utf-8"),
                source_path=str(source),
            )
        )
    return documents


def _batched_embed(backend, texts: list[str]):
    vectors = []
    for start in range(0, len(texts), EMBED_BATCH):
        vectors.extend(embed_texts(backend, texts[start : start + EMBED_BATCH]))
    return vectors


def chunk_documents(
    documents: list[Document],
    backend,
    target_tokens: int = 300,
    min_tokens: int = 80,
    boundary_threshold: float = 0.55,
) -> list[Chunk]:
    """Semantic-chunk every document; chunk ids are doc_id:NNNN in order."""
    chunks: list[Chunk] = []
    embed_fn = lambda texts: _batched_embed(backend, texts)
    for doc in documents:
        drafts = semantic_chunk(
            doc.body,
            embed_fn,
            target_tokens=target_tokens,
            min_tokens=min_tokens,
            boundary_threshold=boundary_threshold,
        )
        for i, draft in enumerate(drafts):
            chunks.append(
                Chunk(
                    chunk_id=f"{doc.doc_id}:{i:04d}",
                    doc_id=doc.doc_id,
                    text=draft.text,
                    char_span=(draft.start, draft.end),
                    token_estimate=draft.token_estimate,
                )
            )
        log.info("chunked %s into %d chunks", doc.doc_id, len(drafts))
    return chunks


def embed_chunks(chunks: list[Chunk], backend, documents: list[Document] | None = None) -> None:
    """Attach embeddings to chunks in place.

    If the backend exposes `embed_with_context(body, chunk_texts)` the chunks
    of each document are embedded with full-document context; otherwise each
    chunk is embedded independently.
    """
    if documents is not None and hasattr(backend, "embed_with_context"):
        by_doc = {d.doc_id: d for d in documents}
        for doc_id in {c.doc_id for c in chunks}:
            doc_chunks = [c for c in chunks if c.doc_id == doc_id]
            vectors = backend.embed_with_context(
                by_doc[doc_id].body, [c.text for c in doc_chunks]
            )
            for chunk, vec in zip(doc_chunks, vectors):
                chunk.embedding = vec
        return
    vectors = _batched_embed(backend, [c.text for c in chunks])
    for chunk, vec in zip(chunks, vectors):
        chunk.embedding = vec


def ingest_corpus(
    documents: list[Document],
    backend,
    target_tokens: int = 300,
    min_tokens: int = 80,
    boundary_threshold: float = 0.55,
) -> tuple[HybridIndex, QuizIndex]:
    """Build both indices from scratch over the given documents."""
    params = {
        "chunking": "semantic",
        "target_tokens": target_tokens,
        "min_tokens": min_tokens,
        "boundary_threshold": boundary_threshold,
        "late_chunking": hasattr(backend, "embed_with_context"),
    }
    chunks = chunk_documents(
        documents,
        backend,
        target_tokens=target_tokens,
        min_tokens=min_tokens,
        boundary_threshold=boundary_threshold,
    )
    embed_chunks(chunks, backend, documents)
    hybrid = build_hybrid_index(chunks, params)
    quiz = build_quiz_index([_copy_chunk(c) for c in chunks], {**params, "late_chunking": False})
    return hybrid, quiz


def _copy_chunk(chunk: Chunk) -> Chunk:
    return Chunk(
        chunk_id=chunk.chunk_id,
        doc_id=chunk.doc_id,
        text=chunk.text,
        char_span=chunk.char_span,
        token_estimate=chunk.token_estimate,
        embedding=chunk.embedding,
    )
