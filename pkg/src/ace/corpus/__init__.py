"""Corpus ingestion, semantic chunking, and the two persistent indices."""

from ace.corpus.chunking import (
    estimate_tokens,
    normalize_whitespace,
    semantic_chunk,
    split_sentences,
    tokenize,
)
from ace.corpus.index import (
    Bm25Stats,
    Chunk,
    Document,
    HybridIndex,
    QuizIndex,
    build_hybrid_index,
    build_quiz_index,
    load_index,
    save_index,
)
from ace.corpus.ingest import chunk_documents, embed_chunks, ingest_corpus, load_manifest

__all__ = [
    "Bm25Stats",
    "Chunk",
    "Document",
    "HybridIndex",
    "QuizIndex",
    "build_hybrid_index",
    "build_quiz_index",
    "chunk_documents",
    "embed_chunks",
    "estimate_tokens",
    "ingest_corpus",
    "load_index",
    "load_manifest",
    "normalize_whitespace",
    "save_index",
    "semantic_chunk",
    "split_sentences",
    "tokenize",
]
