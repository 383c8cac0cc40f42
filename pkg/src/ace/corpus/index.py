"""The two retrieval indices and their on-disk format.

A persisted index is: a magic line, a JSON header (version, kind, dim,
count, chunking params), one JSON line per chunk, then a raw little-endian
float32 block holding the unit-normalized vectors. Lexical statistics are
derived data and are recomputed from chunk texts on load, which keeps them
bit-identical across round-trips by construction.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ace.corpus.chunking import tokenize
from ace.errors import IndexBuildError, IndexFormatError, InputError

MAGIC = b"ACEIDX1\n"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class Document:
    doc_id: str
    title: str
    body: str
    source_path: str = ""

    def __post_init__(self):
        if not self.doc_id:
            raise InputError("document needs a doc_id")
        if not self.body.strip():
            raise InputError(f"document {self.doc_id!r} has an empty body")


@dataclass
class Chunk:
    chunk_id: str
    doc_id: str
    text: str
    char_span: tuple[int, int]
    token_estimate: int
    embedding: np.ndarray | None = None


@dataclass
class Bm25Stats:
    """Per-term document frequencies plus per-chunk term statistics."""

    doc_freq: dict[str, int]
    term_freqs: list[Counter]
    lengths: list[int]
    avg_length: float


def compute_bm25_stats(texts: list[str]) -> Bm25Stats:
    doc_freq: Counter = Counter()
    term_freqs: list[Counter] = []
    lengths: list[int] = []
    for text in texts:
        tokens = tokenize(text)
        tf = Counter(tokens)
        term_freqs.append(tf)
        lengths.append(len(tokens))
        doc_freq.update(tf.keys())
    avg_length = sum(lengths) / len(lengths)
    return Bm25Stats(dict(doc_freq), term_freqs, lengths, avg_length)


def _stack_embeddings(chunks: list[Chunk]) -> np.ndarray:
    if not chunks:
        raise IndexBuildError("cannot build an index from zero chunks")
    dims = set()
    for chunk in chunks:
        if chunk.embedding is None:
            raise IndexBuildError(f"chunk {chunk.chunk_id} has no embedding")
        dims.add(chunk.embedding.shape[0])
    if len(dims) != 1:
        raise IndexBuildError(f"embedding dimensions differ across chunks: {sorted(dims)}")
    return np.stack([c.embedding for c in chunks]).astype(np.float32)


@dataclass
class QuizIndex:
    """Dense-only index over semantically chunked passages."""

    kind = "quiz"
    chunks: list[Chunk]
    matrix: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.by_id = {c.chunk_id: i for i, c in enumerate(self.chunks)}

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])

    def __len__(self) -> int:
        return len(self.chunks)


@dataclass
class HybridIndex(QuizIndex):
    """Dense + BM25 index; both channels cover the identical chunk set."""

    kind = "hybrid"
    lexical: Bm25Stats = None  # type: ignore[assignment]

    def __post_init__(self):
        super().__post_init__()
        if self.lexical is None:
            self.lexical = compute_bm25_stats([c.text for c in self.chunks])


def build_quiz_index(chunks: list[Chunk], params: dict | None = None) -> QuizIndex:
    matrix = _stack_embeddings(chunks)
    return QuizIndex(chunks=list(chunks), matrix=matrix, params=dict(params or {}))


def build_hybrid_index(chunks: list[Chunk], params: dict | None = None) -> HybridIndex:
    matrix = _stack_embeddings(chunks)
    return HybridIndex(chunks=list(chunks), matrix=matrix, params=dict(params or {}))


def save_index(index: QuizIndex, path: str | Path) -> None:
    path = Path(path)
    header = {
        "version": FORMAT_VERSION,
        "kind": index.kind,
        "dim": index.dim,
        "count": len(index.chunks),
        "params": index.params,
    }
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8") + b"\n")
        for chunk in index.chunks:
            record = {
                "chunk_id": chunk.chunk_id,
                "doc_id": chunk.doc_id,
                "text": chunk.text,
                "char_span": list(chunk.char_span),
                "token_estimate": chunk.token_estimate,
            }
            fh.write(json.dumps(record, sort_keys=True).encode("utf-8") + b"\n")
        fh.write(index.matrix.astype("<f4").tobytes(order="C"))


def load_index(path: str | Path) -> QuizIndex:
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise IndexFormatError(f"{path}: bad magic bytes")
        header_line = fh.readline()
        try:
            header = json.loads(header_line)
        except ValueError as exc:
            raise IndexFormatError(f"{path}: unreadable header") from exc
        if header.get("version") != FORMAT_VERSION:
            raise IndexFormatError(
                f"{path}: format version {header.get('version')} unsupported"
            )
        kind, dim, count = header.get("kind"), header.get("dim"), header.get("count")
        if kind not in ("hybrid", "quiz") or not isinstance(dim, int) or not isinstance(count, int):
            raise IndexFormatError(f"{path}: malformed header fields")
        chunks: list[Chunk] = []
        for i in range(count):
            line = fh.readline()
            if not line:
                raise IndexFormatError(f"{path}: truncated after {i} chunk records")
            try:
                rec = json.loads(line)
                chunks.append(
                    Chunk(
                        chunk_id=rec["chunk_id"],
                        doc_id=rec["doc_id"],
                        text=rec["text"],
                        char_span=(rec["char_span"][0], rec["char_span"][1]),
                        token_estimate=rec["token_estimate"],
                    )
                )
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise IndexFormatError(f"{path}: bad chunk record {i}") from exc
        expected = count * dim * 4
        blob = fh.read(expected)
        if len(blob) != expected:
            raise IndexFormatError(
                f"{path}: truncated vector block ({len(blob)} of {expected} bytes)"
            )
        if fh.read(1):
            raise IndexFormatError(f"{path}: trailing bytes after vector block")
    matrix = np.frombuffer(blob, dtype="<f4").reshape(count, dim).copy()
    for i, chunk in enumerate(chunks):
        chunk.embedding = matrix[i]
    params = header.get("params", {})
    if kind == "hybrid":
        return HybridIndex(chunks=chunks, matrix=matrix, params=params)
    return QuizIndex(chunks=chunks, matrix=matrix, params=params)
