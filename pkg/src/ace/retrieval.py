"""Query-time retrieval: BM25, dense cosine, hybrid pooling, rerank, MMR.

All orderings are total: scores descend, ties break by ascending chunk_id,
so identical inputs always produce identical output order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from ace.corpus.chunking import tokenize
from ace.corpus.index import Chunk, HybridIndex, QuizIndex
from ace.errors import CapabilityMissingError, InputError
from ace.gateway.ops import rerank_pairs

BM25_K1 = 1.2
BM25_B = 0.75
RRF_CONSTANT = 60


class Channel(str, Enum):
    LEXICAL = "lexical"
    DENSE = "dense"
    RERANK = "rerank"
    MMR = "mmr"


@dataclass(frozen=True)
class ScoredChunk:
    chunk_id: str
    score: float
    channel: Channel
    lexical_rank: int | None = None  # 1-based rank in the BM25 top-k, if present
    dense_rank: int | None = None  # 1-based rank in the dense top-k, if present


@dataclass(frozen=True)
class MmrParams:
    lam: float = 0.7
    pool_size: int = 50
    select_count: int = 25

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise InputError("MMR lambda must lie in [0, 1]")
        if self.select_count < 1 or self.select_count > self.pool_size:
            raise InputError("need 1 <= select_count <= pool_size")


@dataclass
class MmrResult:
    selected: list[ScoredChunk]
    short: bool  # fewer candidates than select_count were available


def bm25_idf(n_chunks: int, doc_freq: int) -> float:
    return math.log(1.0 + (n_chunks - doc_freq + 0.5) / (doc_freq + 0.5))


def bm25_search(index: HybridIndex, query: str, k: int) -> list[ScoredChunk]:
    """Top-k chunks by BM25 (k1=1.2, b=0.75) over unique query terms.

    Chunks sharing no term with the query are excluded, so an all-unknown
    query yields an empty list rather than zero scores.
    """
    if len(index) == 0:
        raise InputError("bm25_search over an empty index")
    if k < 1:
        raise InputError("k must be >= 1")
    terms = sorted(set(tokenize(query)))
    if not terms:
        return []
    stats = index.lexical
    n = len(index)
    scored: list[tuple[float, str, int]] = []
    for pos, chunk in enumerate(index.chunks):
        tf = stats.term_freqs[pos]
        score = 0.0
        overlap = False
        for term in terms:
            freq = tf.get(term, 0)
            if freq == 0:
                continue
            overlap = True
            idf = bm25_idf(n, stats.doc_freq[term])
            denom = freq + BM25_K1 * (
                1.0 - BM25_B + BM25_B * stats.lengths[pos] / stats.avg_length
            )
            score += idf * freq * (BM25_K1 + 1.0) / denom
        if overlap:
            scored.append((score, chunk.chunk_id, pos))
    scored.sort(key=lambda item: (-item[0], item[1]))
    return [
        ScoredChunk(chunk_id, score, Channel.LEXICAL, lexical_rank=i + 1)
        for i, (score, chunk_id, _pos) in enumerate(scored[:k])
    ]


def dense_search(index: QuizIndex, query_embedding: np.ndarray, k: int) -> list[ScoredChunk]:
    """Top-k by cosine similarity (exact scan over unit vectors)."""
    if len(index) == 0:
        raise InputError("dense_search over an empty index")
    if k < 1:
        raise InputError("k must be >= 1")
    query = np.asarray(query_embedding, dtype=np.float32)
    if query.shape != (index.dim,):
        raise InputError(
            f"query dim {query.shape} does not match index dim ({index.dim},)"
        )
    scores = index.matrix @ query
    order = sorted(range(len(index)), key=lambda i: (-float(scores[i]), index.chunks[i].chunk_id))
    return [
        ScoredChunk(index.chunks[i].chunk_id, float(scores[i]), Channel.DENSE, dense_rank=rank + 1)
        for rank, i in enumerate(order[:k])
    ]


def hybrid_candidates(
    index: HybridIndex,
    query: str,
    query_embedding: np.ndarray,
    k_per_channel: int = 20,
) -> list[ScoredChunk]:
    """Deduplicated union of the lexical and dense top-k pools.

    Dense results with non-positive cosine are excluded, mirroring the
    lexical rule that chunks sharing no query term never enter the pool; a
    query unrelated to the whole corpus can therefore yield an empty pool.
    A chunk present in both channels keeps the score of the channel where it
    ranked better (dense wins rank ties) and remembers both ranks so that
    rank fusion stays possible downstream.
    """
    lexical = bm25_search(index, query, k_per_channel)
    dense = [c for c in dense_search(index, query_embedding, k_per_channel) if c.score > 0.0]
    merged: dict[str, ScoredChunk] = {}
    for item in lexical:
        merged[item.chunk_id] = item
    for item in dense:
        prior = merged.get(item.chunk_id)
        if prior is None:
            merged[item.chunk_id] = item
        else:
            keep_dense = item.dense_rank <= prior.lexical_rank
            merged[item.chunk_id] = ScoredChunk(
                chunk_id=item.chunk_id,
                score=item.score if keep_dense else prior.score,
                channel=Channel.DENSE if keep_dense else Channel.LEXICAL,
                lexical_rank=prior.lexical_rank,
                dense_rank=item.dense_rank,
            )
    def best_rank(item: ScoredChunk) -> int:
        ranks = [r for r in (item.lexical_rank, item.dense_rank) if r is not None]
        return min(ranks)
    return sorted(merged.values(), key=lambda item: (best_rank(item), item.chunk_id))


def rerank_context(
    backend,
    index: QuizIndex,
    query: str,
    candidates: list[ScoredChunk],
    final_k: int = 5,
) -> list[ScoredChunk]:
    """Rescore candidates with the pair-relevance model and keep the top
    final_k. When the backend lacks a reranker, fall back to reciprocal-rank
    fusion over the channel ranks: score = sum(1 / (60 + rank)).
    """
    if not candidates:
        raise InputError("rerank_context needs a non-empty candidate list")
    try:
        passages = [index.chunks[index.by_id[c.chunk_id]].text for c in candidates]
        scores = rerank_pairs(backend, query, passages)
        rescored = [
            replace(c, score=s, channel=Channel.RERANK)
            for c, s in zip(candidates, scores)
        ]
    except CapabilityMissingError:
        rescored = [
            replace(c, score=reciprocal_rank_fusion(c), channel=Channel.RERANK)
            for c in candidates
        ]
    rescored.sort(key=lambda item: (-item.score, item.chunk_id))
    return rescored[:final_k]


def reciprocal_rank_fusion(item: ScoredChunk, constant: int = RRF_CONSTANT) -> float:
    score = 0.0
    for rank in (item.lexical_rank, item.dense_rank):
        if rank is not None:
            score += 1.0 / (constant + rank)
    return score


def mmr_select(
    query_embedding: np.ndarray,
    candidates: list[Chunk],
    params: MmrParams = MmrParams(),
) -> MmrResult:
    """Greedy maximal-marginal-relevance selection over embedded chunks.

    The first pick maximizes similarity to the query; every later pick
    maximizes  lam * sim(q, c) - (1 - lam) * max over selected s of sim(c, s).
    Candidates beyond pool_size are dropped first; ties break by ascending
    chunk_id; output preserves selection order.
    """
    pool = candidates[: params.pool_size]
    for chunk in pool:
        if chunk.embedding is None:
            raise InputError(f"candidate {chunk.chunk_id} has no embedding")
    if not pool:
        return MmrResult([], short=True)
    # Pairwise similarities as plain float64 dots: cheap at pool scale and
    # reproducible against a straight-line reimplementation of the greedy rule.
    query = np.asarray(query_embedding, dtype=np.float64)
    vectors = [np.asarray(c.embedding, dtype=np.float64) for c in pool]
    query_sims = [float(np.dot(v, query)) for v in vectors]

    remaining = list(range(len(pool)))
    selected: list[int] = []
    picks: list[ScoredChunk] = []
    target = min(params.select_count, len(pool))
    while len(picks) < target:
        if not picks:
            best = min(remaining, key=lambda i: (-query_sims[i], pool[i].chunk_id))
            score = query_sims[best]
        else:
            def mmr_value(i: int) -> float:
                penalty = max(float(np.dot(vectors[j], vectors[i])) for j in selected)
                return params.lam * query_sims[i] - (1.0 - params.lam) * penalty

            best = min(remaining, key=lambda i: (-mmr_value(i), pool[i].chunk_id))
            score = mmr_value(best)
        remaining.remove(best)
        selected.append(best)
        picks.append(ScoredChunk(pool[best].chunk_id, score, Channel.MMR))
    return MmrResult(picks, short=len(pool) < params.select_count)
