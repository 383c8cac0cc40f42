"""Retrieval oracles: BM25 textbook evaluation, brute-force cosine ranking,
hybrid pool union rules, rank fusion, and greedy MMR."""

import dataclasses
import math

import numpy as np
import pytest

from conftest import make_chunks

from ace.corpus.index import Chunk, build_hybrid_index, build_quiz_index
from ace.errors import InputError
from ace.gateway.mock import MOCK_PROFILE, MockBackend, hash_embedding
from ace.retrieval import (
    Channel,
    MmrParams,
    ScoredChunk,
    bm25_search,
    dense_search,
    hybrid_candidates,
    mmr_select,
    rerank_context,
)

# -- independent oracles -----------------------------------------------------


def bm25_oracle(texts: list[str], query: str, k1=1.2, b=0.75) -> list[float]:
    """Direct textbook evaluation over the same tokenization rules."""
    import re

    def toks(t):
        return [w for w in re.split(r"[^0-9a-z]+", t.lower()) if w]

    docs = [toks(t) for t in texts]
    n = len(docs)
    avgdl = sum(len(d) for d in docs) / n
    scores = []
    for doc in docs:
        score = 0.0
        for term in sorted(set(toks(query))):
            tf = doc.count(term)
            if tf == 0:
                continue
            df = sum(1 for d in docs if term in d)
            idf = math.log(1 + (n - df + 0.5) / (df + 0.5))
            score += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len(doc) / avgdl))
        scores.append(score)
    return scores


def mmr_oracle(query, chunks, lam, select_count):
    """Straight-line greedy reimplementation of the MMR rule."""
    vectors = [np.asarray(c.embedding, dtype=np.float64) for c in chunks]
    q = np.asarray(query, dtype=np.float64)
    qsims = [float(np.dot(v, q)) for v in vectors]
    remaining = list(range(len(chunks)))
    selected = []
    while remaining and len(selected) < select_count:
        if not selected:
            best = min(remaining, key=lambda i: (-qsims[i], chunks[i].chunk_id))
        else:
            def value(i):
                penalty = max(float(np.dot(vectors[j], vectors[i])) for j in selected)
                return lam * qsims[i] - (1 - lam) * penalty

            best = min(remaining, key=lambda i: (-value(i), chunks[i].chunk_id))
        remaining.remove(best)
        selected.append(best)
    return [chunks[i].chunk_id for i in selected]


# -- BM25 ---------------------------------------------------------------------


def test_bm25_matches_textbook_oracle_on_toy_corpus():
    texts = ["a b", "b c", "c d"]
    index = build_hybrid_index(make_chunks(texts))
    hits = bm25_search(index, "c", k=2)
    oracle = bm25_oracle(texts, "c")
    assert [h.chunk_id for h in hits] == ["doc:0001", "doc:0002"]  # tie -> id order
    assert hits[0].score == pytest.approx(oracle[1], abs=1e-12)
    assert hits[1].score == pytest.approx(oracle[2], abs=1e-12)


def test_bm25_absent_term_gives_empty_result():
    index = build_hybrid_index(make_chunks(["a b", "b c"]))
    assert bm25_search(index, "zzz", k=5) == []


def test_bm25_k_larger_than_corpus_clamps():
    index = build_hybrid_index(make_chunks(["b x", "b y", "a z"]))
    hits = bm25_search(index, "b", k=50)
    assert len(hits) == 2


def test_bm25_channel_and_rank_tags():
    index = build_hybrid_index(make_chunks(["q one", "q two"]))
    hits = bm25_search(index, "q", k=2)
    assert all(h.channel == Channel.LEXICAL for h in hits)
    assert [h.lexical_rank for h in hits] == [1, 2]


# -- dense ----------------------------------------------------------------------


def test_dense_self_similarity_first():
    index = build_quiz_index(make_chunks([f"text {i}" for i in range(5)]))
    hits = dense_search(index, index.chunks[3].embedding, k=5)
    assert hits[0].chunk_id == "doc:0003"
    assert abs(hits[0].score - 1.0) < 1e-6


def test_dense_orthogonal_query_scores_near_zero():
    chunks = make_chunks(["aaa", "bbb"])
    dim = chunks[0].embedding.shape[0]
    # Project onto the null space of the stored vectors.
    basis = np.stack([c.embedding for c in chunks]).astype(np.float64)
    candidate = np.ones(dim)
    candidate = candidate - basis.T @ np.linalg.pinv(basis.T) @ candidate
    query = (candidate / np.linalg.norm(candidate)).astype(np.float32)
    hits = dense_search(build_quiz_index(chunks), query, k=2)
    assert all(abs(h.score) < 1e-5 for h in hits)


def test_dense_matches_brute_force_sort():
    index = build_quiz_index(make_chunks([f"passage number {i}" for i in range(10)]))
    query = hash_embedding("some query")
    hits = dense_search(index, query, k=3)
    brute = sorted(
        index.chunks,
        key=lambda c: (-float(np.dot(c.embedding, query)), c.chunk_id),
    )[:3]
    assert [h.chunk_id for h in hits] == [c.chunk_id for c in brute]


def test_dense_dim_mismatch_is_input_error():
    index = build_quiz_index(make_chunks(["abc"]))
    with pytest.raises(InputError):
        dense_search(index, np.ones(3, dtype=np.float32), k=1)


# -- hybrid union -----------------------------------------------------------------


def _one_hot(i, dim=8):
    vec = np.zeros(dim, dtype=np.float32)
    vec[i] = 1.0
    return vec


def _chunk(cid, text, vec):
    return Chunk(
        chunk_id=cid,
        doc_id="d",
        text=text,
        char_span=(0, len(text)),
        token_estimate=max(1, len(text.split())),
        embedding=vec,
    )


def test_fully_overlapping_channels_dedupe_to_k():
    query_vec = _one_hot(0)
    chunks = [_chunk(f"c{i:02d}", f"needle filler{i}", query_vec) for i in range(20)]
    index = build_hybrid_index(chunks)
    pool = hybrid_candidates(index, "needle", query_vec, k_per_channel=20)
    assert len(pool) == 20
    assert len({p.chunk_id for p in pool}) == 20


def test_disjoint_channels_union_to_forty():
    query_vec = _one_hot(0)
    lexical_only = [_chunk(f"lex{i:02d}", f"needle text{i}", _one_hot(1 + i % 7)) for i in range(20)]
    dense_only = [_chunk(f"den{i:02d}", f"other text{i}", query_vec) for i in range(20)]
    index = build_hybrid_index(lexical_only + dense_only)
    pool = hybrid_candidates(index, "needle", query_vec, k_per_channel=20)
    assert len(pool) == 40
    channels = {p.chunk_id: p for p in pool}
    assert all(channels[f"lex{i:02d}"].lexical_rank is not None for i in range(20))
    assert all(channels[f"den{i:02d}"].dense_rank is not None for i in range(20))


def test_no_lexical_match_yields_dense_only():
    query_vec = _one_hot(0)
    chunks = [_chunk(f"c{i}", f"plain words {i}", query_vec) for i in range(5)]
    index = build_hybrid_index(chunks)
    pool = hybrid_candidates(index, "zzzz", query_vec, k_per_channel=20)
    assert len(pool) == 5
    assert all(p.lexical_rank is None for p in pool)


def test_nonpositive_dense_scores_leave_pool_empty():
    query_vec = _one_hot(0)
    chunks = [_chunk(f"c{i}", f"words {i}", _one_hot(1)) for i in range(3)]
    index = build_hybrid_index(chunks)
    pool = hybrid_candidates(index, "zzzz", query_vec, k_per_channel=20)
    assert pool == []


# -- rerank and fusion ---------------------------------------------------------------


def test_rerank_returns_exactly_final_k():
    backend = MockBackend()
    texts = [f"passage about topic {i}" for i in range(40)]
    index = build_hybrid_index(make_chunks(texts))
    query = "passage about topic 7"
    pool = hybrid_candidates(index, query, hash_embedding(query), k_per_channel=20)
    top = rerank_context(backend, index, query, pool, final_k=5)
    assert len(top) == 5
    assert all(t.channel == Channel.RERANK for t in top)


def test_mock_rerank_order_equals_dense_order():
    backend = MockBackend()
    texts = [f"unique passage {i}" for i in range(10)]
    index = build_quiz_index(make_chunks(texts))
    query = "what is in unique passage 3"
    qvec = hash_embedding(query)
    dense = dense_search(index, qvec, k=10)
    top = rerank_context(backend, index, query, list(dense), final_k=5)
    assert [t.chunk_id for t in top] == [d.chunk_id for d in dense[:5]]


def test_fusion_fallback_arithmetic_and_oracle():
    profile = dataclasses.replace(MOCK_PROFILE, rerank_model=None)
    backend = MockBackend(profile=profile)
    index = build_hybrid_index(make_chunks(["x"]))  # texts unused by fusion
    both_rank_one = ScoredChunk("a", 1.0, Channel.DENSE, lexical_rank=1, dense_rank=1)
    lex_only = ScoredChunk("b", 1.0, Channel.LEXICAL, lexical_rank=2)
    dense_only = ScoredChunk("c", 1.0, Channel.DENSE, dense_rank=3)
    index.by_id = {"a": 0, "b": 0, "c": 0}
    top = rerank_context(backend, index, "q", [both_rank_one, lex_only, dense_only], final_k=3)
    scores = {t.chunk_id: t.score for t in top}
    assert scores["a"] == pytest.approx(2 / 61, abs=1e-12)
    assert scores["b"] == pytest.approx(1 / 62, abs=1e-12)
    assert scores["c"] == pytest.approx(1 / 63, abs=1e-12)
    assert [t.chunk_id for t in top] == ["a", "b", "c"]


# -- MMR ------------------------------------------------------------------------------


def test_mmr_first_pick_is_nearest_neighbor():
    chunks = make_chunks(["alpha", "beta", "gamma"])
    query = chunks[2].embedding
    result = mmr_select(query, chunks, MmrParams(lam=0.7, pool_size=3, select_count=2))
    assert result.selected[0].chunk_id == chunks[2].chunk_id


def test_mmr_hand_arithmetic_example():
    gram = np.array([[1.0, 0.9, 0.8], [0.9, 1.0, 0.95], [0.8, 0.95, 1.0]])
    coords = np.linalg.cholesky(gram)
    query, c1_vec, c2_vec = coords[0], coords[1], coords[2]
    chunks = [
        _chunk("c1", "one", c1_vec.astype(np.float32)),
        _chunk("c2", "two", c2_vec.astype(np.float32)),
    ]
    result = mmr_select(
        query.astype(np.float32), chunks, MmrParams(lam=0.7, pool_size=2, select_count=2)
    )
    assert [s.chunk_id for s in result.selected] == ["c1", "c2"]
    assert result.selected[1].score == pytest.approx(0.7 * 0.8 - 0.3 * 0.95, abs=1e-5)


def test_mmr_lambda_one_is_pure_similarity_ranking():
    chunks = make_chunks([f"text {i}" for i in range(8)])
    query = hash_embedding("a query")
    result = mmr_select(query, chunks, MmrParams(lam=1.0, pool_size=8, select_count=8))
    ranking = sorted(
        chunks, key=lambda c: (-float(np.dot(np.float64(c.embedding), np.float64(query))), c.chunk_id)
    )
    assert [s.chunk_id for s in result.selected] == [c.chunk_id for c in ranking]


def test_mmr_lambda_zero_second_pick_minimizes_max_similarity():
    chunks = make_chunks([f"entry {i}" for i in range(6)])
    query = chunks[0].embedding
    result = mmr_select(query, chunks, MmrParams(lam=0.0, pool_size=6, select_count=2))
    first = result.selected[0].chunk_id
    first_vec = next(c.embedding for c in chunks if c.chunk_id == first)
    sims = {
        c.chunk_id: float(np.dot(np.float64(c.embedding), np.float64(first_vec)))
        for c in chunks
        if c.chunk_id != first
    }
    best = min(sims, key=lambda cid: (sims[cid], cid))
    assert result.selected[1].chunk_id == best


def test_mmr_matches_greedy_oracle_on_random_instances():
    rng = np.random.default_rng(7)
    for trial in range(50):
        n = int(rng.integers(2, 13))
        dim = int(rng.integers(3, 9))
        vectors = rng.standard_normal((n, dim))
        vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
        chunks = [
            _chunk(f"t{trial}c{i:02d}", f"text {i}", vectors[i].astype(np.float32))
            for i in range(n)
        ]
        query = rng.standard_normal(dim)
        query = (query / np.linalg.norm(query)).astype(np.float32)
        select = int(rng.integers(1, n + 1))
        lam = float(rng.uniform(0, 1))
        result = mmr_select(query, chunks, MmrParams(lam=lam, pool_size=n, select_count=select))
        assert [s.chunk_id for s in result.selected] == mmr_oracle(query, chunks, lam, select)


def test_mmr_short_pool_returns_all_flagged():
    chunks = make_chunks(["only", "two"])
    result = mmr_select(chunks[0].embedding, chunks, MmrParams(lam=0.7, pool_size=50, select_count=25))
    assert len(result.selected) == 2
    assert result.short


def test_mmr_defaults_select_25_of_50():
    chunks = make_chunks([f"passage {i}" for i in range(60)])
    query = hash_embedding("topic")
    result = mmr_select(query, chunks, MmrParams())
    assert len(result.selected) == 25
    assert not result.short
