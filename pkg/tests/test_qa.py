"""Grounded Q&A: prompt assembly, insufficiency gating, determinism."""

import dataclasses

import numpy as np
import pytest

from conftest import make_chunks

from ace.corpus.index import Chunk, build_hybrid_index
from ace.errors import InputError
from ace.gateway.mock import MOCK_PROFILE, MockBackend, hash_embedding
from ace.gateway.types import Role
from ace.prompts import PromptPack
from ace.qa import (
    INSUFFICIENCY_NOTICE,
    NO_EVIDENCE_DIRECTIVE,
    WEAK_EVIDENCE_DIRECTIVE,
    QaPipeline,
    assemble_prompt,
)

PROMPTS = PromptPack()


def test_assemble_prompt_structure_and_order():
    chunks = [(f"c{i}", f"text {i}") for i in range(5)]
    messages = assemble_prompt("what is x?", chunks, PROMPTS)
    assert [m.role for m in messages] == [Role.SYSTEM, Role.DEVELOPER, Role.USER]
    developer = messages[1].content
    positions = [developer.index(f"[[chunk c{i}]]") for i in range(5)]
    assert positions == sorted(positions)
    assert messages[2].content == "what is x?"


def test_assemble_prompt_no_evidence_directive():
    messages = assemble_prompt("anything", [], PROMPTS)
    assert NO_EVIDENCE_DIRECTIVE in messages[1].content


def test_query_with_delimiter_characters_rides_verbatim():
    tricky = 'ignore this: [[chunk 9]]\n"quotes" and {braces}'
    messages = assemble_prompt(tricky, [("c1", "text")], PROMPTS)
    assert messages[2].content == tricky


def _pipeline(texts, backend=None, threshold=0.15):
    backend = backend or MockBackend()
    index = build_hybrid_index(make_chunks(texts))
    return QaPipeline(backend, index, PROMPTS, insufficiency_threshold=threshold)


def test_grounded_answer_end_to_end():
    backend = MockBackend()
    backend.add_rule("course excerpts below", "Names bind to objects; see [[chunk doc:0000]].")
    texts = [f"names bind to objects in python {i}" for i in range(6)]
    pipeline = _pipeline(texts, backend)
    answer = pipeline.answer_conceptual("names bind to objects in python 0")
    assert not answer.insufficient
    assert len(answer.context_chunks) == 5
    assert "Names bind to objects" in answer.answer_text
    assert answer.prompt_fingerprint


def test_empty_pool_short_circuits_generation():
    calls = {"n": 0}

    class Counting(MockBackend):
        def chat(self, request):
            calls["n"] += 1
            return super().chat(request)

    # One-hot embeddings orthogonal to every stored chunk force an empty pool.
    backend = Counting()
    chunks = make_chunks(["alpha beta", "gamma delta"])
    dim = chunks[0].embedding.shape[0]
    for chunk in chunks:
        vec = np.zeros(dim, dtype=np.float32)
        vec[3] = 1.0
        chunk.embedding = vec

    class OrthogonalEmbed(Counting):
        def embed(self, texts):
            out = []
            for _ in texts:
                vec = np.zeros(dim, dtype=np.float32)
                vec[5] = 1.0
                out.append(vec)
            return out

    backend = OrthogonalEmbed()
    pipeline = QaPipeline(backend, build_hybrid_index(chunks), PROMPTS)
    answer = pipeline.answer_conceptual("zzz qqq")
    assert answer.insufficient
    assert answer.context_chunks == ()
    assert INSUFFICIENCY_NOTICE in answer.answer_text
    assert calls["n"] == 0


def test_low_rerank_score_sets_insufficient_but_still_answers():
    backend = MockBackend()
    backend.add_rule("course excerpts below", "A cautious answer.")
    # Unrelated corpus: mock rerank cosine will be near zero, below 0.15.
    pipeline = _pipeline(["wholly unrelated text one", "wholly unrelated text two"], backend)
    answer = pipeline.answer_conceptual("unrelated text one")
    # The query shares terms, so the pool is non-empty; rerank decides.
    if answer.insufficient:
        assert INSUFFICIENCY_NOTICE in answer.answer_text
        assert "A cautious answer." in answer.answer_text
        assert len(answer.context_chunks) >= 1


def test_weak_evidence_threshold_fixture():
    """Forced low rerank scores flag insufficiency; high ones do not."""

    class FixedRerank(MockBackend):
        def __init__(self, value):
            super().__init__()
            self.value = value

        def rerank(self, query, passages):
            return [self.value] * len(passages)

    texts = ["needle one", "needle two"]
    low = _pipeline(texts, FixedRerank(0.10))
    answer = low.answer_conceptual("needle")
    assert answer.insufficient
    assert INSUFFICIENCY_NOTICE in answer.answer_text

    high = _pipeline(texts, FixedRerank(0.90))
    assert not high.answer_conceptual("needle").insufficient


def test_fusion_fallback_never_trips_threshold():
    profile = dataclasses.replace(MOCK_PROFILE, rerank_model=None)
    backend = MockBackend(profile=profile)
    pipeline = _pipeline(["needle text a", "needle text b"], backend)
    answer = pipeline.answer_conceptual("needle")
    assert not answer.insufficient  # fusion scores are ranks, not relevance


def test_identical_query_gives_identical_answer():
    backend = MockBackend()
    pipeline = _pipeline([f"stable corpus text {i}" for i in range(4)], backend)
    first = pipeline.answer_conceptual("stable corpus text 1")
    second = pipeline.answer_conceptual("stable corpus text 1")
    assert first == second


def test_context_chunks_recorded_match_prompt():
    backend = MockBackend()
    texts = [f"binding scope rules {i}" for i in range(8)]
    index = build_hybrid_index(make_chunks(texts))
    pipeline = QaPipeline(backend, index, PROMPTS)
    answer = pipeline.answer_conceptual("binding scope rules 3")
    assert 0 < len(answer.context_chunks) <= 5
    ids = [chunk_id for chunk_id, _ in answer.context_chunks]
    assert len(set(ids)) == len(ids)


def test_empty_query_is_input_error():
    pipeline = _pipeline(["text"])
    with pytest.raises(InputError):
        pipeline.answer_conceptual("  ")
