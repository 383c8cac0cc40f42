"""Grounded conceptual Q&A: hybrid retrieval, rerank, structured generation.

The prompt is a fixed three-message structure: a system message carrying the
tutoring role, a developer message carrying grounding constraints plus the
retrieved context block, and the learner's query verbatim as the user
message. Insufficient support is both instructed in the prompt and enforced
as a measurable flag on the result.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass

from ace.corpus.index import HybridIndex
from ace.errors import InputError
from ace.gateway.ops import chat_complete, embed_texts
from ace.gateway.types import ChatMessage, Role, make_request, render_prompt
from ace.prompts import PromptPack
from ace.retrieval import ScoredChunk, hybrid_candidates, rerank_context

log = logging.getLogger(__name__)

NO_EVIDENCE_DIRECTIVE = (
    "No course excerpts matched this question. Tell the learner plainly that "
    "the course material does not cover it; do not invent an answer."
)

WEAK_EVIDENCE_DIRECTIVE = (
    "The retrieved excerpts are only weakly related to the question. Open your "
    "answer by acknowledging that the course material may not sufficiently "
    "cover it, then answer as best the excerpts allow."
)

INSUFFICIENCY_NOTICE = "[insufficient course-material support]"


@dataclass(frozen=True)
class GroundedAnswer:
    answer_text: str
    context_chunks: tuple[tuple[str, float], ...]  # (chunk_id, score) in rank order
    insufficient: bool
    prompt_fingerprint: str


def format_context_block(chunks: list[tuple[str, str]]) -> str:
    """Render (chunk_id, text) pairs as delimited, citable blocks."""
    return "\n\n".join(f"[[chunk {chunk_id}]]\n{text}" for chunk_id, text in chunks)


def assemble_prompt(
    query: str,
    context_chunks: list[tuple[str, str]],
    prompts: PromptPack,
    weak_evidence: bool = False,
) -> list[ChatMessage]:
    """Build the three-message prompt; the query rides verbatim in the user
    message, so delimiter-like characters in it need no escaping."""
    if context_chunks:
        block = format_context_block(context_chunks)
        if weak_evidence:
            block = WEAK_EVIDENCE_DIRECTIVE + "\n\n" + block
    else:
        block = NO_EVIDENCE_DIRECTIVE
    return [
        ChatMessage(Role.SYSTEM, prompts.render("qa_system")),
        ChatMessage(Role.DEVELOPER, prompts.render("qa_developer", context_block=block)),
        ChatMessage(Role.USER, query),
    ]


class QaPipeline:
    def __init__(
        self,
        backend,
        index: HybridIndex,
        prompts: PromptPack | None = None,
        k_per_channel: int = 20,
        final_k: int = 5,
        insufficiency_threshold: float = 0.15,
    ):
        self.backend = backend
        self.index = index
        self.prompts = prompts or PromptPack()
        self.k_per_channel = k_per_channel
        self.final_k = final_k
        self.insufficiency_threshold = insufficiency_threshold

    def answer_conceptual(self, query: str) -> GroundedAnswer:
        if not query or not query.strip():
            raise InputError("cannot answer an empty query")
        query_vec = embed_texts(self.backend, [query])[0]
        candidates = hybrid_candidates(self.index, query, query_vec, self.k_per_channel)
        if not candidates:
            messages = assemble_prompt(query, [], self.prompts)
            fingerprint = _fingerprint(messages)
            log.info("qa: empty candidate pool, no generation call made")
            return GroundedAnswer(
                answer_text=f"{INSUFFICIENCY_NOTICE} The course material does not "
                "appear to cover this question, so I cannot give a grounded answer.",
                context_chunks=(),
                insufficient=True,
                prompt_fingerprint=fingerprint,
            )
        ranked = rerank_context(self.backend, self.index, query, candidates, self.final_k)
        # Fusion-fallback scores are rank reciprocals, not relevance estimates,
        # so the threshold gate only applies when a real reranker scored them.
        rerank_available = self.backend.profile.rerank_model is not None
        weak = rerank_available and ranked[0].score < self.insufficiency_threshold
        pairs = [(c.chunk_id, self._chunk_text(c)) for c in ranked]
        messages = assemble_prompt(query, pairs, self.prompts, weak_evidence=weak)
        request = make_request(self.backend.profile.chat_model, messages, temperature=0.0)
        answer = chat_complete(self.backend, request)
        if weak:
            answer = f"{INSUFFICIENCY_NOTICE} {answer}"
        return GroundedAnswer(
            answer_text=answer,
            context_chunks=tuple((c.chunk_id, c.score) for c in ranked),
            insufficient=weak,
            prompt_fingerprint=_fingerprint(messages),
        )

    def _chunk_text(self, scored: ScoredChunk) -> str:
        return self.index.chunks[self.index.by_id[scored.chunk_id]].text


def _fingerprint(messages: list[ChatMessage]) -> str:
    return hashlib.sha256(render_prompt(messages).encode("utf-8")).hexdigest()
