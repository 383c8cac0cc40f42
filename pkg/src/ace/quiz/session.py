"""Adaptive quiz session: difficulty ladder, grading, transcript export.

Difficulty moves one rung up the Bloom ladder on a correct answer and one
rung down otherwise, clamped at both ends. Items are drawn from per-level
queues refilled by synthesis on demand; stems are deduplicated across the
whole session.
"""

from __future__ import annotations

import logging
import uuid
from dataclasses import dataclass, field
from enum import Enum

from ace.errors import AceError, DecompositionError, InputError, SessionError
from ace.quiz.generate import QuizGenerator
from ace.quiz.items import (
    BLOOM_LADDER,
    OPTION_LABELS,
    Bloom,
    QuizItem,
    normalized_stem_hash,
)

log = logging.getLogger(__name__)

ITEMS_PER_CALL = 3


class FeedbackMode(str, Enum):
    CONFIRM = "confirm"
    CORRECTIVE_WITH_RATIONALE = "corrective_with_rationale"


def next_difficulty(current: Bloom, answered_correctly: bool) -> tuple[Bloom, FeedbackMode]:
    """Pure ladder step: up on correct (clamp Create), down otherwise (clamp Apply)."""
    position = BLOOM_LADDER.index(current)
    if answered_correctly:
        return BLOOM_LADDER[min(position + 1, len(BLOOM_LADDER) - 1)], FeedbackMode.CONFIRM
    return BLOOM_LADDER[max(position - 1, 0)], FeedbackMode.CORRECTIVE_WITH_RATIONALE


@dataclass
class GradedRecord:
    stem_hash: str
    learner_label: str
    correct: bool
    bloom: Bloom
    feedback_mode: FeedbackMode
    correct_label: str
    correct_text: str
    chosen_rationale: str | None  # rationale of the picked distractor, wrong answers only


@dataclass
class ItemRecord:
    item: QuizItem
    verdict: str
    reasons: list[str] = field(default_factory=list)
    delivered: bool = False


@dataclass
class QuizSession:
    topic: str
    subtopic: str
    subtopics: list[str]
    shortfall: bool
    session_id: str = field(default_factory=lambda: uuid.uuid4().hex)
    current_bloom: Bloom = Bloom.APPLY
    history: list[GradedRecord] = field(default_factory=list)
    item_queue: dict[Bloom, list[QuizItem]] = field(
        default_factory=lambda: {b: [] for b in BLOOM_LADDER}
    )
    pending: QuizItem | None = None
    seen_stems: list[str] = field(default_factory=list)
    seen_hashes: set = field(default_factory=set)
    items_log: list[ItemRecord] = field(default_factory=list)
    bloom_trajectory: list[Bloom] = field(default_factory=list)
    context_short: bool = False

    @property
    def exhausted(self) -> bool:
        return self.pending is None


class QuizEngine:
    """Session-level orchestration on top of a QuizGenerator."""

    def __init__(self, generator: QuizGenerator, items_per_call: int = ITEMS_PER_CALL):
        self.generator = generator
        self.items_per_call = items_per_call
        self._contexts: dict[str, list] = {}
        self._frameworks: dict[str, object] = {}

    def start_session(
        self,
        topic: str,
        subtopic_index: int = 0,
        start_bloom: Bloom = Bloom.APPLY,
    ) -> QuizSession:
        if not topic or not topic.strip():
            raise InputError("topic must be non-empty")
        try:
            decomposition = self.generator.decompose_topic(topic)
            subtopics, shortfall = decomposition.subtopics, decomposition.shortfall
        except DecompositionError:
            log.warning("decomposition failed for %r; using raw topic", topic)
            subtopics, shortfall = [topic.strip()], True
        if not 0 <= subtopic_index < len(subtopics):
            subtopic_index = 0
        session = QuizSession(
            topic=topic.strip(),
            subtopic=subtopics[subtopic_index],
            subtopics=subtopics,
            shortfall=shortfall,
            current_bloom=start_bloom,
        )
        session.bloom_trajectory.append(session.current_bloom)
        chunks, short = self.generator.retrieve_quiz_context(session.subtopic)
        session.context_short = short
        self._contexts[session.session_id] = chunks
        self._frameworks[session.session_id] = self.generator.build_concept_framework(chunks)
        self._refill(session, session.current_bloom)
        session.pending = self._draw(session, session.current_bloom)
        return session

    def grade_answer(self, session: QuizSession, learner_label: str) -> GradedRecord:
        if session.pending is None:
            raise SessionError("no pending item to grade")
        label = (learner_label or "").strip().upper()
        if label not in OPTION_LABELS:
            raise InputError(f"answer label must be one of {OPTION_LABELS}, got {learner_label!r}")
        item = session.pending
        correct = label == item.correct_label
        new_bloom, feedback_mode = next_difficulty(session.current_bloom, correct)
        record = GradedRecord(
            stem_hash=normalized_stem_hash(item.stem),
            learner_label=label,
            correct=correct,
            bloom=session.current_bloom,
            feedback_mode=feedback_mode,
            correct_label=item.correct_label,
            correct_text=item.option_text(item.correct_label),
            chosen_rationale=None if correct else item.rationale_for(label),
        )
        session.history.append(record)
        session.current_bloom = new_bloom
        session.bloom_trajectory.append(new_bloom)
        session.pending = self._draw(session, new_bloom)
        return record

    # -- queue plumbing ----------------------------------------------------

    def _draw(self, session: QuizSession, bloom: Bloom) -> QuizItem | None:
        queue = session.item_queue[bloom]
        if not queue:
            self._refill(session, bloom)
            queue = session.item_queue[bloom]
        if not queue:
            log.warning("session %s: no items available at %s", session.session_id, bloom.value)
            return None
        item = queue.pop(0)
        for record in session.items_log:
            if record.item is item:
                record.delivered = True
        return item

    def _refill(self, session: QuizSession, bloom: Bloom) -> None:
        chunks = self._contexts.get(session.session_id, [])
        framework = self._frameworks.get(session.session_id)
        if framework is None:
            return
        try:
            drafts = self.generator.synthesize_items(
                framework,
                chunks,
                bloom,
                self.items_per_call,
                subtopic=session.subtopic,
                avoid_stems=session.seen_stems,
            )
        except AceError as exc:
            log.warning("session %s: synthesis at %s failed: %s", session.session_id, bloom.value, exc)
            return
        for draft in drafts:
            result = self.generator.validate_item(draft)
            if result.item is not None:
                session.items_log.append(
                    ItemRecord(item=result.item, verdict=result.status, reasons=result.reasons)
                )
            if not result.accepted:
                continue
            stem_hash = normalized_stem_hash(result.item.stem)
            if stem_hash in session.seen_hashes:
                continue
            session.seen_hashes.add(stem_hash)
            session.seen_stems.append(result.item.stem)
            session.item_queue[bloom].append(result.item)

    # -- transcript ----------------------------------------------------------

    def to_transcript(self, session: QuizSession) -> dict:
        """Serializable session record; feeds the coverage metrics."""
        return {
            "kind": "quiz",
            "session_id": session.session_id,
            "topic": session.topic,
            "subtopic": session.subtopic,
            "subtopics": session.subtopics,
            "shortfall": session.shortfall,
            "context_short": session.context_short,
            "items": [
                {
                    "stem": rec.item.stem,
                    "options": dict(rec.item.options),
                    "correct_label": rec.item.correct_label,
                    "distractor_rationales": dict(rec.item.distractor_rationales),
                    "bloom": rec.item.bloom.value,
                    "concepts": list(rec.item.concepts),
                    "subtopic": rec.item.subtopic or session.subtopic,
                    "relevance": rec.item.relevance,
                    "source_chunk_ids": list(rec.item.source_chunk_ids),
                    "verdict": rec.verdict,
                    "reject_reasons": rec.reasons,
                    "delivered": rec.delivered,
                }
                for rec in session.items_log
            ],
            "history": [
                {
                    "stem_hash": rec.stem_hash,
                    "learner_label": rec.learner_label,
                    "correct": rec.correct,
                    "bloom": rec.bloom.value,
                    "feedback_mode": rec.feedback_mode.value,
                }
                for rec in session.history
            ],
            "bloom_trajectory": [b.value for b in session.bloom_trajectory],
        }
