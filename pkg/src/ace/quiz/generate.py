"""Model-backed steps of quiz construction.

Subtopic decomposition and semantic item validation run on the compact
validator backend; framework extraction and item synthesis run on the
generator backend. All calls are temperature 0 with JSON contracts.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

from ace.corpus.index import Chunk, QuizIndex
from ace.errors import (
    AceError,
    DecompositionError,
    FrameworkError,
    InputError,
    SynthesisError,
)
from ace.gateway.ops import chat_complete, embed_texts
from ace.gateway.types import ChatMessage, Role, make_request
from ace.parsing import extract_json_value
from ace.prompts import PromptPack
from ace.quiz.items import Bloom, ValidationResult, check_structure
from ace.retrieval import MmrParams, mmr_select

log = logging.getLogger(__name__)

FRAMEWORK_KEYS = ("mechanisms", "misconceptions", "constraints", "tradeoffs")


@dataclass(frozen=True)
class ConceptFramework:
    mechanisms: tuple[str, ...]
    misconceptions: tuple[str, ...]
    constraints: tuple[str, ...]
    tradeoffs: tuple[str, ...]

    def as_dict(self) -> dict:
        return {key: list(getattr(self, key)) for key in FRAMEWORK_KEYS}


@dataclass
class Decomposition:
    subtopics: list[str]
    shortfall: bool


class QuizGenerator:
    def __init__(
        self,
        generator_backend,
        validator_backend,
        index: QuizIndex,
        prompts: PromptPack | None = None,
        mmr_params: MmrParams = MmrParams(),
    ):
        self.generator = generator_backend
        self.validator = validator_backend
        self.index = index
        self.prompts = prompts or PromptPack()
        self.mmr_params = mmr_params

    # -- subtopic decomposition ------------------------------------------

    def decompose_topic(self, topic: str) -> Decomposition:
        """Ask the validator model for five subtopics; pad by one re-prompt,
        then accept three or more with a shortfall flag."""
        if not topic or not topic.strip():
            raise InputError("topic must be non-empty")
        subtopics = self._request_subtopics(topic)
        if len(subtopics) < 5:
            retry = self._request_subtopics(topic, nudge=True)
            for candidate in retry:
                if candidate.lower() not in {s.lower() for s in subtopics}:
                    subtopics.append(candidate)
        if len(subtopics) >= 5:
            return Decomposition(subtopics[:5], shortfall=False)
        if len(subtopics) >= 3:
            log.warning("decomposition shortfall for %r: %d subtopics", topic, len(subtopics))
            return Decomposition(subtopics, shortfall=True)
        raise DecompositionError(f"could not decompose topic {topic!r}")

    def _request_subtopics(self, topic: str, nudge: bool = False) -> list[str]:
        prompt = self.prompts.render("quiz_decompose", topic=topic)
        if nudge:
            prompt += "\nReturn exactly five distinct subtopics as a JSON list."
        request = make_request(
            self.validator.profile.chat_model,
            [ChatMessage(Role.SYSTEM, prompt), ChatMessage(Role.USER, topic)],
            temperature=0.0,
        )
        try:
            raw = chat_complete(self.validator, request)
        except AceError as exc:
            raise DecompositionError(f"decomposition call failed: {exc}") from exc
        value = extract_json_value(raw)
        if not isinstance(value, list):
            return []
        out: list[str] = []
        seen = set()
        for entry in value:
            if isinstance(entry, str) and entry.strip():
                key = entry.strip().lower()
                if key not in seen:
                    seen.add(key)
                    out.append(entry.strip())
        return out

    # -- context retrieval ------------------------------------------------

    def retrieve_quiz_context(self, subtopic: str) -> tuple[list[Chunk], bool]:
        """Dense top-pool for the subtopic, diversified down by MMR.

        Returns the selected chunks in MMR order plus a flag marking an
        index too small to fill the selection quota.
        """
        query_vec = embed_texts(self.generator, [subtopic])[0]
        pool_scored = _dense_pool(self.index, query_vec, self.mmr_params.pool_size)
        pool = [self.index.chunks[self.index.by_id[s.chunk_id]] for s in pool_scored]
        result = mmr_select(query_vec, pool, self.mmr_params)
        chunks = [self.index.chunks[self.index.by_id[s.chunk_id]] for s in result.selected]
        return chunks, result.short

    # -- framework and synthesis ------------------------------------------

    def build_concept_framework(self, chunks: list[Chunk]) -> ConceptFramework:
        if not chunks:
            raise InputError("need at least one chunk to build a framework")
        context = "\n\n".join(c.text for c in chunks)
        request = make_request(
            self.generator.profile.chat_model,
            [
                ChatMessage(Role.SYSTEM, self.prompts.render("quiz_framework", context=context)),
                ChatMessage(Role.USER, "Build the concept framework."),
            ],
            temperature=0.0,
        )
        raw = chat_complete(self.generator, request)
        value = extract_json_value(raw)
        if not isinstance(value, dict):
            raise FrameworkError("framework output was not a JSON object")
        lists = {}
        for key in FRAMEWORK_KEYS:
            entries = value.get(key, [])
            if not isinstance(entries, list):
                entries = []
            lists[key] = tuple(e.strip() for e in entries if isinstance(e, str) and e.strip())
        if not any(lists.values()):
            raise FrameworkError("framework has no populated lists")
        return ConceptFramework(**lists)

    def synthesize_items(
        self,
        framework: ConceptFramework,
        chunks: list[Chunk],
        bloom_target: Bloom,
        count: int,
        subtopic: str = "",
        avoid_stems: list[str] | None = None,
    ) -> list[dict]:
        """One generator call for `count` candidate items; elements parse
        independently, so one malformed entry never sinks the batch."""
        if count < 1:
            raise InputError("synthesize_items needs count >= 1")
        context = "\n\n".join(c.text for c in chunks)
        avoid = "\n".join(f"- {s}" for s in (avoid_stems or [])) or "- (none yet)"
        prompt = self.prompts.render(
            "quiz_synthesize",
            count=str(count),
            bloom=bloom_target.value,
            subtopic=subtopic,
            avoid=avoid,
            framework=json.dumps(framework.as_dict(), indent=2),
            context=context,
        )
        request = make_request(
            self.generator.profile.chat_model,
            [
                ChatMessage(Role.SYSTEM, prompt),
                ChatMessage(Role.USER, f"Write the {count} items now."),
            ],
            temperature=0.0,
            max_tokens=4096,
        )
        raw = chat_complete(self.generator, request)
        value = extract_json_value(raw)
        if not isinstance(value, list):
            raise SynthesisError("synthesis output was not a JSON array")
        drafts = []
        rejected = 0
        for element in value:
            if isinstance(element, dict):
                element.setdefault("subtopic", subtopic)
                element.setdefault("source_chunk_ids", [c.chunk_id for c in chunks[:5]])
                drafts.append(element)
            else:
                rejected += 1
        if rejected:
            log.info("synthesis: %d elements were not objects; dropped", rejected)
        if not drafts:
            raise SynthesisError("synthesis produced zero parseable items")
        return drafts

    # -- validation --------------------------------------------------------

    def validate_item(self, draft: dict) -> ValidationResult:
        """Structural rules first (no model call on failure), then one
        validator call for Bloom alignment and multi-concept coverage."""
        reasons, item = check_structure(draft)
        if reasons:
            return ValidationResult(status="rejected", reasons=reasons)
        payload = {
            "stem": item.stem,
            "options": dict(item.options),
            "correct_label": item.correct_label,
            "bloom": item.bloom.value,
            "concepts": list(item.concepts),
        }
        request = make_request(
            self.validator.profile.chat_model,
            [
                ChatMessage(
                    Role.SYSTEM,
                    self.prompts.render("quiz_validate", item=json.dumps(payload, indent=2)),
                ),
                ChatMessage(Role.USER, "Validate the item."),
            ],
            temperature=0.0,
        )
        try:
            raw = chat_complete(self.validator, request)
        except AceError as exc:
            log.warning("item validator call failed (%s); item held unverified", exc)
            return ValidationResult(status="unverified", reasons=["validator unavailable"], item=item)
        verdict = extract_json_value(raw)
        if not isinstance(verdict, dict) or not {"bloom_ok", "multi_concept_ok"} <= set(verdict):
            return ValidationResult(status="unverified", reasons=["validator output unparseable"], item=item)
        reasons = []
        if not verdict["bloom_ok"]:
            reasons.append("bloom alignment")
        if not verdict["multi_concept_ok"]:
            reasons.append("multi-concept coverage")
        if reasons:
            return ValidationResult(status="rejected", reasons=reasons, item=item)
        return ValidationResult(status="accepted", item=item)


def _dense_pool(index: QuizIndex, query_vec, k: int):
    from ace.retrieval import dense_search

    return dense_search(index, query_vec, min(k, len(index)))
