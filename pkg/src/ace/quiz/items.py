"""Quiz item model and the rule-based half of item validation.

Structural validity is checked entirely by rules here (option shape, label
set, rationales, Bloom enum membership, stem length); the semantic half
(Bloom alignment, multi-concept coverage) lives in the generator module
because it needs a validator-model call.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from enum import Enum


class Bloom(str, Enum):
    APPLY = "Apply"
    ANALYSE = "Analyse"
    EVALUATE = "Evaluate"
    CREATE = "Create"


BLOOM_LADDER = (Bloom.APPLY, Bloom.ANALYSE, Bloom.EVALUATE, Bloom.CREATE)

OPTION_LABELS = ("A", "B", "C", "D")

_BLOOM_ALIASES = {
    "apply": Bloom.APPLY,
    "analyse": Bloom.ANALYSE,
    "analyze": Bloom.ANALYSE,
    "evaluate": Bloom.EVALUATE,
    "create": Bloom.CREATE,
}


def parse_bloom(value) -> Bloom | None:
    if isinstance(value, Bloom):
        return value
    if isinstance(value, str):
        return _BLOOM_ALIASES.get(value.strip().lower())
    return None


@dataclass(frozen=True)
class QuizItem:
    stem: str
    options: tuple[tuple[str, str], ...]  # ((label, text), ...) in A-D order
    correct_label: str
    distractor_rationales: tuple[tuple[str, str], ...]  # per incorrect label
    bloom: Bloom
    concepts: tuple[str, ...]
    subtopic: str = ""
    relevance: float = 1.0
    source_chunk_ids: tuple[str, ...] = ()

    def option_text(self, label: str) -> str:
        for opt_label, text in self.options:
            if opt_label == label:
                return text
        raise KeyError(label)

    def rationale_for(self, label: str) -> str | None:
        for opt_label, text in self.distractor_rationales:
            if opt_label == label:
                return text
        return None


def normalized_stem_hash(stem: str) -> str:
    """Hash used to deduplicate near-identical stems across a session."""
    normalized = re.sub(r"[^0-9a-z]+", " ", stem.lower()).strip()
    return hashlib.sha256(normalized.encode("utf-8")).hexdigest()


@dataclass
class ValidationResult:
    status: str  # "accepted" | "rejected" | "unverified"
    reasons: list[str] = field(default_factory=list)
    item: QuizItem | None = None

    @property
    def accepted(self) -> bool:
        return self.status == "accepted"


def check_structure(draft: dict) -> tuple[list[str], QuizItem | None]:
    """Apply every rule-based check; returns (reasons, item-if-clean).

    The returned item is only built when zero reasons were found.
    """
    reasons: list[str] = []

    stem = draft.get("stem")
    if not isinstance(stem, str) or len(stem.strip()) < 10:
        reasons.append("stem too short")
        stem = stem if isinstance(stem, str) else ""

    options = draft.get("options")
    normalized_options: dict[str, str] = {}
    if isinstance(options, dict):
        for label, text in options.items():
            if isinstance(label, str):
                normalized_options[label.strip().upper()] = text
    if set(normalized_options.keys()) != set(OPTION_LABELS):
        reasons.append("option count")
    else:
        texts = []
        for label in OPTION_LABELS:
            text = normalized_options[label]
            if not isinstance(text, str) or not text.strip():
                reasons.append(f"option {label} text missing")
            else:
                texts.append(text.strip())
        if len(texts) == 4 and len({t.lower() for t in texts}) < 4:
            reasons.append("duplicate option text")

    correct = draft.get("correct_label")
    correct = correct.strip().upper() if isinstance(correct, str) else None
    if correct not in OPTION_LABELS:
        reasons.append("correct label")

    bloom = parse_bloom(draft.get("bloom"))
    if bloom is None:
        reasons.append("bloom enum")

    rationales = draft.get("distractor_rationales")
    normalized_rationales: dict[str, str] = {}
    if isinstance(rationales, dict):
        for label, text in rationales.items():
            if isinstance(label, str) and isinstance(text, str) and text.strip():
                normalized_rationales[label.strip().upper()] = text.strip()
    if correct in OPTION_LABELS:
        missing = [l for l in OPTION_LABELS if l != correct and l not in normalized_rationales]
        if missing:
            reasons.append("distractor rationales")

    concepts_raw = draft.get("concepts")
    concepts = []
    if isinstance(concepts_raw, list):
        concepts = [c.strip() for c in concepts_raw if isinstance(c, str) and c.strip()]
    if not concepts:
        reasons.append("concepts missing")

    if reasons:
        return reasons, None

    relevance = draft.get("relevance", 1.0)
    try:
        relevance = max(0.0, float(relevance))
    except (TypeError, ValueError):
        relevance = 1.0
    item = QuizItem(
        stem=stem.strip(),
        options=tuple((l, normalized_options[l].strip()) for l in OPTION_LABELS),
        correct_label=correct,
        distractor_rationales=tuple(
            (l, normalized_rationales[l]) for l in OPTION_LABELS if l != correct
        ),
        bloom=bloom,
        concepts=tuple(concepts),
        subtopic=str(draft.get("subtopic") or ""),
        relevance=relevance,
        source_chunk_ids=tuple(draft.get("source_chunk_ids", ())),
    )
    return [], item
