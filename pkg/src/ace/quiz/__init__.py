"""Adaptive Bloom-tagged quiz generation and session machinery."""

from ace.quiz.generate import ConceptFramework, Decomposition, QuizGenerator
from ace.quiz.items import (
    BLOOM_LADDER,
    OPTION_LABELS,
    Bloom,
    QuizItem,
    ValidationResult,
    check_structure,
    normalized_stem_hash,
    parse_bloom,
)
from ace.quiz.session import (
    FeedbackMode,
    GradedRecord,
    QuizEngine,
    QuizSession,
    next_difficulty,
)

__all__ = [
    "BLOOM_LADDER",
    "Bloom",
    "ConceptFramework",
    "Decomposition",
    "FeedbackMode",
    "GradedRecord",
    "OPTION_LABELS",
    "QuizEngine",
    "QuizGenerator",
    "QuizItem",
    "QuizSession",
    "ValidationResult",
    "check_structure",
    "next_difficulty",
    "normalized_stem_hash",
    "parse_bloom",
]
