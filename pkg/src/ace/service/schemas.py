"""Pydantic request/response models for the HTTP JSON API.

Response shapes are a stability contract (the web client and the golden-file
tests both depend on them). Grading data for the pending quiz item (correct
label, rationales) never appears in a response until the item is graded, and
no backend credential is ever serialized.
"""

from __future__ import annotations

from pydantic import BaseModel, Field

from ace.router import RouteLabel

# Compact API names for route labels (stable across renames of enum values).
ROUTE_LABEL_API = {
    RouteLabel.CONCEPTUAL_QA: "ConceptualQA",
    RouteLabel.QUIZ_GENERATOR: "QuizGenerator",
    RouteLabel.CODE_TUTOR: "CodeTutor",
    RouteLabel.UNKNOWN: "Unknown",
}


class ErrorBody(BaseModel):
    error: str
    detail: str


class RouteRequest(BaseModel):
    query: str = Field(min_length=1)


class RouteResponse(BaseModel):
    label: str
    parse_path: str
    raw_model_output: str


class HealthResponse(BaseModel):
    status: str
    indices: dict[str, int]


class AskRequest(BaseModel):
    query: str = Field(min_length=1)


class ContextChunkRef(BaseModel):
    chunk_id: str
    score: float
    text: str | None = None


class AskResponse(BaseModel):
    answer_text: str
    context_chunks: list[ContextChunkRef]
    insufficient: bool
    prompt_fingerprint: str


# -- quiz ---------------------------------------------------------------


class QuizStartRequest(BaseModel):
    topic: str = Field(min_length=1)
    subtopic_index: int = 0


class PendingItemView(BaseModel):
    """The learner-facing face of an item: no correct label, no rationales."""

    stem: str
    options: dict[str, str]
    bloom: str
    concepts: list[str]


class QuizHistoryEntry(BaseModel):
    learner_label: str
    correct: bool
    bloom: str
    feedback_mode: str


class QuizStateResponse(BaseModel):
    session_id: str
    topic: str
    subtopic: str
    subtopics: list[str]
    shortfall: bool
    current_bloom: str
    bloom_trajectory: list[str]
    pending_item: PendingItemView | None
    history: list[QuizHistoryEntry]
    exhausted: bool


class QuizAnswerRequest(BaseModel):
    session_id: str
    label: str


class QuizFeedback(BaseModel):
    mode: str
    correct_label: str
    correct_text: str
    chosen_rationale: str | None


class QuizAnswerResponse(BaseModel):
    correct: bool
    feedback: QuizFeedback
    current_bloom: str
    next_item: PendingItemView | None
    exhausted: bool


# -- tutor ---------------------------------------------------------------


class IoCaseModel(BaseModel):
    stdin: str = ""
    expected_stdout: str = ""


class TutorStartRequest(BaseModel):
    problem: str = Field(min_length=1)
    problem_id: str = ""
    difficulty: str = "easy"
    io_cases: list[IoCaseModel] = Field(default_factory=list)


class TutorStepView(BaseModel):
    index: int
    description: str
    status: str
    refinement_attempts_used: int
    attempts_remaining: int
    substituted: bool
    reference_failed: bool


class FinalReportView(BaseModel):
    completed: bool
    all_steps_passed: bool
    attempts_used: int
    case_results: list[dict]


class TutorStateResponse(BaseModel):
    session_id: str
    problem_id: str
    difficulty: str
    plan: list[str]
    current_index: int
    steps: list[TutorStepView]
    cumulative_code: str
    completed: bool
    final_sandbox_attempts_used: int
    final_attempts_remaining: int
    final_report: FinalReportView | None


class TutorSubmitRequest(BaseModel):
    session_id: str
    step_index: int
    snippet: str = Field(min_length=1)


class VerdictView(BaseModel):
    equivalent: bool
    flaw_summary: str | None
    learner_thought_model: str | None
    improvement_hint: str | None


class TutorSubmitResponse(BaseModel):
    outcome: str
    step_index: int
    attempts_used: int
    attempts_remaining: int
    verdict: VerdictView | None
    gate_error: str | None
    sandbox_error: str | None
    next_step_index: int | None
    cumulative_code: str


class TutorFinalizeRequest(BaseModel):
    session_id: str
    io_cases: list[IoCaseModel] | None = None


class TutorFinalizeResponse(BaseModel):
    completed: bool
    all_steps_passed: bool
    attempts_used: int
    case_results: list[dict]
