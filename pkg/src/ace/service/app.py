"""FastAPI application exposing the engine to the web client and the CLI."""

from __future__ import annotations

import json
import logging
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ace.engine import Engine
from ace.errors import (
    AceError,
    InputError,
    SandboxSetupError,
    SessionError,
    SessionExpiredError,
)
from ace.quiz.items import QuizItem
from ace.quiz.session import QuizSession
from ace.service import schemas
from ace.service.sessions import SessionStore
from ace.tutor.session import IoCase, TutorSession

log = logging.getLogger(__name__)


def _item_view(item: QuizItem | None) -> schemas.PendingItemView | None:
    if item is None:
        return None
    return schemas.PendingItemView(
        stem=item.stem,
        options=dict(item.options),
        bloom=item.bloom.value,
        concepts=list(item.concepts),
    )


def _quiz_state(session: QuizSession) -> schemas.QuizStateResponse:
    return schemas.QuizStateResponse(
        session_id=session.session_id,
        topic=session.topic,
        subtopic=session.subtopic,
        subtopics=session.subtopics,
        shortfall=session.shortfall,
        current_bloom=session.current_bloom.value,
        bloom_trajectory=[b.value for b in session.bloom_trajectory],
        pending_item=_item_view(session.pending),
        history=[
            schemas.QuizHistoryEntry(
                learner_label=rec.learner_label,
                correct=rec.correct,
                bloom=rec.bloom.value,
                feedback_mode=rec.feedback_mode.value,
            )
            for rec in session.history
        ],
        exhausted=session.exhausted,
    )


def _tutor_state(session: TutorSession) -> schemas.TutorStateResponse:
    from ace.tutor.session import FINAL_BUDGET, REFINEMENT_BUDGET

    return schemas.TutorStateResponse(
        session_id=session.session_id,
        problem_id=session.problem_id,
        difficulty=session.difficulty,
        plan=session.plan.steps,
        current_index=session.current_index,
        steps=[
            schemas.TutorStepView(
                index=s.index,
                description=s.description,
                status=s.status.value,
                refinement_attempts_used=s.refinement_attempts_used,
                attempts_remaining=REFINEMENT_BUDGET - s.refinement_attempts_used,
                substituted=s.substituted,
                reference_failed=s.reference_failed,
            )
            for s in session.step_states
        ],
        cumulative_code=session.cumulative_code,
        completed=session.completed,
        final_sandbox_attempts_used=session.final_sandbox_attempts_used,
        final_attempts_remaining=FINAL_BUDGET - session.final_sandbox_attempts_used,
        final_report=(
            schemas.FinalReportView(
                completed=session.final_report.completed,
                all_steps_passed=session.final_report.all_steps_passed,
                attempts_used=session.final_report.attempts_used,
                case_results=session.final_report.case_results,
            )
            if session.final_report
            else None
        ),
    )


def create_app(engine: Engine) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        app.state.sessions.flush_all()

    app = FastAPI(title="ace", version="0.1.0", lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],  # browser client is served from a separate static origin
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.engine = engine

    transcripts_dir = Path(engine.config.transcripts_dir)

    def flush_transcript(kind: str, session) -> None:
        if kind == "quiz":
            payload = engine.quiz.to_transcript(session)
        else:
            payload = engine.tutor.to_transcript(session)
        out_dir = transcripts_dir / kind
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / f"{session.session_id}.json"
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        log.info("transcript flushed: %s", path)

    store = SessionStore(ttl=engine.config.session_ttl, flusher=flush_transcript)
    app.state.sessions = store

    @app.exception_handler(AceError)
    async def ace_error_handler(request: Request, exc: AceError):
        status = 500
        if isinstance(exc, InputError):
            status = 400
        elif isinstance(exc, SessionExpiredError):
            status = 410
        elif isinstance(exc, SessionError):
            status = 409
        elif isinstance(exc, SandboxSetupError):
            status = 503
        body = schemas.ErrorBody(error=type(exc).__name__, detail=str(exc))
        log.warning("%s %s -> %d %s", request.method, request.url.path, status, exc)
        return JSONResponse(status_code=status, content=body.model_dump())

    @app.get("/v1/health", response_model=schemas.HealthResponse)
    def health():
        indices = {}
        if engine.indices_present():
            indices = {"hybrid": len(engine.hybrid_index), "quiz": len(engine.quiz_index)}
        return schemas.HealthResponse(status="ok", indices=indices)

    @app.post("/v1/route", response_model=schemas.RouteResponse)
    def route(body: schemas.RouteRequest):
        decision = engine.route(body.query)
        log.info("route: label=%s path=%s", decision.label.value, decision.parse_path.value)
        return schemas.RouteResponse(
            label=schemas.ROUTE_LABEL_API[decision.label],
            parse_path=decision.parse_path.value,
            raw_model_output=decision.raw_model_output,
        )

    @app.post("/v1/qa/ask", response_model=schemas.AskResponse)
    def qa_ask(body: schemas.AskRequest):
        answer = engine.qa.answer_conceptual(body.query)
        index = engine.hybrid_index
        return schemas.AskResponse(
            answer_text=answer.answer_text,
            context_chunks=[
                schemas.ContextChunkRef(
                    chunk_id=chunk_id,
                    score=score,
                    text=index.chunks[index.by_id[chunk_id]].text,
                )
                for chunk_id, score in answer.context_chunks
            ],
            insufficient=answer.insufficient,
            prompt_fingerprint=answer.prompt_fingerprint,
        )

    # -- quiz ---------------------------------------------------------------

    @app.post("/v1/quiz/start", response_model=schemas.QuizStateResponse)
    def quiz_start(body: schemas.QuizStartRequest):
        session = engine.quiz.start_session(
            body.topic, subtopic_index=body.subtopic_index, start_bloom=engine.start_bloom
        )
        store.put("quiz", session.session_id, session)
        log.info("quiz session %s started on %r", session.session_id, session.subtopic)
        return _quiz_state(session)

    @app.get("/v1/quiz/state", response_model=schemas.QuizStateResponse)
    def quiz_state(session_id: str):
        with store.checkout(session_id, "quiz") as session:
            return _quiz_state(session)

    @app.post("/v1/quiz/answer", response_model=schemas.QuizAnswerResponse)
    def quiz_answer(body: schemas.QuizAnswerRequest):
        with store.checkout(body.session_id, "quiz") as session:
            record = engine.quiz.grade_answer(session, body.label)
            response = schemas.QuizAnswerResponse(
                correct=record.correct,
                feedback=schemas.QuizFeedback(
                    mode=record.feedback_mode.value,
                    correct_label=record.correct_label,
                    correct_text=record.correct_text,
                    chosen_rationale=record.chosen_rationale,
                ),
                current_bloom=session.current_bloom.value,
                next_item=_item_view(session.pending),
                exhausted=session.exhausted,
            )
        log.info(
            "quiz session %s graded %s (correct=%s) -> %s",
            body.session_id,
            body.label,
            record.correct,
            session.current_bloom.value,
        )
        if response.exhausted:
            store.flush_one(body.session_id)
        return response

    # -- tutor ---------------------------------------------------------------

    @app.post("/v1/tutor/start", response_model=schemas.TutorStateResponse)
    def tutor_start(body: schemas.TutorStartRequest):
        session = engine.tutor.start_session(
            body.problem,
            problem_id=body.problem_id,
            difficulty=body.difficulty,
            io_cases=[IoCase(c.stdin, c.expected_stdout) for c in body.io_cases],
        )
        store.put("tutor", session.session_id, session)
        log.info("tutor session %s started (%d steps)", session.session_id, len(session.plan.steps))
        return _tutor_state(session)

    @app.get("/v1/tutor/state", response_model=schemas.TutorStateResponse)
    def tutor_state(session_id: str):
        with store.checkout(session_id, "tutor") as session:
            return _tutor_state(session)

    @app.post("/v1/tutor/submit", response_model=schemas.TutorSubmitResponse)
    def tutor_submit(body: schemas.TutorSubmitRequest):
        with store.checkout(body.session_id, "tutor") as session:
            result = engine.tutor.submit_learner_snippet(session, body.step_index, body.snippet)
            verdict = result.verdict
            return schemas.TutorSubmitResponse(
                outcome=result.outcome,
                step_index=result.step_index,
                attempts_used=result.attempts_used,
                attempts_remaining=result.attempts_remaining,
                verdict=(
                    schemas.VerdictView(
                        equivalent=verdict.equivalent,
                        flaw_summary=verdict.flaw_summary,
                        learner_thought_model=verdict.learner_thought_model,
                        improvement_hint=verdict.improvement_hint,
                    )
                    if verdict
                    else None
                ),
                gate_error=result.gate_error,
                sandbox_error=result.sandbox_error,
                next_step_index=result.next_step_index,
                cumulative_code=session.cumulative_code,
            )

    @app.post("/v1/tutor/finalize", response_model=schemas.TutorFinalizeResponse)
    def tutor_finalize(body: schemas.TutorFinalizeRequest):
        with store.checkout(body.session_id, "tutor") as session:
            cases = None
            if body.io_cases is not None:
                cases = [IoCase(c.stdin, c.expected_stdout) for c in body.io_cases]
            report = engine.tutor.finalize_solution(session, cases)
        # Flush on completion (or budget exhaustion); session stays reachable.
        store.flush_one(body.session_id)
        return schemas.TutorFinalizeResponse(
            completed=report.completed,
            all_steps_passed=report.all_steps_passed,
            attempts_used=report.attempts_used,
            case_results=report.case_results,
        )

    return app


def serve(engine: Engine, host: str = "127.0.0.1", port: int = 8722) -> None:
    """Run the service under uvicorn; fails fast when indices are missing."""
    import uvicorn

    if not engine.indices_present():
        raise InputError(
            f"indices not found in {engine.config.index_dir}; "
            "run `ace ingest --manifest <corpus.json>` first"
        )
    app = create_app(engine)
    uvicorn.run(app, host=host, port=port, log_level="info")
