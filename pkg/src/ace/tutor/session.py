"""Stepwise code-tutoring loop.

A session walks a plan of logic-level steps. Each open step holds an
internally generated reference snippet; learner snippets go through block
completion, the syntax gate, a sandbox run, and (when they differ textually
from the reference) an equivalence comparator. Budgets are hard: five
refinement attempts per step, three final sandbox passes per problem. After
five failures the reference snippet is substituted so later steps stay
reachable, and the transcript records the substitution.
"""

from __future__ import annotations

import logging
import re
import uuid
from dataclasses import dataclass, field
from enum import Enum

from ace.errors import (
    AceError,
    InputError,
    PlanError,
    ReferenceSnippetError,
    SessionError,
)
from ace.gateway.ops import chat_complete
from ace.gateway.types import ChatMessage, Role, make_request
from ace.parsing import extract_json_value, parse_numbered_list
from ace.prompts import PromptPack
from ace.tutor.sandbox import SandboxResult, sandbox_run, syntax_gate
from ace.tutor.snippets import (
    complete_block_opener,
    extract_code,
    join_program,
    match_output,
    normalize_code,
    strip_duplicate_prefix,
)

log = logging.getLogger(__name__)

MAX_STEPS = 12
REFINEMENT_BUDGET = 5
FINAL_BUDGET = 3
REFERENCE_ATTEMPTS = 5

_FENCED = re.compile(r"```.*?```", re.DOTALL)
_SHELLISH = re.compile(r"^\s*(\$|#!|pip\b|pip3\b|python\b|python3\b|cd\b|sudo\b)")


class StepStatus(str, Enum):
    AWAITING_LEARNER = "awaiting_learner"
    PASSED = "passed"
    FAILED = "failed"


@dataclass
class Plan:
    problem_statement: str
    steps: list[str]


@dataclass
class StepState:
    index: int
    description: str
    reference_snippet: str | None = None
    accepted_snippet: str | None = None
    refinement_attempts_used: int = 0
    status: StepStatus = StepStatus.AWAITING_LEARNER
    reference_failed: bool = False  # comparator disabled when True
    substituted: bool = False
    attempts: list[dict] = field(default_factory=list)


@dataclass(frozen=True)
class ComparatorVerdict:
    equivalent: bool
    flaw_summary: str | None = None
    learner_thought_model: str | None = None
    improvement_hint: str | None = None
    degraded: bool = False


@dataclass
class IoCase:
    stdin: str
    expected_stdout: str


@dataclass
class FinalReport:
    problem_id: str
    difficulty: str
    completed: bool  # every io case matched within the attempt budget
    all_steps_passed: bool
    attempts_used: int
    case_results: list[dict]
    program: str


@dataclass
class TutorSession:
    plan: Plan
    problem_id: str = ""
    difficulty: str = "easy"
    io_cases: list[IoCase] = field(default_factory=list)
    session_id: str = field(default_factory=lambda: uuid.uuid4().hex)
    step_states: list[StepState] = field(default_factory=list)
    current_index: int = 0
    final_sandbox_attempts_used: int = 0
    completed: bool = False  # all steps passed AND the final run matched
    final_report: FinalReport | None = None

    @property
    def cumulative_code(self) -> str:
        parts = [
            s.accepted_snippet
            for s in self.step_states
            if s.accepted_snippet and s.status in (StepStatus.PASSED, StepStatus.FAILED)
        ]
        return join_program(parts)

    @property
    def current_step(self) -> StepState | None:
        if 0 <= self.current_index < len(self.step_states):
            return self.step_states[self.current_index]
        return None

    @property
    def all_steps_resolved(self) -> bool:
        return all(s.status != StepStatus.AWAITING_LEARNER for s in self.step_states)


@dataclass
class SubmitResult:
    outcome: str  # "passed" | "retry" | "step_failed"
    step_index: int
    attempts_used: int
    attempts_remaining: int
    verdict: ComparatorVerdict | None = None
    gate_error: str | None = None
    sandbox_error: str | None = None
    next_step_index: int | None = None


class TutorEngine:
    def __init__(
        self,
        generator_backend,
        validator_backend,
        prompts: PromptPack | None = None,
        language: str = "Python",
        max_steps: int = MAX_STEPS,
        sandbox_timeout: float = 5.0,
        sandbox_memory_mib: int = 256,
        sandbox_semaphore=None,
    ):
        self.generator = generator_backend
        self.validator = validator_backend
        self.prompts = prompts or PromptPack()
        self.language = language
        self.max_steps = max_steps
        self.sandbox_timeout = sandbox_timeout
        self.sandbox_memory_mib = sandbox_memory_mib
        self.sandbox_semaphore = sandbox_semaphore

    # -- planning -----------------------------------------------------------

    def generate_plan(self, problem: str) -> Plan:
        """One temperature-0 call parsed as a numbered list; code fences and
        shell-looking lines are stripped with a warning; one re-prompt."""
        if not problem or not problem.strip():
            raise InputError("problem statement must be non-empty")
        steps = self._request_steps(problem)
        if not steps:
            steps = self._request_steps(problem, nudge=True)
        if not steps:
            raise PlanError("planner produced no parseable numbered steps")
        return Plan(problem_statement=problem.strip(), steps=steps[: self.max_steps])

    def _request_steps(self, problem: str, nudge: bool = False) -> list[str]:
        prompt = self.prompts.render("tutor_plan", problem=problem, max_steps=str(self.max_steps))
        if nudge:
            prompt += "\nReply with a plain numbered list: one step per line."
        request = make_request(
            self.generator.profile.chat_model,
            [ChatMessage(Role.SYSTEM, prompt), ChatMessage(Role.USER, problem)],
            temperature=0.0,
        )
        raw = chat_complete(self.generator, request)
        if _FENCED.search(raw):
            log.warning("plan reply contained code fences; fenced content stripped")
            raw = _FENCED.sub("", raw)
        steps = []
        for step in parse_numbered_list(raw):
            if _SHELLISH.match(step):
                log.warning("plan step looked like a shell command; dropped: %r", step)
                continue
            steps.append(step)
        return steps

    # -- session lifecycle ----------------------------------------------------

    def start_session(
        self,
        problem: str,
        problem_id: str = "",
        difficulty: str = "easy",
        io_cases: list[IoCase] | None = None,
    ) -> TutorSession:
        plan = self.generate_plan(problem)
        session = TutorSession(
            plan=plan,
            problem_id=problem_id or uuid.uuid4().hex[:8],
            difficulty=difficulty,
            io_cases=list(io_cases or []),
        )
        session.step_states = [
            StepState(index=i, description=desc) for i, desc in enumerate(plan.steps)
        ]
        self._open_step(session, 0)
        return session

    def _open_step(self, session: TutorSession, index: int) -> None:
        if index >= len(session.step_states):
            return
        try:
            self.generate_reference_snippet(session, index)
        except ReferenceSnippetError as exc:
            step = session.step_states[index]
            step.reference_failed = True
            log.warning(
                "session %s step %d: %s; continuing learner-led with comparator disabled",
                session.session_id,
                index,
                exc,
            )

    # -- reference snippets ----------------------------------------------------

    def generate_reference_snippet(self, session: TutorSession, step_index: int) -> str:
        """Ask for the smallest snippet implementing only this step; gate and
        smoke-run it, feeding failures back, up to five internal attempts."""
        step = session.step_states[step_index]
        for prior in session.step_states[:step_index]:
            if prior.status == StepStatus.AWAITING_LEARNER:
                raise SessionError("earlier steps are still awaiting the learner")
        cumulative = session.cumulative_code
        if step_index == 0 or not cumulative:
            system = self.prompts.render(
                "tutor_snippet_first", language=self.language, step=step.description
            )
        else:
            system = self.prompts.render(
                "tutor_snippet",
                language=self.language,
                cumulative=cumulative,
                step=step.description,
            )
        messages = [
            ChatMessage(Role.SYSTEM, system),
            ChatMessage(Role.USER, step.description),
        ]
        last_error = ""
        for attempt in range(REFERENCE_ATTEMPTS):
            if attempt > 0:
                messages.append(
                    ChatMessage(
                        Role.USER,
                        self.prompts.render("tutor_snippet_retry", error=last_error),
                    )
                )
            request = make_request(
                self.generator.profile.chat_model, messages, temperature=0.0
            )
            raw = chat_complete(self.generator, request)
            snippet = strip_duplicate_prefix(cumulative, extract_code(raw))
            if not snippet.strip():
                last_error = "the reply contained no new code"
                messages.append(ChatMessage(Role.ASSISTANT, raw))
                continue
            messages.append(ChatMessage(Role.ASSISTANT, raw))
            program = complete_block_opener(join_program([cumulative, snippet]))
            gate = syntax_gate(program)
            if not gate.ok:
                last_error = f"syntax error at line {gate.line}: {gate.message}"
                continue
            smoke = self._run(program, self._smoke_stdin(session))
            if not smoke.ok:
                last_error = f"{smoke.exit_status.value}: {smoke.stderr.strip()[:400]}"
                continue
            step.reference_snippet = snippet
            return snippet
        raise ReferenceSnippetError(
            f"no working reference snippet for step {step_index} "
            f"after {REFERENCE_ATTEMPTS} attempts (last: {last_error})"
        )

    def _smoke_stdin(self, session: TutorSession) -> str | None:
        return session.io_cases[0].stdin if session.io_cases else None

    def _run(self, program: str, stdin_data: str | None) -> SandboxResult:
        return sandbox_run(
            program,
            stdin_data=stdin_data,
            timeout=self.sandbox_timeout,
            memory_mib=self.sandbox_memory_mib,
            semaphore=self.sandbox_semaphore,
        )

    # -- learner submissions ----------------------------------------------------

    def submit_learner_snippet(
        self, session: TutorSession, step_index: int, snippet: str
    ) -> SubmitResult:
        """Gate, run, and compare one learner snippet for the current step."""
        step = self._require_open_step(session, step_index)
        if not snippet or not snippet.strip():
            raise InputError("snippet must be non-empty")
        snippet = extract_code(snippet)
        cumulative = session.cumulative_code
        completed = complete_block_opener(snippet)
        program = complete_block_opener(join_program([cumulative, completed]))

        gate = syntax_gate(program)
        if not gate.ok:
            message = f"syntax error at line {gate.line}: {gate.message}"
            return self._record_failure(session, step, snippet, gate_error=message)

        run = self._run(program, self._smoke_stdin(session))
        if not run.ok:
            message = f"{run.exit_status.value}: {run.stderr.strip()[:400]}"
            return self._record_failure(session, step, snippet, sandbox_error=message)

        if step.reference_failed:
            verdict = ComparatorVerdict(equivalent=True, degraded=True)
        else:
            verdict = self.compare_step(
                cumulative, step.reference_snippet or "", snippet, step.description
            )
        if verdict.equivalent:
            step.status = StepStatus.PASSED
            step.accepted_snippet = snippet
            step.attempts.append({"snippet": snippet, "outcome": "passed"})
            next_index = self._advance(session)
            return SubmitResult(
                outcome="passed",
                step_index=step.index,
                attempts_used=step.refinement_attempts_used,
                attempts_remaining=REFINEMENT_BUDGET - step.refinement_attempts_used,
                verdict=verdict,
                next_step_index=next_index,
            )
        return self._record_failure(session, step, snippet, verdict=verdict)

    def _require_open_step(self, session: TutorSession, step_index: int) -> StepState:
        if step_index != session.current_index:
            raise SessionError(
                f"step {step_index} is not the current step ({session.current_index})"
            )
        step = session.current_step
        if step is None or step.status != StepStatus.AWAITING_LEARNER:
            raise SessionError(f"step {step_index} is not awaiting the learner")
        return step

    def _record_failure(
        self,
        session: TutorSession,
        step: StepState,
        snippet: str,
        verdict: ComparatorVerdict | None = None,
        gate_error: str | None = None,
        sandbox_error: str | None = None,
    ) -> SubmitResult:
        step.refinement_attempts_used += 1
        step.attempts.append(
            {
                "snippet": snippet,
                "outcome": "rejected",
                "gate_error": gate_error,
                "sandbox_error": sandbox_error,
                "flaw_summary": verdict.flaw_summary if verdict else None,
            }
        )
        if step.refinement_attempts_used >= REFINEMENT_BUDGET:
            step.status = StepStatus.FAILED
            if step.reference_snippet is not None:
                step.accepted_snippet = step.reference_snippet
                step.substituted = True
                log.info(
                    "session %s step %d: budget exhausted; reference substituted",
                    session.session_id,
                    step.index,
                )
            next_index = self._advance(session)
            return SubmitResult(
                outcome="step_failed",
                step_index=step.index,
                attempts_used=step.refinement_attempts_used,
                attempts_remaining=0,
                verdict=verdict,
                gate_error=gate_error,
                sandbox_error=sandbox_error,
                next_step_index=next_index,
            )
        return SubmitResult(
            outcome="retry",
            step_index=step.index,
            attempts_used=step.refinement_attempts_used,
            attempts_remaining=REFINEMENT_BUDGET - step.refinement_attempts_used,
            verdict=verdict,
            gate_error=gate_error,
            sandbox_error=sandbox_error,
        )

    def _advance(self, session: TutorSession) -> int | None:
        session.current_index += 1
        if session.current_index < len(session.step_states):
            self._open_step(session, session.current_index)
            return session.current_index
        return None

    # -- comparison ----------------------------------------------------------

    def compare_step(
        self,
        cumulative_code: str,
        reference_snippet: str,
        learner_snippet: str,
        step_description: str,
    ) -> ComparatorVerdict:
        """Textual equality short-circuits; otherwise one validator call with
        a boolean-JSON contract, retried once, degrading to non-equivalent."""
        if normalize_code(learner_snippet) == normalize_code(reference_snippet):
            return ComparatorVerdict(equivalent=True)
        prompt = self.prompts.render(
            "tutor_compare",
            step=step_description,
            cumulative=cumulative_code or "(empty)",
            reference=reference_snippet,
            learner=learner_snippet,
        )
        messages = [
            ChatMessage(Role.SYSTEM, prompt),
            ChatMessage(Role.USER, "Compare the snippets."),
        ]
        for attempt in range(2):
            request = make_request(self.validator.profile.chat_model, messages, temperature=0.0)
            try:
                raw = chat_complete(self.validator, request)
            except AceError as exc:
                log.warning("comparator call failed: %s", exc)
                break
            value = extract_json_value(raw)
            if isinstance(value, dict) and isinstance(value.get("equivalent"), bool):
                if not value["equivalent"] and not value.get("flaw_summary"):
                    value["flaw_summary"] = "the snippet does not implement this step"
                return ComparatorVerdict(
                    equivalent=value["equivalent"],
                    flaw_summary=value.get("flaw_summary"),
                    learner_thought_model=value.get("learner_thought_model"),
                    improvement_hint=value.get("improvement_hint"),
                )
            messages.append(ChatMessage(Role.ASSISTANT, raw))
            messages.append(
                ChatMessage(
                    Role.USER,
                    'Reply with only a JSON object: {"equivalent": bool, '
                    '"flaw_summary": str, "learner_thought_model": str, '
                    '"improvement_hint": str}.',
                )
            )
        log.warning("comparator degraded: unparseable output")
        return ComparatorVerdict(
            equivalent=False,
            flaw_summary="the comparator could not assess this snippet; treat it as not matching the step",
            degraded=True,
        )

    # -- finalization ----------------------------------------------------------

    def finalize_solution(
        self, session: TutorSession, io_cases: list[IoCase] | None = None
    ) -> FinalReport:
        """Run the assembled program against the io cases; each full pass over
        the cases consumes one of the three final attempts."""
        if not session.all_steps_resolved:
            raise SessionError("cannot finalize: steps still awaiting the learner")
        cases = list(io_cases) if io_cases is not None else session.io_cases
        program = complete_block_opener(session.cumulative_code)
        all_steps_passed = all(s.status == StepStatus.PASSED for s in session.step_states)

        case_results: list[dict] = []
        matched_all = False
        while session.final_sandbox_attempts_used < FINAL_BUDGET and not matched_all:
            session.final_sandbox_attempts_used += 1
            case_results = []
            matched_all = True
            if not cases:
                run = self._run(program, None)
                matched_all = run.ok
                case_results.append(
                    {
                        "stdin": None,
                        "expected": None,
                        "actual": run.stdout,
                        "exit_status": run.exit_status.value,
                        "matched": run.ok,
                    }
                )
            for case in cases:
                run = self._run(program, case.stdin)
                matched = run.ok and match_output(run.stdout, case.expected_stdout)
                case_results.append(
                    {
                        "stdin": case.stdin,
                        "expected": case.expected_stdout,
                        "actual": run.stdout,
                        "exit_status": run.exit_status.value,
                        "matched": matched,
                    }
                )
                if not matched:
                    matched_all = False
        report = FinalReport(
            problem_id=session.problem_id,
            difficulty=session.difficulty,
            completed=matched_all,
            all_steps_passed=all_steps_passed,
            attempts_used=session.final_sandbox_attempts_used,
            case_results=case_results,
            program=program,
        )
        session.final_report = report
        session.completed = matched_all and all_steps_passed
        return report

    # -- transcript ----------------------------------------------------------

    def to_transcript(self, session: TutorSession) -> dict:
        return {
            "kind": "tutor",
            "session_id": session.session_id,
            "problem_id": session.problem_id,
            "difficulty": session.difficulty,
            "plan": session.plan.steps,
            "problem_statement": session.plan.problem_statement,
            "steps": [
                {
                    "index": s.index,
                    "description": s.description,
                    "status": s.status.value,
                    "reference_snippet": s.reference_snippet,
                    "accepted_snippet": s.accepted_snippet,
                    "refinement_attempts_used": s.refinement_attempts_used,
                    "reference_failed": s.reference_failed,
                    "substituted": s.substituted,
                    "attempts": s.attempts,
                }
                for s in session.step_states
            ],
            "final_sandbox_attempts_used": session.final_sandbox_attempts_used,
            "completed": session.completed,
            "final_report": (
                {
                    "problem_id": session.final_report.problem_id,
                    "difficulty": session.final_report.difficulty,
                    "completed": session.final_report.completed,
                    "all_steps_passed": session.final_report.all_steps_passed,
                    "attempts_used": session.final_report.attempts_used,
                    "case_results": session.final_report.case_results,
                }
                if session.final_report
                else None
            ),
        }
