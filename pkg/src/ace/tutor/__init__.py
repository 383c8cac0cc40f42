"""Stepwise sandboxed code tutoring."""

from ace.tutor.sandbox import (
    ExitStatus,
    GateResult,
    SandboxResult,
    sandbox_run,
    syntax_gate,
)
from ace.tutor.session import (
    FINAL_BUDGET,
    REFINEMENT_BUDGET,
    ComparatorVerdict,
    FinalReport,
    IoCase,
    Plan,
    StepState,
    StepStatus,
    SubmitResult,
    TutorEngine,
    TutorSession,
)
from ace.tutor.snippets import (
    complete_block_opener,
    extract_code,
    join_program,
    match_output,
    normalize_code,
    strip_duplicate_prefix,
)

__all__ = [
    "ComparatorVerdict",
    "ExitStatus",
    "FINAL_BUDGET",
    "FinalReport",
    "GateResult",
    "IoCase",
    "Plan",
    "REFINEMENT_BUDGET",
    "SandboxResult",
    "StepState",
    "StepStatus",
    "SubmitResult",
    "TutorEngine",
    "TutorSession",
    "complete_block_opener",
    "extract_code",
    "join_program",
    "match_output",
    "normalize_code",
    "sandbox_run",
    "strip_duplicate_prefix",
    "syntax_gate",
]
