"""Query router: classify each learner query into one dispatch label.

Classification happens through one temperature-0 chat call whose system
prompt lists the available tools with representative patterns; the reply is
then parsed deterministically. Ambiguous replies (two labels mentioned) fail
safe to Unknown rather than first-match.
"""

from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass
from enum import Enum

from ace.errors import AceError, InputError, RoutingError
from ace.gateway.ops import chat_complete
from ace.gateway.types import ChatMessage, Role, make_request
from ace.prompts import PromptPack

log = logging.getLogger(__name__)


class RouteLabel(str, Enum):
    CONCEPTUAL_QA = "Conceptual Q&A"
    QUIZ_GENERATOR = "Quiz Generator"
    CODE_TUTOR = "Code Tutor"
    UNKNOWN = "Unknown"


class ParsePath(str, Enum):
    EXACT = "exact"
    FUZZY = "fuzzy"
    FALLBACK = "fallback"


@dataclass(frozen=True)
class RouteDecision:
    label: RouteLabel
    raw_model_output: str
    parse_path: ParsePath


_PUNCT = re.compile(r"[^0-9a-z\s]+")

# Normalized surface forms recognized for each label.
_SURFACE_FORMS = {
    RouteLabel.CONCEPTUAL_QA: ("conceptual q a", "conceptual qa"),
    RouteLabel.QUIZ_GENERATOR: ("quiz generator",),
    RouteLabel.CODE_TUTOR: ("code tutor",),
    RouteLabel.UNKNOWN: ("unknown",),
}


def _normalize(text: str) -> str:
    return " ".join(_PUNCT.sub(" ", text.lower()).split())


def parse_label(raw: str) -> tuple[RouteLabel, ParsePath]:
    """Total, deterministic mapping from model output to a label.

    Exact: the whole output (trimmed, case-folded, punctuation stripped)
    equals one canonical label. Fuzzy: exactly one label occurs as a
    substring. Anything else, including two labels, is Unknown/Fallback.
    """
    normalized = _normalize(raw)
    for label, forms in _SURFACE_FORMS.items():
        if normalized in forms:
            return label, ParsePath.EXACT
    mentioned = [
        label
        for label, forms in _SURFACE_FORMS.items()
        if any(form in normalized for form in forms)
    ]
    if len(mentioned) == 1:
        return mentioned[0], ParsePath.FUZZY
    return RouteLabel.UNKNOWN, ParsePath.FALLBACK


class Router:
    def __init__(self, backend, prompts: PromptPack | None = None, model: str | None = None):
        self.backend = backend
        self.prompts = prompts or PromptPack()
        self.model = model or backend.profile.chat_model

    def route(self, query: str) -> RouteDecision:
        if not query or not query.strip():
            raise InputError("cannot route an empty query")
        request = make_request(
            self.model,
            [
                ChatMessage(Role.SYSTEM, self.prompts.render("router_system")),
                ChatMessage(Role.USER, query),
            ],
            temperature=0.0,
            max_tokens=16,
        )
        try:
            raw = chat_complete(self.backend, request)
        except AceError as exc:
            raise RoutingError(f"routing call failed: {exc}") from exc
        label, parse_path = parse_label(raw)
        query_hash = hashlib.sha256(query.encode("utf-8")).hexdigest()[:12]
        log.info("route query=%s label=%s path=%s", query_hash, label.value, parse_path.value)
        return RouteDecision(label=label, raw_model_output=raw, parse_path=parse_path)
