"""Shared fixtures: deterministic mock scripting and small corpora."""

from __future__ import annotations

import hashlib
import json
import re

import pytest

from ace.corpus.index import Chunk, build_hybrid_index, build_quiz_index
from ace.gateway.mock import MockBackend, hash_embedding


def make_chunks(texts, dim=64, prefix="doc"):
    chunks = []
    for i, text in enumerate(texts):
        chunks.append(
            Chunk(
                chunk_id=f"{prefix}:{i:04d}",
                doc_id=prefix,
                text=text,
                char_span=(0, len(text)),
                token_estimate=max(1, len(text.split())),
                embedding=hash_embedding(text, dim),
            )
        )
    return chunks


@pytest.fixture
def mock_backend():
    return MockBackend()


@pytest.fixture
def tiny_hybrid():
    return build_hybrid_index(make_chunks(["a b", "b c", "c d"]))


def install_quiz_rules(mock: MockBackend, subtopics=None):
    """Scripted quiz pipeline: decompose, framework, synthesis, validation.

    Synthesis is a pure function of the prompt, so re-synthesis with a grown
    avoid-list yields fresh stems while staying deterministic.
    """
    subtopics = subtopics or ["scope", "arguments", "returns", "lambdas", "closures"]
    mock.add_rule("candidate subtopics", json.dumps(subtopics))
    mock.add_rule(
        "build a compact concept framework",
        json.dumps(
            {
                "mechanisms": ["names bind to objects in a scope"],
                "misconceptions": ["assignment copies the object"],
                "constraints": ["locals resolve before globals"],
                "tradeoffs": ["closures trade clarity for reuse"],
            }
        ),
    )

    def synthesize(prompt: str) -> str:
        count = int(re.search(r"Write (\d+) scenario-based", prompt).group(1))
        bloom = re.search(r"at Bloom level (\w+)", prompt).group(1)
        salt = hashlib.sha256(prompt.encode()).hexdigest()[:8]
        items = []
        for i in range(count):
            items.append(
                {
                    "stem": f"Scenario {salt}-{i}: given the {bloom}-level setup, which option is right?",
                    "options": {
                        "A": f"choice alpha {salt}{i}",
                        "B": f"choice beta {salt}{i}",
                        "C": f"choice gamma {salt}{i}",
                        "D": f"choice delta {salt}{i}",
                    },
                    "correct_label": "B",
                    "distractor_rationales": {
                        "A": "confuses rebinding with mutation",
                        "C": "assumes lookup stops at module scope",
                        "D": "ignores the enclosing scope",
                    },
                    "bloom": bloom,
                    "concepts": ["name binding", "scope resolution"],
                    "relevance": 1.0,
                }
            )
        return json.dumps(items)

    mock.add_rule("scenario-based multiple-choice", synthesize)
    mock.add_rule("Check the quiz item", json.dumps({"bloom_ok": True, "multi_concept_ok": True}))
    return mock


THREE_STEP_PLAN = (
    "1. Read the integer from input\n"
    "2. Compute the square of the integer\n"
    "3. Print the squared value"
)

THREE_STEP_SNIPPETS = {
    "Read the integer from input": "n = int(input())",
    "Compute the square of the integer": "sq = n * n",
    "Print the squared value": "print(sq)",
}


def install_tutor_rules(mock: MockBackend):
    """Scripted tutor: a three-step read/square/print problem."""
    mock.add_rule("numbered sequence of", THREE_STEP_PLAN)

    def snippet(prompt: str) -> str:
        for step, code in THREE_STEP_SNIPPETS.items():
            if step in prompt:
                return code
        return "pass"

    mock.add_rule("smallest new Python snippet", snippet)
    mock.add_rule(
        "Compare their snippet",
        json.dumps(
            {
                "equivalent": True,
                "flaw_summary": "",
                "learner_thought_model": "",
                "improvement_hint": "",
            }
        ),
    )
    return mock


@pytest.fixture
def quiz_mock():
    return install_quiz_rules(MockBackend())


@pytest.fixture
def tutor_mock():
    return install_tutor_rules(MockBackend())


CORPUS_DOCS = {
    "basics": (
        "Python names are references to objects. Assignment binds a name to an "
        "object rather than copying it. Rebinding a name never mutates the "
        "object it previously referred to. Mutable objects such as lists can "
        "change in place through any name bound to them."
    ),
    "functions": (
        "A function introduces a new local scope. Arguments are passed by "
        "assignment, binding parameter names to the caller's objects. A return "
        "statement hands an object back to the caller. Lambdas define small "
        "anonymous functions limited to a single expression."
    ),
    "closures": (
        "A closure is a function that remembers names from its enclosing "
        "scope. The enclosing scope is searched after the local scope and "
        "before the global scope. Closures keep enclosing values alive after "
        "the outer function returns."
    ),
}


def write_corpus(tmp_path):
    """Write CORPUS_DOCS plus a manifest; returns the manifest path."""
    corpus_dir = tmp_path / "corpus"
    corpus_dir.mkdir(exist_ok=True)
    entries = []
    for doc_id, body in CORPUS_DOCS.items():
        (corpus_dir / f"{doc_id}.txt").write_text(body, encoding="utf-8")
        entries.append(
            {"doc_id": doc_id, "title": doc_id.title(), "source_path": f"{doc_id}.txt"}
        )
    manifest = corpus_dir / "corpus.json"
    manifest.write_text(json.dumps(entries, indent=2), encoding="utf-8")
    return manifest


def _static_items(bloom: str) -> str:
    items = []
    for i in range(3):
        items.append(
            {
                "stem": f"At the {bloom} level, scripted scenario {i}: which choice holds?",
                "options": {
                    "A": f"{bloom} option a{i}",
                    "B": f"{bloom} option b{i}",
                    "C": f"{bloom} option c{i}",
                    "D": f"{bloom} option d{i}",
                },
                "correct_label": "B",
                "distractor_rationales": {
                    "A": "tempting but backwards",
                    "C": "ignores the binding rule",
                    "D": "conflates two scopes",
                },
                "bloom": bloom,
                "concepts": ["name binding", "scope resolution"],
                "relevance": 1.0,
            }
        )
    return json.dumps(items)


def write_mock_script(tmp_path):
    """Static mock script file covering the routed, quiz, and tutor flows.

    Rules are matched in order; the comparator rule precedes the snippet
    rules because compare prompts also contain a "Step:" line.
    """
    script = {
        "rules": [
            {
                "contains": "Cite the excerpts you rely on",
                "response": "Grounded answer: names bind to objects; see [[chunk basics:0000]].",
            },
            {"contains": "user: quiz me", "response": "Quiz Generator"},
            {"contains": "user: what is", "response": "Conceptual Q&A"},
            {"contains": "user: help me write", "response": "Code Tutor"},
            {
                "contains": "candidate subtopics",
                "response": json.dumps(["scope", "arguments", "returns", "lambdas", "closures"]),
            },
            {
                "contains": "build a compact concept framework",
                "response": json.dumps(
                    {
                        "mechanisms": ["names bind to objects"],
                        "misconceptions": ["assignment copies"],
                        "constraints": ["locals first"],
                        "tradeoffs": ["clarity versus reuse"],
                    }
                ),
            },
            {"contains": "at Bloom level Apply", "response": _static_items("Apply")},
            {"contains": "at Bloom level Analyse", "response": _static_items("Analyse")},
            {"contains": "at Bloom level Evaluate", "response": _static_items("Evaluate")},
            {"contains": "at Bloom level Create", "response": _static_items("Create")},
            {
                "contains": "Check the quiz item",
                "response": json.dumps({"bloom_ok": True, "multi_concept_ok": True}),
            },
            {
                "contains": "Compare their snippet",
                "response": json.dumps(
                    {
                        "equivalent": True,
                        "flaw_summary": "",
                        "learner_thought_model": "",
                        "improvement_hint": "",
                    }
                ),
            },
            {"contains": "numbered sequence of", "response": THREE_STEP_PLAN},
            {"contains": "Step: Read the integer from input", "response": "n = int(input())"},
            {"contains": "Step: Compute the square of the integer", "response": "sq = n * n"},
            {"contains": "Step: Print the squared value", "response": "print(sq)"},
        ]
    }
    path = tmp_path / "mock_script.json"
    path.write_text(json.dumps(script, indent=2), encoding="utf-8")
    return path


def write_engine_config(tmp_path, **overrides):
    """A config file pointing every path into tmp_path; returns its path."""
    config = {
        "index_dir": str(tmp_path / "indices"),
        "transcripts_dir": str(tmp_path / "transcripts"),
        "chunking": {"target_tokens": 30, "min_tokens": 5},
        "tutor": {"sandbox_timeout": 5.0},
    }
    config.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config, indent=2), encoding="utf-8")
    return path


__all__ = [
    "CORPUS_DOCS",
    "THREE_STEP_PLAN",
    "THREE_STEP_SNIPPETS",
    "build_hybrid_index",
    "build_quiz_index",
    "install_quiz_rules",
    "install_tutor_rules",
    "make_chunks",
    "write_corpus",
    "write_engine_config",
    "write_mock_script",
]
