"""Document ingestion primitives: tokenizing, sentence splitting, chunking.

Tokenization is deliberately dumb and deterministic (lowercase, split on
non-alphanumeric runs) because both BM25 and the token estimates need to be
reproducible across processes and platforms.

Semantic chunking groups consecutive sentences until either the cosine
similarity between adjacent sentence embeddings drops below a threshold or
the chunk would grow past twice the target token budget; chunks always end
on sentence boundaries and jointly cover the document.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ace.errors import InputError

_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")

# Words before a period that usually do not end a sentence.
_ABBREVIATIONS = {
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st",
    "vs", "etc", "eg", "ie", "fig", "no", "al", "approx",
}

_BOUNDARY = re.compile(r"[.?!]+[\"')\]]*\s+(?=[A-Z])")


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric tokens; empty tokens dropped."""
    return [t for t in _TOKEN_SPLIT.split(text.lower()) if t]


def estimate_tokens(text: str) -> int:
    """Token count used for chunk sizing; never below 1."""
    return max(1, len(tokenize(text)))


@dataclass(frozen=True)
class Sentence:
    text: str
    start: int
    end: int


def split_sentences(body: str) -> list[Sentence]:
    """Split prose into sentences at ./?/! followed by whitespace and an
    uppercase letter, guarding common abbreviations and single initials.
    Spans index into the original body.
    """
    stripped = body.strip()
    if not stripped:
        return []
    offset = body.index(stripped[0])
    sentences: list[Sentence] = []
    cursor = offset
    for match in _BOUNDARY.finditer(body):
        if match.start() < cursor:
            continue
        before = body[cursor : match.start()]
        last_word = re.findall(r"[A-Za-z]+$", before)
        if last_word and (last_word[0].lower() in _ABBREVIATIONS or len(last_word[0]) == 1):
            continue
        end = match.start() + len(match.group().rstrip())
        text = body[cursor:end]
        if text.strip():
            sentences.append(Sentence(text, cursor, end))
        cursor = match.end()
    tail = body[cursor:].rstrip()
    if tail.strip():
        end = cursor + len(tail)
        sentences.append(Sentence(body[cursor:end], cursor, end))
    return sentences


@dataclass
class ChunkDraft:
    """A chunk before embedding: text, span into the parent body, size."""

    text: str
    start: int
    end: int
    token_estimate: int


EmbedFn = Callable[[list[str]], Sequence[np.ndarray]]


def semantic_chunk(
    body: str,
    embed_fn: EmbedFn,
    target_tokens: int = 300,
    min_tokens: int = 80,
    boundary_threshold: float = 0.55,
) -> list[ChunkDraft]:
    """Group sentences into semantically coherent, size-bounded chunks.

    A new chunk starts when the similarity between adjacent sentence
    embeddings falls below `boundary_threshold`, or when the running chunk
    would exceed 2 * target_tokens. No chunk ends up below `min_tokens`
    unless it is the document's only chunk (a trailing runt is merged into
    its predecessor).
    """
    if not body.strip():
        raise InputError("cannot chunk an empty document body")
    sentences = split_sentences(body)
    if not sentences:
        stripped = body.strip()
        start = body.index(stripped[0])
        return [ChunkDraft(stripped, start, start + len(stripped), estimate_tokens(stripped))]
    if len(sentences) == 1:
        s = sentences[0]
        return [ChunkDraft(s.text, s.start, s.end, estimate_tokens(s.text))]

    embeddings = list(embed_fn([s.text for s in sentences]))
    if len(embeddings) != len(sentences):
        raise InputError("embed_fn returned a different number of vectors than sentences")

    groups: list[list[Sentence]] = []
    current = [sentences[0]]
    current_tokens = estimate_tokens(sentences[0].text)
    cap = 2 * target_tokens
    for i in range(1, len(sentences)):
        sent = sentences[i]
        sent_tokens = estimate_tokens(sent.text)
        sim = float(np.dot(embeddings[i - 1], embeddings[i]))
        over_cap = current_tokens + sent_tokens > cap
        boundary = sim < boundary_threshold
        if (over_cap or boundary) and current_tokens >= min_tokens:
            groups.append(current)
            current = [sent]
            current_tokens = sent_tokens
        else:
            current.append(sent)
            current_tokens += sent_tokens
    groups.append(current)

    drafts = [_draft_from_group(body, g) for g in groups]
    if len(drafts) >= 2 and drafts[-1].token_estimate < min_tokens:
        merged = _merge_drafts(body, drafts[-2], drafts[-1])
        drafts = drafts[:-2] + [merged]
    return drafts


def _draft_from_group(body: str, group: list[Sentence]) -> ChunkDraft:
    start, end = group[0].start, group[-1].end
    text = body[start:end]
    return ChunkDraft(text, start, end, estimate_tokens(text))


def _merge_drafts(body: str, left: ChunkDraft, right: ChunkDraft) -> ChunkDraft:
    text = body[left.start : right.end]
    return ChunkDraft(text, left.start, right.end, estimate_tokens(text))


def normalize_whitespace(text: str) -> str:
    """Collapse all whitespace runs to single spaces (for coverage checks)."""
    return " ".join(text.split())
