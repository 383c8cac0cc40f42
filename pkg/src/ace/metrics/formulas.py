"""Evaluation formulas over session transcripts and model-run records.

Coverage: Shannon entropy over subtopic relevance weights, penalized by
dividing each weight by the number of topics sharing that subtopic before
normalizing, so redundant coverage counts less. Evenness is the entropy
normalized by ln(k). Robustness: a difficulty-weighted solve rate and an
effective-capacity proxy (params + precision/10), associated via Spearman
rank correlation with average ranks for ties.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from ace.errors import InputError, UndefinedCorrelationError

log = logging.getLogger(__name__)

FORMULA_VERSION = 1

DWPM_WEIGHTS = (0.2, 0.3, 0.5)
DIFFICULTIES = ("easy", "medium", "hard")


@dataclass(frozen=True)
class TopicEntry:
    topic: str
    subtopics: tuple[tuple[str, float], ...]  # (name, relevance weight >= 0)

    def __post_init__(self):
        if not self.subtopics:
            raise InputError(f"topic {self.topic!r} has no subtopics")
        for name, weight in self.subtopics:
            if weight < 0:
                raise InputError(f"negative relevance for {name!r} in {self.topic!r}")


@dataclass
class SubtopicRelevanceMatrix:
    topics: list[TopicEntry]
    sharing: dict[str, int] = field(default_factory=dict)

    @classmethod
    def from_entries(cls, topics: list[TopicEntry]) -> "SubtopicRelevanceMatrix":
        sharing: dict[str, int] = {}
        for entry in topics:
            for name in {name for name, _w in entry.subtopics}:
                sharing[name] = sharing.get(name, 0) + 1
        return cls(topics=topics, sharing=sharing)


def _penalized_weights(entry: TopicEntry, sharing: dict[str, int]) -> list[float]:
    weights = [w / max(1, sharing.get(name, 1)) for name, w in entry.subtopics]
    total = sum(weights)
    if total <= 0.0:
        raise InputError(f"topic {entry.topic!r} has zero total relevance")
    return [w / total for w in weights]


def penalized_entropy(entry: TopicEntry, sharing: dict[str, int]) -> float:
    """Shannon entropy (natural log) of uniqueness-penalized relevance weights."""
    probs = _penalized_weights(entry, sharing)
    return -sum(p * math.log(p) for p in probs if p > 0.0)


def pielou_evenness(entry: TopicEntry, sharing: dict[str, int]) -> float:
    """Penalized entropy normalized by ln(subtopic count).

    A single-subtopic topic is perfectly even by convention (returns 1.0,
    logged since the ratio itself is 0/0 there).
    """
    k = len(entry.subtopics)
    if k == 1:
        _penalized_weights(entry, sharing)  # still validate positivity
        log.warning("topic %r has one subtopic; evenness defined as 1.0", entry.topic)
        return 1.0
    return penalized_entropy(entry, sharing) / math.log(k)


@dataclass(frozen=True)
class ModelRunRecord:
    model_name: str
    params_billions: float
    precision_bits: float
    solved_counts: tuple[int, int, int]  # easy, medium, hard
    totals: tuple[int, int, int]

    def __post_init__(self):
        if self.params_billions <= 0 or self.precision_bits <= 0:
            raise InputError("params and precision must be positive")
        for solved, total in zip(self.solved_counts, self.totals):
            if not 0 <= solved <= total:
                raise InputError(
                    f"{self.model_name}: solved {solved} outside [0, {total}]"
                )


def dwpm(record: ModelRunRecord, weights: tuple[float, float, float] = DWPM_WEIGHTS) -> float:
    """Difficulty-weighted solve rate: sum of w_d * solved_d / total_d."""
    if any(n == 0 for n in record.totals):
        raise InputError(f"{record.model_name}: empty difficulty bucket")
    accuracies = [c / n for c, n in zip(record.solved_counts, record.totals)]
    return sum(w * a for w, a in zip(weights, accuracies))


def effective_size(record: ModelRunRecord) -> float:
    """Capacity proxy: parameter count (billions) plus precision bits / 10."""
    return record.params_billions + record.precision_bits / 10.0


def average_ranks(values: list[float]) -> list[float]:
    """1-based ranks, ascending, with tied values sharing their average rank."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for pos in range(i, j + 1):
            ranks[order[pos]] = avg
        i = j + 1
    return ranks


def spearman_rho(xs: list[float], ys: list[float]) -> float:
    """Spearman rank correlation with average ranks for ties.

    Without ties the closed form 1 - 6*sum(d^2)/(n(n^2-1)) applies; with
    ties it is the Pearson correlation of the two rank vectors.
    """
    if len(xs) != len(ys):
        raise InputError("spearman_rho needs equally long vectors")
    n = len(xs)
    if n < 2:
        raise InputError("spearman_rho needs n >= 2")
    if len(set(xs)) == 1 or len(set(ys)) == 1:
        raise UndefinedCorrelationError("rank correlation undefined for a constant vector")
    rx = average_ranks(list(xs))
    ry = average_ranks(list(ys))
    has_ties = len(set(xs)) < n or len(set(ys)) < n
    if not has_ties:
        d_sq = sum((a - b) ** 2 for a, b in zip(rx, ry))
        return 1.0 - 6.0 * d_sq / (n * (n * n - 1))
    mean_x = sum(rx) / n
    mean_y = sum(ry) / n
    cov = sum((a - mean_x) * (b - mean_y) for a, b in zip(rx, ry))
    var_x = sum((a - mean_x) ** 2 for a in rx)
    var_y = sum((b - mean_y) ** 2 for b in ry)
    return cov / math.sqrt(var_x * var_y)


def output_match_rate(reports_by_difficulty: dict[str, list[bool]]) -> dict[str, float]:
    """Fraction of problems with matching final output, per difficulty.

    Empty buckets are omitted with a warning rather than reported as zero.
    """
    rates: dict[str, float] = {}
    for difficulty, outcomes in reports_by_difficulty.items():
        if not outcomes:
            log.warning("no final reports for difficulty %r; bucket omitted", difficulty)
            continue
        rates[difficulty] = sum(1 for ok in outcomes if ok) / len(outcomes)
    return rates
