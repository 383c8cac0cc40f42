"""Evaluation harness: coverage, robustness, and correlation metrics."""

from ace.metrics.formulas import (
    DIFFICULTIES,
    DWPM_WEIGHTS,
    FORMULA_VERSION,
    ModelRunRecord,
    SubtopicRelevanceMatrix,
    TopicEntry,
    average_ranks,
    dwpm,
    effective_size,
    output_match_rate,
    penalized_entropy,
    pielou_evenness,
    spearman_rho,
)
from ace.metrics.reports import (
    load_model_specs,
    match_rates_from_runs,
    records_from_runs,
    relevance_matrix_from_transcripts,
    write_correlation_report,
    write_coverage_report,
    write_robustness_report,
)

__all__ = [
    "DIFFICULTIES",
    "DWPM_WEIGHTS",
    "FORMULA_VERSION",
    "ModelRunRecord",
    "SubtopicRelevanceMatrix",
    "TopicEntry",
    "average_ranks",
    "dwpm",
    "effective_size",
    "load_model_specs",
    "match_rates_from_runs",
    "output_match_rate",
    "penalized_entropy",
    "pielou_evenness",
    "records_from_runs",
    "relevance_matrix_from_transcripts",
    "spearman_rho",
    "write_correlation_report",
    "write_coverage_report",
    "write_robustness_report",
]
