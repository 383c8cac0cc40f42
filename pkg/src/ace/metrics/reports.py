"""Transcript readers and CSV/JSON report writers for the evaluation harness.

Inputs: quiz session transcripts (one topic each), tutor final reports
organized as runs/<model>/<problem>.json, and a model-spec file listing
{name, params_billions, precision_bits}. Every table is written both as CSV
and as JSON carrying a formula_version field so reinterpretations diff cleanly.
"""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path

from ace.errors import InputError
from ace.metrics.formulas import (
    DIFFICULTIES,
    FORMULA_VERSION,
    ModelRunRecord,
    SubtopicRelevanceMatrix,
    TopicEntry,
    dwpm,
    effective_size,
    output_match_rate,
    penalized_entropy,
    pielou_evenness,
    spearman_rho,
)

log = logging.getLogger(__name__)


def relevance_matrix_from_transcripts(paths: list[Path]) -> SubtopicRelevanceMatrix:
    """Aggregate per-item (subtopic, relevance) records into a topic matrix."""
    weights: dict[str, dict[str, float]] = {}
    for path in paths:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        topic = data.get("topic")
        if not topic:
            raise InputError(f"{path}: transcript has no topic")
        bucket = weights.setdefault(topic, {})
        for item in data.get("items", []):
            subtopic = item.get("subtopic") or data.get("subtopic") or topic
            relevance = float(item.get("relevance", 1.0))
            bucket[subtopic] = bucket.get(subtopic, 0.0) + relevance
    if not weights:
        raise InputError("no quiz transcripts found")
    entries = [
        TopicEntry(topic, tuple(sorted(bucket.items())))
        for topic, bucket in sorted(weights.items())
    ]
    return SubtopicRelevanceMatrix.from_entries(entries)


def load_model_specs(path: Path) -> dict[str, tuple[float, float]]:
    specs = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(specs, list):
        raise InputError(f"{path}: model spec file must be a JSON list")
    out = {}
    for spec in specs:
        out[spec["name"]] = (float(spec["params_billions"]), float(spec["precision_bits"]))
    return out


def records_from_runs(runs_dir: Path, model_specs: dict[str, tuple[float, float]]) -> list[ModelRunRecord]:
    """Fold per-problem final reports under runs/<model>/ into run records."""
    runs_dir = Path(runs_dir)
    records = []
    for model_dir in sorted(p for p in runs_dir.iterdir() if p.is_dir()):
        name = model_dir.name
        if name not in model_specs:
            log.warning("no model spec for %r; skipping its runs", name)
            continue
        solved = {d: 0 for d in DIFFICULTIES}
        totals = {d: 0 for d in DIFFICULTIES}
        for report_path in sorted(model_dir.glob("*.json")):
            report = json.loads(report_path.read_text(encoding="utf-8"))
            difficulty = report.get("difficulty")
            if difficulty not in DIFFICULTIES:
                raise InputError(f"{report_path}: unknown difficulty {difficulty!r}")
            totals[difficulty] += 1
            if report.get("completed"):
                solved[difficulty] += 1
        params, precision = model_specs[name]
        records.append(
            ModelRunRecord(
                model_name=name,
                params_billions=params,
                precision_bits=precision,
                solved_counts=tuple(solved[d] for d in DIFFICULTIES),
                totals=tuple(totals[d] for d in DIFFICULTIES),
            )
        )
    if not records:
        raise InputError(f"no usable model run directories under {runs_dir}")
    return records


def match_rates_from_runs(runs_dir: Path) -> dict[str, dict[str, float]]:
    """Per-model output match rate per difficulty bucket."""
    runs_dir = Path(runs_dir)
    rates = {}
    for model_dir in sorted(p for p in runs_dir.iterdir() if p.is_dir()):
        buckets: dict[str, list[bool]] = {d: [] for d in DIFFICULTIES}
        for report_path in sorted(model_dir.glob("*.json")):
            report = json.loads(report_path.read_text(encoding="utf-8"))
            buckets.setdefault(report["difficulty"], []).append(bool(report.get("completed")))
        rates[model_dir.name] = output_match_rate(buckets)
    return rates


def _write_table(out_dir: Path, stem: str, fieldnames: list[str], rows: list[dict]) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / f"{stem}.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
    payload = {"formula_version": FORMULA_VERSION, "rows": rows}
    (out_dir / f"{stem}.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def write_coverage_report(matrix: SubtopicRelevanceMatrix, out_dir: Path) -> Path:
    rows = []
    for entry in matrix.topics:
        rows.append(
            {
                "topic": entry.topic,
                "H_pen": penalized_entropy(entry, matrix.sharing),
                "J": pielou_evenness(entry, matrix.sharing),
                "k": len(entry.subtopics),
            }
        )
    _write_table(Path(out_dir), "coverage", ["topic", "H_pen", "J", "k"], rows)
    return Path(out_dir) / "coverage.csv"


def write_robustness_report(records: list[ModelRunRecord], out_dir: Path) -> Path:
    rows = []
    for record in records:
        a_easy, a_med, a_hard = (
            c / n for c, n in zip(record.solved_counts, record.totals)
        )
        rows.append(
            {
                "model": record.model_name,
                "A_easy": a_easy,
                "A_med": a_med,
                "A_hard": a_hard,
                "DWPM": dwpm(record),
                "effective_size": effective_size(record),
            }
        )
    _write_table(
        Path(out_dir),
        "robustness",
        ["model", "A_easy", "A_med", "A_hard", "DWPM", "effective_size"],
        rows,
    )
    return Path(out_dir) / "robustness.csv"


def write_correlation_report(records: list[ModelRunRecord], out_dir: Path) -> Path:
    sizes = [effective_size(r) for r in records]
    scores = [dwpm(r) for r in records]
    n = len(records)
    tie_count = (n - len(set(sizes))) + (n - len(set(scores)))
    payload = {
        "formula_version": FORMULA_VERSION,
        "rho": spearman_rho(sizes, scores),
        "n": n,
        "tie_count": tie_count,
    }
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "correlation.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    with open(out_dir / "correlation.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=["rho", "n", "tie_count"])
        writer.writeheader()
        writer.writerow({k: payload[k] for k in ("rho", "n", "tie_count")})
    return path
