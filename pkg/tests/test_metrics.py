"""Metric formulas against hand arithmetic and brute-force oracles."""

import json
import math
import random

import numpy as np
import pytest

from ace.errors import InputError, UndefinedCorrelationError
from ace.metrics import (
    ModelRunRecord,
    SubtopicRelevanceMatrix,
    TopicEntry,
    dwpm,
    effective_size,
    load_model_specs,
    output_match_rate,
    penalized_entropy,
    pielou_evenness,
    records_from_runs,
    relevance_matrix_from_transcripts,
    spearman_rho,
    write_correlation_report,
    write_coverage_report,
    write_robustness_report,
)

# -- oracles ------------------------------------------------------------------


def brute_ranks(values):
    """O(n^2) average ranks straight from the definition."""
    return [
        1 + sum(1 for u in values if u < x) + (sum(1 for u in values if u == x) - 1) / 2
        for x in values
    ]


def spearman_oracle(xs, ys):
    rx, ry = brute_ranks(xs), brute_ranks(ys)
    return float(np.corrcoef(rx, ry)[0, 1])


# -- entropy / evenness ----------------------------------------------------------


def _entry(topic, pairs):
    return TopicEntry(topic, tuple(pairs))


def test_uniform_unshared_entropy_is_ln_k():
    entry = _entry("t", [("a", 1.0), ("b", 1.0), ("c", 1.0), ("d", 1.0)])
    assert penalized_entropy(entry, {}) == pytest.approx(math.log(4), abs=1e-12)
    assert pielou_evenness(entry, {}) == pytest.approx(1.0, abs=1e-12)


def test_single_subtopic_entropy_zero_evenness_one():
    entry = _entry("t", [("only", 2.0)])
    assert penalized_entropy(entry, {}) == 0.0
    assert pielou_evenness(entry, {}) == 1.0


def test_two_subtopic_hand_arithmetic():
    entry = _entry("t", [("a", 0.9), ("b", 0.1)])
    expected_h = -(0.9 * math.log(0.9) + 0.1 * math.log(0.1))
    assert penalized_entropy(entry, {}) == pytest.approx(expected_h, abs=1e-12)
    assert expected_h == pytest.approx(0.3251, abs=1e-4)
    assert pielou_evenness(entry, {}) == pytest.approx(expected_h / math.log(2), abs=1e-12)
    assert pielou_evenness(entry, {}) == pytest.approx(0.4690, abs=1e-4)


def test_sharing_penalty_downweights_shared_subtopics():
    entry = _entry("t", [("shared", 1.0), ("unique", 1.0)])
    sharing = {"shared": 4, "unique": 1}
    # w = (0.25, 1.0) -> p(shared) = 0.2
    probs = [0.25 / 1.25, 1.0 / 1.25]
    expected = -sum(p * math.log(p) for p in probs)
    assert penalized_entropy(entry, sharing) == pytest.approx(expected, abs=1e-12)


def test_all_zero_weights_is_input_error():
    entry = _entry("t", [("a", 0.0), ("b", 0.0)])
    with pytest.raises(InputError):
        penalized_entropy(entry, {})


def test_entropy_bounds_and_penalty_monotonicity_random():
    rng = random.Random(11)
    for _ in range(300):
        k = rng.randint(1, 8)
        pairs = [(f"s{i}", rng.uniform(0.01, 5.0)) for i in range(k)]
        sharing = {f"s{i}": rng.randint(1, 6) for i in range(k)}
        entry = _entry("t", pairs)
        h = penalized_entropy(entry, sharing)
        j = pielou_evenness(entry, sharing)
        assert h <= math.log(k) + 1e-12
        assert 0.0 <= j <= 1.0 + 1e-12
        # Increasing one subtopic's sharing never increases its own p_i.
        target = rng.randrange(k)
        bumped = dict(sharing)
        bumped[f"s{target}"] += rng.randint(1, 3)

        def prob(entry, sharing, idx):
            weights = [w / sharing.get(name, 1) for name, w in entry.subtopics]
            return weights[idx] / sum(weights)

        assert prob(entry, bumped, target) <= prob(entry, sharing, target) + 1e-15


def test_matrix_builder_counts_sharing():
    matrix = SubtopicRelevanceMatrix.from_entries(
        [
            _entry("t1", [("common", 1.0), ("one", 1.0)]),
            _entry("t2", [("common", 2.0), ("two", 1.0)]),
        ]
    )
    assert matrix.sharing == {"common": 2, "one": 1, "two": 1}


# -- DWPM / effective size --------------------------------------------------------


def _record(name="m", params=7.0, precision=8.0, solved=(50, 40, 25), totals=(50, 50, 50)):
    return ModelRunRecord(name, params, precision, solved, totals)


def test_dwpm_all_solved_is_one():
    assert dwpm(_record(solved=(50, 50, 50))) == pytest.approx(1.0, abs=1e-12)


def test_dwpm_hand_arithmetic():
    assert dwpm(_record(solved=(50, 40, 25))) == pytest.approx(0.69, abs=1e-12)


def test_dwpm_empty_bucket_is_input_error():
    with pytest.raises(InputError):
        dwpm(_record(totals=(50, 0, 50), solved=(10, 0, 10)))


def test_dwpm_monotone_in_each_difficulty():
    rng = random.Random(5)
    for _ in range(300):
        totals = tuple(rng.randint(1, 60) for _ in range(3))
        solved = tuple(rng.randint(0, t) for t in totals)
        base = dwpm(_record(solved=solved, totals=totals))
        for d in range(3):
            if solved[d] < totals[d]:
                bumped = list(solved)
                bumped[d] += 1
                assert dwpm(_record(solved=tuple(bumped), totals=totals)) >= base - 1e-15


def test_effective_size_fixture_values():
    fixtures = [
        (27.0, 4.0, 27.40),
        (17.0, 16.0, 18.60),
        (15.0, 16.0, 16.60),
        (15.0, 8.0, 15.80),
        (8.0, 16.0, 9.60),
        (7.0, 16.0, 8.60),
        (7.0, 8.0, 7.80),
    ]
    for params, precision, expected in fixtures:
        record = _record(params=params, precision=precision)
        assert effective_size(record) == pytest.approx(expected, abs=1e-12)


def test_effective_size_strictly_increasing():
    base = effective_size(_record(params=7, precision=8))
    assert effective_size(_record(params=7.5, precision=8)) > base
    assert effective_size(_record(params=7, precision=9)) > base


# -- Spearman -----------------------------------------------------------------------


def test_spearman_identical_and_reversed():
    xs = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]
    assert spearman_rho(xs, xs) == pytest.approx(1.0, abs=1e-12)
    assert spearman_rho(xs, list(reversed(xs))) == pytest.approx(-1.0, abs=1e-12)


def test_spearman_matches_oracle_with_and_without_ties():
    rng = random.Random(3)
    for _ in range(300):
        n = rng.randint(2, 50)
        xs = [rng.uniform(-5, 5) for _ in range(n)]
        ys = [rng.uniform(-5, 5) for _ in range(n)]
        if rng.random() < 0.5 and n >= 3:  # inject ties
            xs[1] = xs[0]
            ys[-1] = ys[0]
        if len(set(xs)) == 1 or len(set(ys)) == 1:
            continue
        assert spearman_rho(xs, ys) == pytest.approx(spearman_oracle(xs, ys), abs=1e-12)
        assert -1.0 - 1e-12 <= spearman_rho(xs, ys) <= 1.0 + 1e-12


def test_spearman_errors():
    with pytest.raises(InputError):
        spearman_rho([1.0], [1.0])
    with pytest.raises(InputError):
        spearman_rho([1.0, 2.0], [1.0])
    with pytest.raises(UndefinedCorrelationError):
        spearman_rho([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])


# -- output match rate ---------------------------------------------------------------


def test_output_match_rate_fractions():
    rates = output_match_rate(
        {
            "easy": [True] * 50,
            "medium": [False] * 50,
            "hard": [True] * 48 + [False] * 2,
        }
    )
    assert rates["easy"] == pytest.approx(1.0)
    assert rates["medium"] == pytest.approx(0.0)
    assert rates["hard"] == pytest.approx(0.96)


def test_output_match_rate_omits_empty_bucket():
    rates = output_match_rate({"easy": [True], "hard": []})
    assert "hard" not in rates


# -- report files ----------------------------------------------------------------------


def _write_transcript(path, topic, items):
    path.write_text(
        json.dumps({"kind": "quiz", "topic": topic, "subtopic": "s", "items": items}),
        encoding="utf-8",
    )


def test_reports_round_trip(tmp_path):
    t_dir = tmp_path / "transcripts"
    t_dir.mkdir()
    _write_transcript(
        t_dir / "a.json",
        "topic one",
        [{"subtopic": "shared", "relevance": 1.0}, {"subtopic": "solo", "relevance": 2.0}],
    )
    _write_transcript(t_dir / "b.json", "topic two", [{"subtopic": "shared", "relevance": 3.0}])
    matrix = relevance_matrix_from_transcripts(sorted(t_dir.glob("*.json")))
    assert matrix.sharing == {"shared": 2, "solo": 1}
    coverage = write_coverage_report(matrix, tmp_path / "out")
    assert coverage.exists()
    assert (tmp_path / "out" / "coverage.json").exists()
    rows = json.loads((tmp_path / "out" / "coverage.json").read_text())["rows"]
    assert {row["topic"] for row in rows} == {"topic one", "topic two"}

    runs = tmp_path / "runs"
    for model, outcomes in (("big-model", [True, True]), ("small-model", [True, False])):
        model_dir = runs / model
        model_dir.mkdir(parents=True)
        for i, ok in enumerate(outcomes):
            for difficulty in ("easy", "medium", "hard"):
                (model_dir / f"p{i}_{difficulty}.json").write_text(
                    json.dumps(
                        {"problem_id": f"p{i}", "difficulty": difficulty, "completed": ok}
                    )
                )
    models = tmp_path / "models.json"
    models.write_text(
        json.dumps(
            [
                {"name": "big-model", "params_billions": 27, "precision_bits": 4},
                {"name": "small-model", "params_billions": 7, "precision_bits": 8},
            ]
        )
    )
    records = records_from_runs(runs, load_model_specs(models))
    assert len(records) == 2
    robustness = write_robustness_report(records, tmp_path / "out")
    assert robustness.exists()
    correlation = write_correlation_report(records, tmp_path / "out")
    payload = json.loads(correlation.read_text())
    assert payload["n"] == 2
    assert payload["rho"] == pytest.approx(1.0)
    assert "formula_version" in payload
