# tests/services/test_stats_service.py
import json

import numpy as np
import pandas as pd
import pytest
from scipy import stats

from app.core.errors import ContractViolation, ReportError
from app.evolve.methods import Method
from app.services.stats_service import (
    collect_final_errors,
    kruskal_wallis,
    normalize_report,
    render_text,
    wilcoxon_ranksum,
    write_report,
)


# -----------------------------------------------------------------------------
# Kruskal-Wallis
# -----------------------------------------------------------------------------


def test_kruskal_identical_groups():
    assert kruskal_wallis([[1.0, 1.0], [1.0, 1.0, 1.0]]) == (0.0, 1.0)


def test_kruskal_hand_computed_case():
    result = kruskal_wallis([[1, 2, 3], [10, 20, 30]])
    # ranks 1..6: H = 12 / (6 * 7) * (6^2 / 3 + 15^2 / 3) - 3 * 7 = 27 / 7
    assert result.statistic == pytest.approx(27 / 7)
    assert result.p_value == pytest.approx(0.0495, abs=1e-3)


def test_kruskal_one_shifted_group():
    groups = [[1, 2, 3, 4, 5], [2, 3, 4, 5, 6], [100, 101, 102, 103, 104]]
    assert kruskal_wallis(groups).p_value < 0.05


def test_kruskal_preconditions():
    with pytest.raises(ContractViolation):
        kruskal_wallis([[1.0, 2.0]])
    with pytest.raises(ContractViolation):
        kruskal_wallis([[1.0], []])


# -----------------------------------------------------------------------------
# Rank-sum
# -----------------------------------------------------------------------------


def test_ranksum_identical_samples():
    assert wilcoxon_ranksum([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 1.0
    assert wilcoxon_ranksum([5.0, 5.0], [5.0]) == 1.0


def test_ranksum_exact_small_case():
    assert wilcoxon_ranksum([1, 2, 3, 4], [10, 11, 12, 13]) == pytest.approx(2 / 70, abs=1e-3)


def test_ranksum_is_symmetric():
    a, b = [0.3, 1.2, 0.9, 2.2, 0.1], [1.5, 2.5, 0.7, 3.1]
    assert wilcoxon_ranksum(a, b) == pytest.approx(wilcoxon_ranksum(b, a))


def test_ranksum_exact_with_ties_is_a_probability():
    p = wilcoxon_ranksum([1.0, 1.0, 2.0], [2.0, 3.0, 3.0])
    assert 0.0 < p <= 1.0


def test_ranksum_single_observation():
    # rank 1 of 4: lower tail 1/4, doubled
    assert wilcoxon_ranksum([1.0], [2.0, 3.0, 4.0]) == pytest.approx(0.5)
    assert wilcoxon_ranksum([1.0], [2.0]) == 1.0


def test_ranksum_exact_matches_mann_whitney_without_ties():
    a, b = [0.3, 1.2, 0.9, 2.2, 0.1], [1.5, 2.5, 0.7, 3.1]
    expected = stats.mannwhitneyu(a, b, alternative="two-sided", method="exact").pvalue
    assert wilcoxon_ranksum(a, b) == pytest.approx(expected)


def test_ranksum_large_samples_use_normal_approximation(rng):
    a = rng.normal(0.0, 1.0, 20)
    b = rng.normal(2.0, 1.0, 25)
    expected = stats.mannwhitneyu(a, b, alternative="two-sided", method="asymptotic").pvalue
    assert wilcoxon_ranksum(a, b) == pytest.approx(expected)
    assert wilcoxon_ranksum(a, b) < 0.01


def test_ranksum_needs_nonempty_samples():
    with pytest.raises(ContractViolation):
        wilcoxon_ranksum([], [1.0])


# -----------------------------------------------------------------------------
# Normalized report
# -----------------------------------------------------------------------------


def test_normalized_by_largest_triple_mean():
    report = normalize_report({"DE": [2.0], "DE-INV-SB": [4.0], "DE-SB": [1.0]})
    assert [r.normalized_mean for r in report.rows] == [0.5, 1.0, 0.25]
    assert [r.best for r in report.rows] == [False, False, True]


def test_equal_means_all_one():
    report = normalize_report({"CMA-ES": [3.0, 3.0], "CMA-ES-INV-SB": [3.0], "CMA-ES-SB": [3.0]})
    assert [r.normalized_mean for r in report.rows] == [1.0, 1.0, 1.0]


def test_sd_is_scaled_too():
    report = normalize_report({"DE": [1.0, 3.0], "DE-INV-SB": [4.0, 4.0], "DE-SB": [1.0, 1.0]})
    row = report.row("DE")
    assert row.sd == pytest.approx(np.std([1.0, 3.0], ddof=1))
    assert row.normalized_sd == pytest.approx(row.sd / 4.0)
    assert row.median == 2.0


def test_brute_force_is_an_optional_extra_column():
    report = normalize_report(
        {"DE": [2.0], "DE-INV-SB": [4.0], "DE-SB": [1.0], "DE-SB-BF": [0.5]}
    )
    bf = report.row("DE-SB-BF")
    assert bf.normalized_mean == 0.125
    assert not bf.best
    assert report.row("DE-SB").best


def test_missing_family_member():
    with pytest.raises(ReportError):
        normalize_report({"DE": [1.0], "DE-SB": [0.5]})
    with pytest.raises(ReportError):
        normalize_report({})


def test_families_are_normalized_separately(rng):
    finals = {
        "DE": rng.uniform(2, 3, 6), "DE-INV-SB": rng.uniform(2, 3, 6), "DE-SB": rng.uniform(0, 1, 6),
        "CMA-ES": rng.uniform(20, 30, 6), "CMA-ES-INV-SB": rng.uniform(20, 30, 6),
        "CMA-ES-SB": rng.uniform(1, 2, 6),
    }
    report = normalize_report(finals, problem="toy")
    assert len(report.rows) == 6
    assert report.row("DE-SB").best and report.row("CMA-ES-SB").best
    assert report.gate_rejected
    assert report.pairwise_p["DE"]["CMA-ES"] == report.pairwise_p["CMA-ES"]["DE"]
    assert all(0.0 <= p <= 1.0 for row in report.pairwise_p.values() for p in row.values())


def test_render_text_marks_best():
    text = render_text(normalize_report({"DE": [2.0], "DE-INV-SB": [4.0], "DE-SB": [1.0]}, problem="syn5"))
    best_line = next(line for line in text.splitlines() if line.startswith("DE-SB"))
    assert "**0.25 +- 0**" in best_line
    assert "Kruskal-Wallis" in text


def test_write_report_files(tmp_path):
    report = normalize_report({"DE": [2.0, 2.5], "DE-INV-SB": [4.0, 3.0], "DE-SB": [1.0, 1.5]}, problem="p")
    path = write_report(report, tmp_path)
    payload = json.loads(path.read_text())
    assert payload["problem"] == "p"
    assert [m["method"] for m in payload["methods"]] == ["DE", "DE-INV-SB", "DE-SB"]
    assert (tmp_path / "normalized_table.csv").is_file()


def test_report_with_single_runs_per_method():
    report = normalize_report({"CMA-ES": [0.3], "CMA-ES-INV-SB": [0.2], "CMA-ES-SB": [0.1]})
    assert report.kruskal is not None
    assert report.pairwise_p["CMA-ES"]["CMA-ES-SB"] == 1.0


# -----------------------------------------------------------------------------
# Trace collection
# -----------------------------------------------------------------------------


def _write_trace(path, **columns):
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(columns).to_csv(path, index=False)


def test_classification_reports_final_test_error_rate(tmp_path):
    for i, (best, test_rate) in enumerate([(0.470, 0.2475), (0.450, 0.275)]):
        _write_trace(
            tmp_path / "two-circles" / "DE" / f"run_{i:03d}.csv",
            eval_count=[80, 160],
            best_error=[0.9, best],
            train_err_rate=[0.5, 0.2],
            test_err_rate=[0.5, test_rate],
        )
    finals = collect_final_errors(tmp_path, "two-circles")
    assert finals == {Method.DE: [0.2475, 0.275]}


def test_regression_reports_final_best_error(tmp_path):
    _write_trace(tmp_path / "sinc" / "CMA-ES" / "run_000.csv", eval_count=[20, 40], best_error=[0.5, 0.125])
    _write_trace(tmp_path / "sinc" / "notes" / "run_000.csv", eval_count=[1], best_error=[9.0])
    assert collect_final_errors(tmp_path, "sinc") == {Method.CMA_ES: [0.125]}
