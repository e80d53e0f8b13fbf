# tests/services/test_reproduction.py
"""
Directional reproduction at reduced scale. These take tens of minutes and
only run with --runslow.
"""
import numpy as np
import pytest

from app.services.experiment_service import build_config, run_experiment
from app.services.stats_service import wilcoxon_ranksum

REPETITIONS = 20
BUDGET = 200_000


def _finals(tmp_path, settings, problem, method):
    config = build_config({
        "problem": problem,
        "method": method,
        "max_evaluations": BUDGET,
        "repetitions": REPETITIONS,
        "seed": 0,
    })
    return np.array([r.final_error for r in run_experiment(config, output_dir=tmp_path, settings=settings)])


@pytest.mark.slow
@pytest.mark.parametrize("problem", ["syn5", "sinc"])
@pytest.mark.parametrize("family", ["DE", "CMA-ES"])
def test_symmetry_breaking_does_not_hurt(problem, family, tmp_path, test_settings):
    plain = _finals(tmp_path, test_settings, problem, family)
    broken = _finals(tmp_path, test_settings, problem, f"{family}-SB")
    assert np.median(broken) <= np.median(plain)
    if problem == "sinc":
        assert wilcoxon_ranksum(broken, plain) < 0.05


@pytest.mark.slow
def test_greedy_and_brute_force_agree(tmp_path, test_settings):
    greedy = _finals(tmp_path, test_settings, "syn5", "DE-SB")
    exact = _finals(tmp_path, test_settings, "syn5", "DE-SB-BF")
    ratio = np.median(greedy) / np.median(exact)
    assert 0.5 < ratio < 2.0
    assert wilcoxon_ranksum(greedy, exact) > 0.05
