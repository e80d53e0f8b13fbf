# tests/services/test_experiment_service.py
import json

import numpy as np
import pandas as pd
import pytest

from app.core.errors import ConfigValidationError
from app.evolve.methods import Method
from app.services import experiment_service
from app.services.experiment_service import (
    build_config,
    list_runs,
    load_config_file,
    prepare_data,
    record_runs,
    run_experiment,
)
from app.services.stats_service import build_report


def _small(problem="syn5", method="DE", **overrides):
    values = {
        "problem": problem,
        "method": method,
        "population_size": 8,
        "max_evaluations": 80,
        "repetitions": 2,
        "seed": 3,
    }
    values.update(overrides)
    return build_config(values)


# -----------------------------------------------------------------------------
# Configuration
# -----------------------------------------------------------------------------


def test_defaults_come_from_the_catalogue():
    config = build_config({"problem": "syn5", "method": "DE"})
    assert config.population_size == 80
    assert config.topology == "1-3-1"
    assert config.sample_count == 200
    assert config.repetitions == 50

    config = build_config({"problem": "sinc", "method": "CMA-ES"})
    assert config.population_size == 400
    assert config.topology == "1-5-1"


@pytest.mark.parametrize(
    "values",
    [
        {"problem": "syn5", "method": "DE", "topology": "2-3-1"},
        {"problem": "syn5", "method": "CMA-ES", "population_size": 9},
        {"problem": "syn5", "method": "DE", "population_size": 3},
        {"problem": "syn5", "method": "DE", "population_size": 20, "max_evaluations": 10},
        {"problem": "nope", "method": "DE"},
        {"problem": "syn5", "method": "GA"},
        {"problem": "digits", "method": "DE"},
        {"problem": "autoenc-sphere", "method": "DE-SB-BF"},
        {"problem": "two-circles", "method": "DE", "sample_count": 500},
        {"problem": "syn5", "method": "DE", "colour": "red"},
    ],
)
def test_invalid_configs_are_rejected(values):
    with pytest.raises(ConfigValidationError):
        build_config(values)


def test_load_config_file(tmp_path):
    path = tmp_path / "exp.toml"
    path.write_text('problem = "sinc"\nmethod = "CMA-ES-SB"\nrepetitions = 3\nseed = 11\n')
    config = build_config(load_config_file(path))
    assert config.method is Method.CMA_ES_SB
    assert config.repetitions == 3

    (tmp_path / "broken.toml").write_text("problem = \n")
    with pytest.raises(ConfigValidationError):
        load_config_file(tmp_path / "broken.toml")
    with pytest.raises(ConfigValidationError):
        load_config_file(tmp_path / "missing.toml")


# -----------------------------------------------------------------------------
# Data preparation
# -----------------------------------------------------------------------------


def test_prepare_data_splits_and_normalizes():
    data = prepare_data(_small("two-circles", topology="2-3-2"))
    assert (len(data.train), len(data.validation), len(data.test)) == (400, 400, 400)
    assert np.allclose(data.train.inputs.mean(axis=0), 0.0, atol=1e-12)
    assert np.allclose(data.train.inputs.std(axis=0), 1.0)


def test_prepare_data_regression_uses_all_samples():
    data = prepare_data(_small())
    assert len(data.train) == 200
    assert data.validation is None and data.test is None
    assert np.allclose(data.train.targets.mean(), 0.0, atol=1e-12)


# -----------------------------------------------------------------------------
# Runs and traces
# -----------------------------------------------------------------------------


def _trace_files(root, config):
    directory = root / config.problem / config.method.value
    return sorted(directory.glob("run_*.csv"))


@pytest.mark.parametrize("method", [m.value for m in Method])
def test_every_method_runs_and_writes_traces(method, tmp_path, test_settings):
    config = _small(method=method)
    results = run_experiment(config, output_dir=tmp_path, settings=test_settings)

    assert [r.run_index for r in results] == [0, 1]
    assert [r.seed for r in results] == [3, 4]
    files = _trace_files(tmp_path, config)
    assert [f.name for f in files] == ["run_000.csv", "run_001.csv"]

    for result, path in zip(results, files):
        frame = pd.read_csv(path)
        assert list(frame.columns) == ["eval_count", "best_error"]
        assert np.all(np.diff(frame["eval_count"]) > 0)
        assert np.all(np.diff(frame["best_error"]) <= 0)
        assert frame["eval_count"].iloc[-1] <= 80
        assert result.final_error == pytest.approx(frame["best_error"].iloc[-1], rel=1e-15)

        meta = json.loads(path.with_suffix(".meta.json").read_text())
        assert meta["seed"] == result.seed
        assert meta["config"]["method"] == method


def test_reruns_are_byte_identical(tmp_path, test_settings):
    config = _small(method="DE-SB")
    run_experiment(config, output_dir=tmp_path / "a", settings=test_settings)
    run_experiment(config, output_dir=tmp_path / "b", settings=test_settings)
    for first, second in zip(_trace_files(tmp_path / "a", config), _trace_files(tmp_path / "b", config)):
        assert first.read_bytes() == second.read_bytes()


def test_classification_traces_carry_gated_error_rates(tmp_path, test_settings):
    config = _small("two-circles", "CMA-ES-SB", topology="2-3-2", max_evaluations=64, repetitions=1)
    (result,) = run_experiment(config, output_dir=tmp_path, settings=test_settings)

    frame = pd.read_csv(result.trace_path)
    assert list(frame.columns) == ["eval_count", "best_error", "train_err_rate", "test_err_rate"]
    assert frame[["train_err_rate", "test_err_rate"]].notna().all().all()
    assert frame["train_err_rate"].between(0, 1).all()
    # rates only change on rows where the best error improved
    unchanged = np.diff(frame["best_error"]) == 0
    assert np.all(np.diff(frame["test_err_rate"])[unchanged] == 0)
    assert result.final_test_error_rate == pytest.approx(frame["test_err_rate"].iloc[-1])


def test_registry_round_trip(tmp_path, test_settings, db_session):
    config = _small()
    results = run_experiment(config, output_dir=tmp_path, settings=test_settings)
    rows = record_runs(db_session, config, results)
    assert len(rows) == 2
    assert rows[0].trace_path.endswith("run_000.csv")

    assert len(list_runs(db_session, problem="syn5")) == 2
    assert list_runs(db_session, method="CMA-ES") == []


def test_report_from_written_traces(tmp_path, test_settings):
    for method in ("DE", "DE-INV-SB", "DE-SB"):
        run_experiment(_small(method=method, repetitions=3), output_dir=tmp_path, settings=test_settings)
    report = build_report(tmp_path, "syn5", 0.05)
    assert [r.method for r in report.rows] == ["DE", "DE-INV-SB", "DE-SB"]
    assert all(r.runs == 3 for r in report.rows)
    assert max(r.normalized_mean for r in report.rows) == pytest.approx(1.0)
    assert (tmp_path / "syn5" / "report.json").is_file()
    assert (tmp_path / "syn5" / "normalized_table.csv").is_file()


def test_error_rates_move_only_on_strict_validation_improvement(monkeypatch, classification_data, small_topology):
    train = classification_data
    validation, test = train.subset([0, 1]), train.subset([2, 3])
    rates = {
        "validation": [0.5, 0.4, 0.45, 0.4, 0.1],
        "train": [0.30, 0.25, 0.20, 0.15, 0.05],
        "test": [0.35, 0.30, 0.25, 0.22, 0.20],
    }
    validation_calls = []

    def scripted_rate(topology, candidate, fit_set, eval_set):
        key = int(candidate[0])
        if eval_set is validation:
            validation_calls.append(key)
            return rates["validation"][key]
        return rates["train" if eval_set is train else "test"][key]

    monkeypatch.setattr(experiment_service, "classification_error_rate", scripted_rate)
    data = experiment_service.ProblemData(train, validation, test, stats=None)
    recorder = experiment_service._TraceRecorder(small_topology, data, classification=True)

    def candidate(key):
        return np.full(small_topology.dimension, float(key))

    recorder.record(8, 1.0, candidate(0))
    recorder.record(16, 1.0, candidate(0))  # best unchanged: not re-gated
    recorder.record(24, 0.8, candidate(1))  # 0.4 < 0.5
    recorder.record(32, 0.6, candidate(2))  # 0.45 is worse
    recorder.record(40, 0.5, candidate(3))  # 0.4 ties
    recorder.record(48, 0.4, candidate(4))  # 0.1 < 0.4

    assert validation_calls == [0, 1, 2, 3, 4]
    assert recorder.trace.train_error_rates == [0.30, 0.30, 0.25, 0.25, 0.25, 0.05]
    assert recorder.trace.test_error_rates == [0.35, 0.35, 0.30, 0.30, 0.30, 0.20]
