# app/services/experiment_service.py

from __future__ import annotations

import asyncio
import json
import logging
import time
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError
from sqlalchemy import select
from sqlalchemy.orm import Session

from app.core.config import Settings, get_settings
from app.core.errors import ConfigValidationError
from app.data.datasets import Dataset, NormStats
from app.data.digits import load_digits
from app.data.generators import generate
from app.data.preprocessing import fit_normalize, split
from app.data.problems import DatasetKind, ProblemSpec, get_problem
from app.evolve.cmaes import cmaes_init, cmaes_step
from app.evolve.de import de_init, de_step
from app.evolve.methods import Family, population_centroid
from app.models.experiment_run import ExperimentRun
from app.net.network import NetworkObjective, classification_error_rate
from app.net.topology import Topology
from app.schemas.experiment import ExperimentConfig

logger = logging.getLogger(__name__)

# Mixed into the data seed so the sampled dataset never shares a stream
# with run 0 of the same experiment.
DATA_STREAM_TAG = 0x0DA7A


# =============================================================================
# CONFIGURATION
# =============================================================================


def build_config(values: Mapping[str, Any]) -> ExperimentConfig:
    """Validate raw key/value settings into an ExperimentConfig."""
    try:
        return ExperimentConfig.model_validate(dict(values))
    except ValidationError as exc:
        messages = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}"
            for err in exc.errors()
        )
        raise ConfigValidationError(messages) from exc


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Read a TOML experiment file; keys mirror ExperimentConfig fields."""
    path = Path(path)
    try:
        with path.open("rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigValidationError(f"config file {path} not found") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigValidationError(f"config file {path}: {exc}") from exc


# =============================================================================
# DATA
# =============================================================================


@dataclass(frozen=True)
class ProblemData:
    """Normalized splits; validation/test are None for regression problems."""

    train: Dataset
    validation: Optional[Dataset]
    test: Optional[Dataset]
    stats: NormStats


def prepare_data(config: ExperimentConfig) -> ProblemData:
    """
    Sample (or load) the experiment's dataset once, split it when the problem
    has held-out sets and normalize with statistics of the training part.
    """
    spec = get_problem(config.problem)
    rng = np.random.default_rng([config.seed, DATA_STREAM_TAG])

    if not spec.is_generated:
        parts = load_digits(config.data_path, rng)
        train, validation, test = parts.train, parts.validation, parts.test
    else:
        full = generate(spec.problem_id, config.sample_count, config.noise_sd, rng)
        if spec.split_sizes is not None:
            parts = split(full, spec.split_sizes, rng)
            train, validation, test = parts.train, parts.validation, parts.test
        else:
            train, validation, test = full, None, None

    train, stats = fit_normalize(train)
    return ProblemData(
        train=train,
        validation=stats.apply(validation) if validation is not None else None,
        test=stats.apply(test) if test is not None else None,
        stats=stats,
    )


# =============================================================================
# TRACES
# =============================================================================


@dataclass
class ConvergenceTrace:
    eval_counts: List[int] = field(default_factory=list)
    best_errors: List[float] = field(default_factory=list)
    train_error_rates: Optional[List[float]] = None
    test_error_rates: Optional[List[float]] = None

    @property
    def has_error_rates(self) -> bool:
        return self.train_error_rates is not None

    def __len__(self) -> int:
        return len(self.eval_counts)

    @property
    def final_error(self) -> float:
        return self.best_errors[-1]

    def to_frame(self) -> pd.DataFrame:
        columns: Dict[str, Any] = {
            "eval_count": np.asarray(self.eval_counts, dtype=np.int64),
            "best_error": np.asarray(self.best_errors, dtype=float),
        }
        if self.has_error_rates:
            columns["train_err_rate"] = np.asarray(self.train_error_rates, dtype=float)
            columns["test_err_rate"] = np.asarray(self.test_error_rates, dtype=float)
        return pd.DataFrame(columns)


class _TraceRecorder:
    """
    Appends one row per generation. For classification problems the train
    and test error rates only move when the validation error rate of a new
    best candidate strictly improves; the first row is always gated in.
    """

    def __init__(self, topology: Topology, data: ProblemData, classification: bool) -> None:
        self.topology = topology
        self.data = data
        gated = classification and data.validation is not None
        self.trace = ConvergenceTrace(
            train_error_rates=[] if gated else None,
            test_error_rates=[] if gated else None,
        )
        self._best_validation = np.inf
        self._train_rate = np.nan
        self._test_rate = np.nan
        self._last_best = np.inf

    def record(self, eval_count: int, best_error: float, best_candidate: np.ndarray) -> None:
        trace = self.trace
        if trace.has_error_rates and (not len(trace) or best_error < self._last_best):
            self._gate(best_candidate, first=not len(trace))
        self._last_best = min(self._last_best, best_error)

        trace.eval_counts.append(int(eval_count))
        trace.best_errors.append(float(best_error))
        if trace.has_error_rates:
            trace.train_error_rates.append(self._train_rate)
            trace.test_error_rates.append(self._test_rate)

    def _gate(self, candidate: np.ndarray, first: bool) -> None:
        train, validation, test = self.data.train, self.data.validation, self.data.test
        rate = classification_error_rate(self.topology, candidate, train, validation)
        if first or rate < self._best_validation:
            self._best_validation = rate
            self._train_rate = classification_error_rate(self.topology, candidate, train, train)
            self._test_rate = classification_error_rate(self.topology, candidate, train, test)


# =============================================================================
# RUNS
# =============================================================================


@dataclass
class RunResult:
    run_index: int
    seed: int
    trace: ConvergenceTrace
    wall_time_s: float
    trace_path: Optional[Path] = None

    @property
    def final_error(self) -> float:
        return self.trace.final_error

    @property
    def evaluations(self) -> int:
        return self.trace.eval_counts[-1]

    @property
    def final_train_error_rate(self) -> Optional[float]:
        rates = self.trace.train_error_rates
        return rates[-1] if rates else None

    @property
    def final_test_error_rate(self) -> Optional[float]:
        rates = self.trace.test_error_rates
        return rates[-1] if rates else None


def run_single(
    config: ExperimentConfig,
    data: ProblemData,
    run_index: int,
    brute_force_cap: Optional[int] = None,
) -> RunResult:
    """One independent optimization run seeded with seed + run_index."""
    spec: ProblemSpec = get_problem(config.problem)
    topology = spec.build_topology(config.topology)
    objective = NetworkObjective(topology, data.train, config.penalty_rescale)
    seed = config.seed + run_index
    rng = np.random.default_rng(seed)
    method = config.method
    sb_mode = method.sb_mode
    n_pop = config.population_size
    budget = config.max_evaluations

    recorder = _TraceRecorder(topology, data, spec.kind is DatasetKind.CLASSIFICATION)
    started = time.perf_counter()

    if method.family is Family.DE:
        pop = de_init(topology.dimension, n_pop, rng, objective)
        recorder.record(pop.eval_count, pop.best_error, pop.best_candidate)
        while pop.eval_count + n_pop <= budget:
            goal = population_centroid(pop.candidates) if sb_mode.needs_goal else None
            pop = de_step(
                pop, objective, sb_mode, goal, rng,
                topology=topology, brute_force_cap=brute_force_cap,
            )
            recorder.record(pop.eval_count, pop.best_error, pop.best_candidate)
    else:
        state = cmaes_init(topology.dimension, n_pop)
        while state.eval_count + n_pop <= budget:
            state = cmaes_step(
                state, objective, sb_mode, rng,
                topology=topology, brute_force_cap=brute_force_cap,
            )
            recorder.record(state.eval_count, state.best_error, state.best_candidate)

    wall = time.perf_counter() - started
    logger.info(
        "%s %s run %d: final error %.6g after %d evaluations (%.1fs)",
        config.problem, method.value, run_index,
        recorder.trace.final_error, recorder.trace.eval_counts[-1], wall,
    )
    return RunResult(run_index=run_index, seed=seed, trace=recorder.trace, wall_time_s=wall)


def trace_directory(output_dir: Union[str, Path], config: ExperimentConfig) -> Path:
    return Path(output_dir) / config.problem / config.method.value


def write_run(result: RunResult, config: ExperimentConfig, directory: Path) -> Path:
    """Write run_NNN.csv and run_NNN.meta.json; returns the trace path."""
    directory.mkdir(parents=True, exist_ok=True)
    stem = f"run_{result.run_index:03d}"
    trace_path = directory / f"{stem}.csv"
    result.trace.to_frame().to_csv(trace_path, index=False, float_format="%.17g")

    meta = {
        "run_index": result.run_index,
        "seed": result.seed,
        "wall_time_s": result.wall_time_s,
        "evaluations": result.evaluations,
        "final_error": result.final_error,
        "final_train_error_rate": result.final_train_error_rate,
        "final_test_error_rate": result.final_test_error_rate,
        "config": config.model_dump(mode="json"),
    }
    (directory / f"{stem}.meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    result.trace_path = trace_path
    return trace_path


def run_experiment(
    config: ExperimentConfig,
    *,
    output_dir: Optional[Union[str, Path]] = None,
    workers: Optional[int] = None,
    brute_force_cap: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> List[RunResult]:
    """
    All repetitions of one problem x method pair. Runs may execute in worker
    processes; files are written afterwards in run-index order.
    """
    settings = settings or get_settings()
    output_dir = Path(output_dir) if output_dir is not None else settings.output_path
    workers = workers or settings.workers
    cap = brute_force_cap if brute_force_cap is not None else settings.brute_force_cap

    logger.info(
        "Starting %s on %s (%s, Np=%d, %d evaluations, %d repetitions)",
        config.method.value, config.problem, config.topology,
        config.population_size, config.max_evaluations, config.repetitions,
    )
    data = prepare_data(config)
    indices = range(config.repetitions)

    if workers > 1 and config.repetitions > 1:
        with ProcessPoolExecutor(max_workers=min(workers, config.repetitions)) as pool:
            futures = [pool.submit(run_single, config, data, i, cap) for i in indices]
            results = [f.result() for f in futures]
    else:
        results = [run_single(config, data, i, cap) for i in indices]

    directory = trace_directory(output_dir, config)
    for result in results:
        write_run(result, config, directory)
    logger.info("Finished %s on %s, traces in %s", config.method.value, config.problem, directory)
    return results


# =============================================================================
# RUN REGISTRY
# =============================================================================


def record_runs(db: Session, config: ExperimentConfig, results: List[RunResult]) -> List[ExperimentRun]:
    rows = [
        ExperimentRun(
            problem=config.problem,
            method=config.method.value,
            run_index=r.run_index,
            seed=r.seed,
            final_error=r.final_error,
            final_test_error_rate=r.final_test_error_rate,
            evaluations=r.evaluations,
            wall_time_s=r.wall_time_s,
            trace_path=str(r.trace_path) if r.trace_path else None,
        )
        for r in results
    ]
    db.add_all(rows)
    db.commit()
    for row in rows:
        db.refresh(row)
    return rows


def list_runs(
    db: Session,
    problem: Optional[str] = None,
    method: Optional[str] = None,
) -> List[ExperimentRun]:
    stmt = select(ExperimentRun)
    if problem:
        stmt = stmt.where(ExperimentRun.problem == problem)
    if method:
        stmt = stmt.where(ExperimentRun.method == method)
    stmt = stmt.order_by(ExperimentRun.created_at, ExperimentRun.run_index)
    return list(db.scalars(stmt).all())


# =============================================================================
# ExperimentService CLASS WRAPPER
# =============================================================================


class ExperimentService:
    """
    Async facade used by the routers; the optimizers are CPU-bound and run
    in a worker thread.
    """

    def __init__(self, settings: Optional[Settings] = None) -> None:
        self.settings = settings or get_settings()

    async def run(self, config: ExperimentConfig) -> List[RunResult]:
        return await asyncio.to_thread(run_experiment, config, settings=self.settings)

    def record(self, db: Session, config: ExperimentConfig, results: List[RunResult]) -> List[ExperimentRun]:
        return record_runs(db, config, results)

    def list_runs(
        self,
        db: Session,
        problem: Optional[str] = None,
        method: Optional[str] = None,
    ) -> List[ExperimentRun]:
        return list_runs(db, problem, method)


# =============================================================================
# FastAPI dependency
# =============================================================================


def get_experiment_service() -> ExperimentService:
    return ExperimentService(get_settings())
