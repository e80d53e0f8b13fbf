# app/cli.py

"""
Command line entrypoint.

    python -m app run --problem syn5 --method DE-SB --reps 5 --out runs
    python -m app run --config experiment.toml --seed 3
    python -m app report --in runs [--problem syn5]
    python -m app list-problems

Exit status: 0 on success, 2 for configuration errors, 1 for any other
failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import Any, Dict, List, Optional, Sequence

from app.core.config import get_settings
from app.core.errors import ConfigValidationError, NeuroevoError, UnknownProblemError
from app.core.logging import configure_logging
from app.data.problems import list_problems
from app.services.experiment_service import build_config, load_config_file, run_experiment
from app.services.stats_service import build_report, discover_problems, render_text

EXIT_FAILURE = 1
EXIT_CONFIG = 2

# CLI flag -> ExperimentConfig field
_RUN_OVERRIDES = {
    "problem": "problem",
    "method": "method",
    "np": "population_size",
    "evals": "max_evaluations",
    "reps": "repetitions",
    "seed": "seed",
    "noise": "noise_sd",
    "samples": "sample_count",
    "topology": "topology",
    "data": "data_path",
    "rescale": "penalty_rescale",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neuroevo",
        description="Neuroevolution with symmetry breaking: experiments and reports.",
    )
    parser.add_argument("--log-level", default=None, help="Overrides NEUROEVO_LOG_LEVEL.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run all repetitions of one problem x method experiment.")
    run.add_argument("--config", help="TOML file with ExperimentConfig keys; flags override it.")
    run.add_argument("--problem")
    run.add_argument("--method", help="DE, DE-INV-SB, DE-SB, DE-SB-BF or the CMA-ES equivalents.")
    run.add_argument("--np", type=int, help="Population size.")
    run.add_argument("--evals", type=int, help="Evaluation budget per run.")
    run.add_argument("--reps", type=int, help="Independent repetitions.")
    run.add_argument("--seed", type=int)
    run.add_argument("--noise", type=float, help="Target noise standard deviation.")
    run.add_argument("--samples", type=int, help="Generated sample count.")
    run.add_argument("--topology", help="Layer sizes such as 1-3-1.")
    run.add_argument("--data", help="Dataset file for problems that are not generated.")
    run.add_argument("--rescale", choices=["unit", "radius"], help="Infeasible point rescaling.")
    run.add_argument("--out", help="Trace root directory (default NEUROEVO_OUTPUT_DIR).")
    run.add_argument("--workers", type=int, help="Parallel runs (default NEUROEVO_WORKERS).")

    report = sub.add_parser("report", help="Statistics and normalized table from trace files.")
    report.add_argument("--in", dest="input_dir", required=True)
    report.add_argument("--problem", help="Only this problem (default: every problem found).")
    report.add_argument("--alpha", type=float, help="Significance level (default NEUROEVO_ALPHA).")

    sub.add_parser("list-problems", help="Show the problem catalogue.")
    return parser


def _run(args: argparse.Namespace) -> int:
    values: Dict[str, Any] = load_config_file(args.config) if args.config else {}
    for flag, key in _RUN_OVERRIDES.items():
        value = getattr(args, flag)
        if value is not None:
            values[key] = value
    config = build_config(values)

    results = run_experiment(config, output_dir=args.out, workers=args.workers)
    for r in results:
        line = f"run {r.run_index:3d}  seed {r.seed:6d}  evals {r.evaluations:8d}  error {r.final_error:.6g}"
        if r.final_test_error_rate is not None:
            line += f"  test error rate {r.final_test_error_rate:.4f}"
        print(line)
    return 0


def _report(args: argparse.Namespace) -> int:
    problems: List[str] = [args.problem] if args.problem else discover_problems(args.input_dir)
    if not problems:
        raise ConfigValidationError(f"no traces found under {args.input_dir}")
    for problem in problems:
        print(render_text(build_report(args.input_dir, problem, args.alpha)))
        print()
    return 0


def _list_problems(_: argparse.Namespace) -> int:
    print(f"{'problem':<16}{'kind':<16}{'topology':<22}{'samples':>8}{'DE Np':>7}{'CMA Np':>8}{'evals':>10}")
    for spec in list_problems():
        print(
            f"{spec.problem_id:<16}{spec.kind.value:<16}{spec.topology:<22}"
            f"{spec.sample_count:>8}{spec.de_population:>7}{spec.cmaes_population:>8}"
            f"{spec.max_evaluations:>10}"
        )
    return 0


_COMMANDS = {
    "run": _run,
    "report": _report,
    "list-problems": _list_problems,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        configure_logging(args.log_level or get_settings().log_level)
        return _COMMANDS[args.command](args)
    except (ConfigValidationError, UnknownProblemError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NeuroevoError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
