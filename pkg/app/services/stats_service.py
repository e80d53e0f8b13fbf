# app/services/stats_service.py

from __future__ import annotations

import asyncio
import itertools
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy import stats

from app.core.config import Settings, get_settings
from app.core.errors import ContractViolation, ReportError
from app.evolve.methods import Family, Method, SbMode

logger = logging.getLogger(__name__)

# Below this size on both sides the rank-sum p-value is computed by
# enumerating every assignment of ranks.
EXACT_RANKSUM_LIMIT = 10

TRIPLE_MODES = (SbMode.NONE, SbMode.INVARIANT, SbMode.MGOP)

# present only in classification traces
FINAL_TEST_COLUMN = "test_err_rate"


# =============================================================================
# TESTS
# =============================================================================


class KruskalResult(NamedTuple):
    statistic: float
    p_value: float


def _as_groups(samples: Sequence[Sequence[float]], minimum: int) -> List[np.ndarray]:
    groups = [np.asarray(s, dtype=float).ravel() for s in samples]
    if len(groups) < minimum:
        raise ContractViolation(f"need at least {minimum} groups, got {len(groups)}")
    if any(g.size == 0 for g in groups):
        raise ContractViolation("every group must be nonempty")
    return groups


def _all_identical(groups: Sequence[np.ndarray]) -> bool:
    pooled = np.concatenate(groups)
    return bool(np.all(pooled == pooled[0]))


def kruskal_wallis(samples: Sequence[Sequence[float]]) -> KruskalResult:
    """H statistic with tie correction and its chi-square p-value."""
    groups = _as_groups(samples, 2)
    if _all_identical(groups):
        return KruskalResult(0.0, 1.0)
    result = stats.kruskal(*groups)
    return KruskalResult(float(result.statistic), float(result.pvalue))


def _exact_ranksum_p(x: np.ndarray, y: np.ndarray) -> float:
    # every split of the pooled midranks into |x| and |y| positions
    ranks = stats.rankdata(np.concatenate([x, y]))
    splits = np.array(list(itertools.combinations(range(ranks.size), x.size)))
    sums = ranks[splits].sum(axis=1)
    observed = ranks[: x.size].sum()
    tol = 1e-9 * max(1.0, abs(observed))
    upper = np.mean(sums >= observed - tol)
    lower = np.mean(sums <= observed + tol)
    return float(min(1.0, 2.0 * min(upper, lower)))


def wilcoxon_ranksum(a: Sequence[float], b: Sequence[float]) -> float:
    """
    Two-sided rank-sum p-value. Exact enumeration when both samples are
    small, otherwise the normal approximation with tie and continuity
    correction.
    """
    x, y = _as_groups([a, b], 2)
    if _all_identical([x, y]):
        return 1.0
    if len(x) < EXACT_RANKSUM_LIMIT and len(y) < EXACT_RANKSUM_LIMIT:
        return _exact_ranksum_p(x, y)
    result = stats.mannwhitneyu(
        x, y, alternative="two-sided", use_continuity=True, method="asymptotic"
    )
    return float(result.pvalue)


# =============================================================================
# REPORT
# =============================================================================


@dataclass
class MethodRow:
    method: str
    runs: int
    mean: float
    sd: float
    median: float
    normalized_mean: float
    normalized_sd: float
    best: bool = False


@dataclass
class StatReport:
    problem: str
    significance_level: float
    samples: Dict[str, List[float]]
    rows: List[MethodRow]
    kruskal: Optional[KruskalResult] = None
    pairwise_p: Dict[str, Dict[str, float]] = field(default_factory=dict)

    @property
    def gate_rejected(self) -> bool:
        return self.kruskal is not None and self.kruskal.p_value < self.significance_level

    def row(self, method: Union[str, Method]) -> MethodRow:
        name = Method(method).value
        for row in self.rows:
            if row.method == name:
                return row
        raise KeyError(name)

    def to_dict(self) -> Dict[str, object]:
        return {
            "problem": self.problem,
            "significance_level": self.significance_level,
            "kruskal_wallis_statistic": self.kruskal.statistic if self.kruskal else None,
            "kruskal_wallis_p": self.kruskal.p_value if self.kruskal else None,
            "gate_rejected": self.gate_rejected,
            "pairwise_p": self.pairwise_p,
            "methods": [asdict(r) for r in self.rows],
        }


def _sd(values: np.ndarray) -> float:
    return float(np.std(values, ddof=1)) if values.size > 1 else 0.0


def _family_rows(family: Family, samples: Mapping[Method, np.ndarray]) -> List[MethodRow]:
    present = [m for m in Method.family_members(family) if m in samples]
    if not present:
        return []
    triple = [Method.of(family, mode) for mode in TRIPLE_MODES]
    missing = [m.value for m in triple if m not in samples]
    if missing:
        raise ReportError(f"{family.value} family is missing {', '.join(missing)}")

    scale = max(float(np.mean(samples[m])) for m in triple)
    if scale <= 0.0:
        scale = 1.0

    rows = []
    for m in present:
        values = samples[m]
        mean, sd = float(np.mean(values)), _sd(values)
        rows.append(
            MethodRow(
                method=m.value,
                runs=int(values.size),
                mean=mean,
                sd=sd,
                median=float(np.median(values)),
                normalized_mean=mean / scale,
                normalized_sd=sd / scale,
            )
        )
    best = min(r.normalized_mean for r in rows if Method(r.method) in triple)
    for r in rows:
        r.best = Method(r.method) in triple and r.normalized_mean == best
    return rows


def normalize_report(
    final_errors: Mapping[Union[str, Method], Sequence[float]],
    *,
    problem: str = "",
    significance_level: float = 0.05,
) -> StatReport:
    """
    Per-family table normalized by the largest mean of the regular, INV-SB
    and SB methods; brute force is an optional extra column. Runs the
    Kruskal-Wallis gate over every method and the pairwise rank-sum matrix.
    """
    samples = {Method(k): np.asarray(v, dtype=float).ravel() for k, v in final_errors.items()}
    if not samples:
        raise ReportError("no final errors to report")
    empty = [m.value for m, v in samples.items() if v.size == 0]
    if empty:
        raise ReportError(f"no runs for {', '.join(empty)}")

    rows: List[MethodRow] = []
    for family in Family:
        rows.extend(_family_rows(family, samples))

    report = StatReport(
        problem=problem,
        significance_level=significance_level,
        samples={m.value: v.tolist() for m, v in samples.items()},
        rows=rows,
    )
    ordered = [r.method for r in rows]
    if len(ordered) >= 2:
        report.kruskal = kruskal_wallis([samples[Method(m)] for m in ordered])
        pairwise: Dict[str, Dict[str, float]] = {m: {} for m in ordered}
        for a, b in itertools.combinations(ordered, 2):
            p = wilcoxon_ranksum(samples[Method(a)], samples[Method(b)])
            pairwise[a][b] = pairwise[b][a] = p
        report.pairwise_p = pairwise
    return report


def render_text(report: StatReport) -> str:
    lines = [f"problem: {report.problem}" if report.problem else "problem: -"]
    lines.append(f"{'method':<16}{'runs':>6}  {'normalized mean +- sd':<28}{'median':>14}")
    for r in report.rows:
        cell = f"{r.normalized_mean:.4g} +- {r.normalized_sd:.4g}"
        if r.best:
            cell = f"**{cell}**"
        lines.append(f"{r.method:<16}{r.runs:>6}  {cell:<28}{r.median:>14.6g}")

    if report.kruskal is not None:
        verdict = "rejected" if report.gate_rejected else "not rejected"
        lines.append(
            f"Kruskal-Wallis H={report.kruskal.statistic:.4g} p={report.kruskal.p_value:.4g} "
            f"(equal means {verdict} at alpha={report.significance_level:g})"
        )
        names = list(report.pairwise_p)
        width = max(len(n) for n in names) + 2
        lines.append("rank-sum p".ljust(width) + "".join(n.rjust(width) for n in names))
        for a in names:
            cells = "".join(
                ("-" if a == b else f"{report.pairwise_p[a][b]:.3g}").rjust(width) for b in names
            )
            lines.append(a.ljust(width) + cells)
    return "\n".join(lines)


# =============================================================================
# TRACE FILES
# =============================================================================


def discover_problems(input_dir: Union[str, Path]) -> List[str]:
    root = Path(input_dir)
    if not root.is_dir():
        raise ReportError(f"{root} is not a directory")
    return sorted(p.name for p in root.iterdir() if p.is_dir() and any(p.glob("*/run_*.csv")))


def collect_final_errors(input_dir: Union[str, Path], problem: str) -> Dict[Method, List[float]]:
    """
    Final value of every run_NNN.csv under <input_dir>/<problem>/<method>/:
    the last test_err_rate for classification traces, otherwise the last
    best_error.
    """
    problem_dir = Path(input_dir) / problem
    if not problem_dir.is_dir():
        raise ReportError(f"no traces for {problem} under {input_dir}")

    finals: Dict[Method, List[float]] = {}
    for method_dir in sorted(p for p in problem_dir.iterdir() if p.is_dir()):
        try:
            method = Method(method_dir.name)
        except ValueError:
            logger.warning("Skipping %s: not a method name", method_dir)
            continue
        values = []
        for trace_file in sorted(method_dir.glob("run_*.csv")):
            frame = pd.read_csv(trace_file)
            if frame.empty:
                raise ReportError(f"trace {trace_file} is empty")
            column = FINAL_TEST_COLUMN if FINAL_TEST_COLUMN in frame.columns else "best_error"
            values.append(float(frame[column].iloc[-1]))
        if values:
            finals[method] = values
    if not finals:
        raise ReportError(f"trace directory {problem_dir} holds no runs")
    return finals


def write_report(report: StatReport, directory: Union[str, Path]) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    pd.DataFrame([asdict(r) for r in report.rows]).to_csv(
        directory / "normalized_table.csv", index=False, float_format="%.17g"
    )
    path = directory / "report.json"
    path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    return path


def build_report(
    input_dir: Union[str, Path],
    problem: str,
    significance_level: Optional[float] = None,
) -> StatReport:
    """Read a problem's traces, analyse them and write the report files next to them."""
    alpha = significance_level if significance_level is not None else get_settings().significance_level
    finals = collect_final_errors(input_dir, problem)
    report = normalize_report(finals, problem=problem, significance_level=alpha)
    path = write_report(report, Path(input_dir) / problem)
    logger.info("Wrote report for %s (%d methods) to %s", problem, len(report.rows), path)
    return report


# =============================================================================
# StatsService CLASS WRAPPER
# =============================================================================


class StatsService:
    def __init__(self, settings: Optional[Settings] = None) -> None:
        self.settings = settings or get_settings()

    async def build_report(self, input_dir: str, problem: str) -> StatReport:
        return await asyncio.to_thread(
            build_report,
            input_dir,
            problem,
            self.settings.significance_level,
        )


# =============================================================================
# FastAPI dependency
# =============================================================================


def get_stats_service() -> StatsService:
    return StatsService(get_settings())
