# app/data/problems.py

"""
Problem catalogue: every benchmark with its network, sample counts, split
sizes, population sizes per optimizer family and default evaluation budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

from app.core.errors import UnknownProblemError
from app.net.topology import OutputMode, Topology


class DatasetKind(str, Enum):
    REGRESSION = "Regression"
    AUTOENCODE = "Autoencode"
    CLASSIFICATION = "Classification"


@dataclass(frozen=True)
class ProblemSpec:
    problem_id: str
    kind: DatasetKind
    topology: str
    sample_count: int
    de_population: int
    cmaes_population: int
    max_evaluations: int
    split_sizes: Optional[Tuple[int, int, int]] = None
    class_count: Optional[int] = None
    description: str = ""

    @property
    def output_mode(self) -> OutputMode:
        if self.kind is DatasetKind.CLASSIFICATION:
            return OutputMode.CLASSIFICATION
        return OutputMode.REGRESSION

    def build_topology(self, text: Optional[str] = None) -> Topology:
        return Topology.parse(text or self.topology, self.output_mode)

    @property
    def input_dim(self) -> int:
        return self.build_topology().input_dim

    @property
    def output_dim(self) -> int:
        return self.build_topology().output_dim

    @property
    def is_generated(self) -> bool:
        return self.problem_id != "digits"


_PROBLEMS: Tuple[ProblemSpec, ...] = (
    ProblemSpec(
        "syn5", DatasetKind.REGRESSION, "1-3-1", 200, 80, 48, 200_000,
        description="(x - 0.5)^2 (0.1 + (x + 0.65)^2), x in (-1, 1)",
    ),
    ProblemSpec(
        "sinc", DatasetKind.REGRESSION, "1-5-1", 200, 120, 400, 200_000,
        description="sin(10x) / (10x), x in (-1, 1)",
    ),
    ProblemSpec(
        "inc-sinc", DatasetKind.REGRESSION, "1-5-1", 200, 144, 400, 200_000,
        description="x/2 + sin(10x) / (10x), x in (-1, 1)",
    ),
    ProblemSpec(
        "sinc2d", DatasetKind.REGRESSION, "2-3-1-3-1", 1000, 96, 1000, 500_000,
        description="sin(5||x||) / (15||x||), x in (-1, 1)^2",
    ),
    ProblemSpec(
        "sinc3d", DatasetKind.REGRESSION, "3-4-1-4-1", 1000, 120, 1000, 500_000,
        description="sin(5||x||) / (15||x||), x in (-1, 1)^3",
    ),
    ProblemSpec(
        "autoenc-circle", DatasetKind.AUTOENCODE, "2-5-3-2-1-2-3-5-2", 200, 64, 4000, 500_000,
        description="points on the unit circle, encoded to 1-D",
    ),
    ProblemSpec(
        "autoenc-spiral", DatasetKind.AUTOENCODE, "3-1-3-4-7-3", 1000, 80, 400, 500_000,
        description="(cos phi, sin phi, phi), phi in [0, 6 pi], encoded to 1-D",
    ),
    ProblemSpec(
        "autoenc-sphere", DatasetKind.AUTOENCODE, "3-8-5-2-5-8-3", 1000, 96, 1000, 500_000,
        description="points on the unit sphere, encoded to 2-D",
    ),
    ProblemSpec(
        "two-circles", DatasetKind.CLASSIFICATION, "2-4-2-4-2", 1200, 80, 400, 500_000,
        split_sizes=(400, 400, 400), class_count=2,
        description="inside either circle of radius 0.39894 at (0.5, 0.5) or (-0.5, -0.5)",
    ),
    ProblemSpec(
        "two-spirals", DatasetKind.CLASSIFICATION, "2-8-3-1-3-8-2", 194, 120, 1000, 500_000,
        split_sizes=(114, 40, 40), class_count=2,
        description="two interleaved three-turn spirals around the origin",
    ),
    ProblemSpec(
        "digits", DatasetKind.CLASSIFICATION, "16-8-3-10-10", 3000, 120, 1000, 1_000_000,
        split_sizes=(1000, 1000, 1000), class_count=10,
        description="pen-based handwritten digits, 16 features, loaded from file",
    ),
)

CATALOGUE: Dict[str, ProblemSpec] = {p.problem_id: p for p in _PROBLEMS}


def get_problem(problem_id: str) -> ProblemSpec:
    try:
        return CATALOGUE[problem_id]
    except KeyError:
        raise UnknownProblemError(problem_id) from None


def list_problems() -> List[ProblemSpec]:
    return list(_PROBLEMS)
