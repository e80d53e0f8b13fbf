# app/schemas/problem.py

from __future__ import annotations

from typing import List, Optional

from pydantic import BaseModel

from app.data.problems import DatasetKind, ProblemSpec


class ProblemRead(BaseModel):
    problem_id: str
    kind: DatasetKind
    topology: str
    dimension: int
    sample_count: int
    split_sizes: Optional[List[int]] = None
    class_count: Optional[int] = None
    de_population: int
    cmaes_population: int
    max_evaluations: int
    description: str

    @classmethod
    def from_spec(cls, spec: ProblemSpec) -> "ProblemRead":
        return cls(
            problem_id=spec.problem_id,
            kind=spec.kind,
            topology=spec.topology,
            dimension=spec.build_topology().dimension,
            sample_count=spec.sample_count,
            split_sizes=list(spec.split_sizes) if spec.split_sizes else None,
            class_count=spec.class_count,
            de_population=spec.de_population,
            cmaes_population=spec.cmaes_population,
            max_evaluations=spec.max_evaluations,
            description=spec.description,
        )
