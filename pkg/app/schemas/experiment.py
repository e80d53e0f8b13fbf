# app/schemas/experiment.py

from __future__ import annotations

from datetime import datetime
from typing import List, Optional
from uuid import UUID

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.config import get_settings
from app.core.errors import ContractViolation, UnknownProblemError
from app.data.generators import DEFAULT_NOISE_SD
from app.data.problems import get_problem
from app.evolve.methods import Family, Method, SbMode
from app.net.network import PenaltyRescale
from app.symmetry.operators import group_size


# ---------------------------------------------------------------------------
# Experiment configuration
# ---------------------------------------------------------------------------


class ExperimentConfig(BaseModel):
    """
    One problem x method experiment.

    Unset fields are filled from the problem catalogue: topology, population
    size of the method's family, sample count and evaluation budget.
    """

    model_config = ConfigDict(extra="forbid")

    problem: str = Field(..., examples=["syn5"])
    method: Method = Field(..., examples=["DE-SB"])
    population_size: Optional[int] = Field(default=None, ge=4)
    max_evaluations: Optional[int] = Field(default=None, ge=1)
    repetitions: int = Field(default=50, ge=1)
    seed: int = Field(default=0, ge=0)
    noise_sd: float = Field(default=DEFAULT_NOISE_SD, ge=0.0)
    sample_count: Optional[int] = Field(default=None, ge=2)
    topology: Optional[str] = Field(default=None, examples=["1-3-1"])
    data_path: Optional[str] = None
    penalty_rescale: PenaltyRescale = PenaltyRescale.UNIT

    @model_validator(mode="after")
    def _resolve_defaults(self) -> "ExperimentConfig":
        try:
            spec = get_problem(self.problem)
        except UnknownProblemError as exc:
            raise ValueError(str(exc)) from exc

        try:
            topology = spec.build_topology(self.topology)
        except ContractViolation as exc:
            raise ValueError(str(exc)) from exc
        if topology.input_dim != spec.input_dim or topology.output_dim != spec.output_dim:
            raise ValueError(
                f"topology {topology} does not match {spec.problem_id}: "
                f"expected {spec.input_dim} inputs and {spec.output_dim} outputs"
            )
        self.topology = str(topology)

        if self.population_size is None:
            self.population_size = (
                spec.cmaes_population if self.method.family is Family.CMA_ES else spec.de_population
            )
        if self.method.family is Family.CMA_ES and self.population_size % 2:
            raise ValueError(f"CMA-ES population size must be even, got {self.population_size}")

        if self.max_evaluations is None:
            self.max_evaluations = spec.max_evaluations
        if self.max_evaluations < self.population_size:
            raise ValueError(
                f"max_evaluations {self.max_evaluations} is below one generation ({self.population_size})"
            )

        if self.sample_count is None:
            self.sample_count = spec.sample_count
        if spec.split_sizes is not None and self.sample_count < sum(spec.split_sizes):
            raise ValueError(
                f"{spec.problem_id} needs at least {sum(spec.split_sizes)} samples for its splits"
            )
        if not spec.is_generated and not self.data_path:
            raise ValueError(f"{spec.problem_id} is loaded from a file; set data_path")

        if self.method.sb_mode is SbMode.MGOP_BRUTE_FORCE:
            cap = get_settings().brute_force_cap
            size = group_size(topology)
            if size > cap:
                raise ValueError(
                    f"infeasible brute force: group size {size} of {topology} exceeds cap {cap}"
                )
        return self


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------


class RunSummary(BaseModel):
    run_index: int
    seed: int
    evaluations: int
    final_error: float
    final_train_error_rate: Optional[float] = None
    final_test_error_rate: Optional[float] = None
    wall_time_s: float
    trace_path: Optional[str] = None


class ExperimentResponse(BaseModel):
    problem: str
    method: Method
    topology: str
    population_size: int
    max_evaluations: int
    runs: List[RunSummary]


class ExperimentRunRead(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    id: UUID
    problem: str
    method: str
    run_index: int
    seed: int
    final_error: float
    final_test_error_rate: Optional[float] = None
    evaluations: int
    wall_time_s: float
    trace_path: Optional[str] = None
    created_at: datetime
