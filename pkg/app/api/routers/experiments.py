# app/api/routers/experiments.py

from __future__ import annotations

from typing import List, Optional

from fastapi import APIRouter, Depends, HTTPException, Query
from sqlalchemy.orm import Session

from app.core.errors import ContractViolation, DatasetParseError, InfeasibleBruteForceError, NeuroevoError
from app.db import get_db
from app.schemas.experiment import ExperimentConfig, ExperimentResponse, ExperimentRunRead, RunSummary
from app.services.experiment_service import ExperimentService, get_experiment_service

router = APIRouter(
    prefix="/experiments",
    tags=["Experiments"],
)


@router.post(
    "",
    response_model=ExperimentResponse,
    summary="Run every repetition of one problem x method experiment",
    description="Blocks until all runs finish; meant for small budgets. Traces are written under the output directory.",
)
async def run_experiment(
    config: ExperimentConfig,
    service: ExperimentService = Depends(get_experiment_service),
    db: Session = Depends(get_db),
) -> ExperimentResponse:
    try:
        results = await service.run(config)
    except (ContractViolation, InfeasibleBruteForceError, DatasetParseError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    except NeuroevoError as exc:
        raise HTTPException(status_code=500, detail=f"Experiment failed: {exc}")

    service.record(db, config, results)
    return ExperimentResponse(
        problem=config.problem,
        method=config.method,
        topology=config.topology,
        population_size=config.population_size,
        max_evaluations=config.max_evaluations,
        runs=[
            RunSummary(
                run_index=r.run_index,
                seed=r.seed,
                evaluations=r.evaluations,
                final_error=r.final_error,
                final_train_error_rate=r.final_train_error_rate,
                final_test_error_rate=r.final_test_error_rate,
                wall_time_s=r.wall_time_s,
                trace_path=str(r.trace_path) if r.trace_path else None,
            )
            for r in results
        ],
    )


@router.get("/runs", response_model=List[ExperimentRunRead], summary="Run registry")
def list_runs(
    problem: Optional[str] = Query(None),
    method: Optional[str] = Query(None),
    service: ExperimentService = Depends(get_experiment_service),
    db: Session = Depends(get_db),
) -> List[ExperimentRunRead]:
    return [ExperimentRunRead.model_validate(row) for row in service.list_runs(db, problem, method)]
