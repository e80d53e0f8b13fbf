# app/api/routers/problems.py

from typing import List

from fastapi import APIRouter, HTTPException

from app.core.errors import UnknownProblemError
from app.data.problems import get_problem, list_problems
from app.schemas.problem import ProblemRead

router = APIRouter(
    prefix="/problems",
    tags=["Problems"],
)


@router.get("", response_model=List[ProblemRead], summary="Benchmark problem catalogue")
def problems() -> List[ProblemRead]:
    return [ProblemRead.from_spec(spec) for spec in list_problems()]


@router.get("/{problem_id}", response_model=ProblemRead, summary="One benchmark problem")
def problem(problem_id: str) -> ProblemRead:
    try:
        return ProblemRead.from_spec(get_problem(problem_id))
    except UnknownProblemError:
        raise HTTPException(status_code=404, detail=f"Unknown problem: {problem_id}")
