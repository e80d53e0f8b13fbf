# app/schemas/report.py

from __future__ import annotations

from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class ReportRequest(BaseModel):
    input_dir: str = Field(..., description="Trace root written by an experiment run.")
    problem: str = Field(..., examples=["syn5"])


class MethodSummary(BaseModel):
    method: str
    runs: int
    mean: float
    sd: float
    median: float
    normalized_mean: Optional[float] = None
    normalized_sd: Optional[float] = None
    best: bool = False


class StatReportResponse(BaseModel):
    problem: str
    significance_level: float
    kruskal_wallis_statistic: Optional[float] = None
    kruskal_wallis_p: Optional[float] = None
    gate_rejected: bool
    pairwise_p: Dict[str, Dict[str, float]]
    methods: List[MethodSummary]
    table: str
