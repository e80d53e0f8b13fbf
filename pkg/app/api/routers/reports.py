# app/api/routers/reports.py

from fastapi import APIRouter, Depends, HTTPException

from app.core.errors import ContractViolation, ReportError
from app.schemas.report import MethodSummary, ReportRequest, StatReportResponse
from app.services.stats_service import StatsService, get_stats_service, render_text

router = APIRouter(
    prefix="/reports",
    tags=["Reports"],
)


@router.post("", response_model=StatReportResponse, summary="Statistics and normalized table for one problem")
async def build_report(
    request: ReportRequest,
    service: StatsService = Depends(get_stats_service),
) -> StatReportResponse:
    try:
        report = await service.build_report(request.input_dir, request.problem)
    except ReportError as exc:
        raise HTTPException(status_code=404, detail=str(exc))
    except ContractViolation as exc:
        raise HTTPException(status_code=400, detail=str(exc))

    return StatReportResponse(
        problem=report.problem,
        significance_level=report.significance_level,
        kruskal_wallis_statistic=report.kruskal.statistic if report.kruskal else None,
        kruskal_wallis_p=report.kruskal.p_value if report.kruskal else None,
        gate_rejected=report.gate_rejected,
        pairwise_p=report.pairwise_p,
        methods=[MethodSummary(**vars(row)) for row in report.rows],
        table=render_text(report),
    )
