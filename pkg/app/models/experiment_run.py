# app/models/experiment_run.py
from typing import Optional

from sqlalchemy import Float, Integer, String
from sqlalchemy.orm import Mapped, mapped_column

from .base import Base, TableNameMixin, TimestampMixin, UUIDPrimaryKeyMixin


class ExperimentRun(UUIDPrimaryKeyMixin, TimestampMixin, TableNameMixin, Base):
    """One finished optimization run. The trace file stays the source of truth."""

    problem: Mapped[str] = mapped_column(String(64), nullable=False, index=True)
    method: Mapped[str] = mapped_column(String(32), nullable=False, index=True)
    run_index: Mapped[int] = mapped_column(Integer, nullable=False)
    seed: Mapped[int] = mapped_column(Integer, nullable=False)

    final_error: Mapped[float] = mapped_column(Float, nullable=False)
    final_test_error_rate: Mapped[Optional[float]] = mapped_column(Float, nullable=True)
    evaluations: Mapped[int] = mapped_column(Integer, nullable=False)
    wall_time_s: Mapped[float] = mapped_column(Float, nullable=False)
    trace_path: Mapped[Optional[str]] = mapped_column(String(1024), nullable=True)
