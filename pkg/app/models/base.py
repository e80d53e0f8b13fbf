# app/models/base.py
import uuid
from datetime import datetime, timezone

from sqlalchemy import DateTime, Uuid
from sqlalchemy.orm import declared_attr, Mapped, mapped_column

from app.db import Base


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class TimestampMixin:
    created_at: Mapped[datetime] = mapped_column(
        DateTime(timezone=True), nullable=False, default=_utcnow
    )
    updated_at: Mapped[datetime] = mapped_column(
        DateTime(timezone=True),
        nullable=False,
        default=_utcnow,
        onupdate=_utcnow,
    )


class UUIDPrimaryKeyMixin:
    id: Mapped[uuid.UUID] = mapped_column(
        Uuid(as_uuid=True),
        primary_key=True,
        default=uuid.uuid4,
    )


class TableNameMixin:
    @declared_attr.directive
    def __tablename__(cls) -> str:
        # snake_case plural: ExperimentRun -> experiment_runs
        name = "".join("_" + c.lower() if c.isupper() else c for c in cls.__name__)
        return name.lstrip("_") + "s"


__all__ = ["Base", "TimestampMixin", "UUIDPrimaryKeyMixin", "TableNameMixin"]
