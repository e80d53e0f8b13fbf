# app/core/errors.py

from __future__ import annotations

from typing import Optional


class NeuroevoError(Exception):
    """Base class for every error raised by this package."""


class ContractViolation(NeuroevoError, ValueError):
    """A pre-condition of an operation was not met (bad index, shape, size)."""


class InfeasibleBruteForceError(NeuroevoError):
    """The symmetry group is too large to enumerate under the configured cap."""

    def __init__(self, group_size: int, cap: int) -> None:
        super().__init__(
            f"infeasible brute force: group size {group_size} exceeds cap {cap}"
        )
        self.group_size = group_size
        self.cap = cap


class UnknownProblemError(NeuroevoError, LookupError):
    def __init__(self, problem_id: str) -> None:
        super().__init__(f"Unknown problem id: {problem_id}")
        self.problem_id = problem_id


class DatasetParseError(NeuroevoError):
    def __init__(self, message: str, line_number: Optional[int] = None) -> None:
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ConfigValidationError(NeuroevoError, ValueError):
    """Experiment configuration rejected before any run was started."""


class ReportError(NeuroevoError):
    """A statistics report could not be assembled from the given traces."""
