# app/data/datasets.py

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from app.core.errors import ContractViolation
from app.data.problems import DatasetKind


@dataclass(frozen=True, eq=False)
class Dataset:
    """K aligned rows of inputs (K x d) and targets (K x q)."""

    inputs: np.ndarray
    targets: np.ndarray
    kind: DatasetKind
    class_count: Optional[int] = None

    def __post_init__(self) -> None:
        inputs = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        targets = np.asarray(self.targets, dtype=float)
        if targets.ndim == 1:
            targets = targets[:, None]
        if inputs.shape[0] < 1 or inputs.shape[0] != targets.shape[0]:
            raise ContractViolation(
                f"dataset needs K >= 1 aligned rows, got {inputs.shape[0]} inputs and {targets.shape[0]} targets"
            )
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "kind", DatasetKind(self.kind))

    def __len__(self) -> int:
        return self.inputs.shape[0]

    @property
    def input_dim(self) -> int:
        return self.inputs.shape[1]

    @property
    def output_dim(self) -> int:
        return self.targets.shape[1]

    def subset(self, index: np.ndarray) -> "Dataset":
        return Dataset(self.inputs[index], self.targets[index], self.kind, self.class_count)


@dataclass(frozen=True, eq=False)
class SplitDataset:
    train: Dataset
    validation: Dataset
    test: Dataset


@dataclass(frozen=True, eq=False)
class NormStats:
    """Per-dimension shift and scale; `flagged_*` mark zero-variance dimensions scaled by 1."""

    input_mean: np.ndarray
    input_std: np.ndarray
    target_mean: Optional[np.ndarray] = None
    target_std: Optional[np.ndarray] = None
    flagged_inputs: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.intp))
    flagged_targets: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.intp))

    @property
    def has_zero_variance(self) -> bool:
        return bool(self.flagged_inputs.size or self.flagged_targets.size)

    def apply(self, dataset: Dataset) -> Dataset:
        """Normalize a held-out set with the statistics of the fitted one."""
        if dataset.input_dim != self.input_mean.shape[0]:
            raise ContractViolation(
                f"dataset has {dataset.input_dim} input dimensions, stats were fitted on {self.input_mean.shape[0]}"
            )
        inputs = (dataset.inputs - self.input_mean) / self.input_std
        targets = dataset.targets
        if self.target_mean is not None:
            targets = (targets - self.target_mean) / self.target_std
        return Dataset(inputs, targets, dataset.kind, dataset.class_count)
