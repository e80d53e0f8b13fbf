# app/data/preprocessing.py

from __future__ import annotations

import logging
from pathlib import Path
from typing import Sequence, Tuple, Union

import numpy as np
import pandas as pd

from app.core.errors import ContractViolation
from app.data.datasets import Dataset, NormStats, SplitDataset
from app.data.problems import DatasetKind

logger = logging.getLogger(__name__)


def _moments(values: np.ndarray, label: str) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    mean = values.mean(axis=0)
    std = values.std(axis=0)
    flagged = np.flatnonzero(std == 0.0)
    if flagged.size:
        logger.warning("Zero-variance %s dimensions %s scaled by 1", label, flagged.tolist())
        std = np.where(std == 0.0, 1.0, std)
    return mean, std, flagged


def fit_normalize(dataset: Dataset) -> Tuple[Dataset, NormStats]:
    """
    Shift and scale every input dimension (and regression / autoencoder
    target dimension) to mean 0 and variance 1 over this dataset.
    """
    if len(dataset) < 2:
        raise ContractViolation(f"normalization needs at least 2 samples, got {len(dataset)}")
    in_mean, in_std, in_flagged = _moments(dataset.inputs, "input")
    stats = NormStats(input_mean=in_mean, input_std=in_std, flagged_inputs=in_flagged)
    if dataset.kind is not DatasetKind.CLASSIFICATION:
        out_mean, out_std, out_flagged = _moments(dataset.targets, "target")
        stats = NormStats(
            input_mean=in_mean,
            input_std=in_std,
            target_mean=out_mean,
            target_std=out_std,
            flagged_inputs=in_flagged,
            flagged_targets=out_flagged,
        )
    return stats.apply(dataset), stats


def split(dataset: Dataset, sizes: Sequence[int], rng: np.random.Generator) -> SplitDataset:
    """Disjoint random train/validation/test subsets of the requested sizes."""
    sizes = tuple(int(s) for s in sizes)
    if len(sizes) != 3 or any(s < 1 for s in sizes):
        raise ContractViolation(f"split needs three positive sizes, got {sizes}")
    if sum(sizes) > len(dataset):
        raise ContractViolation(
            f"split sizes {sizes} request {sum(sizes)} samples, dataset has {len(dataset)}"
        )
    order = rng.permutation(len(dataset))
    bounds = np.cumsum(sizes)
    train, validation, test = np.split(order[: bounds[-1]], bounds[:-1])
    return SplitDataset(dataset.subset(train), dataset.subset(validation), dataset.subset(test))


def write_dataset_csv(dataset: Dataset, path: Union[str, Path]) -> Path:
    """Export with a header row x1..xd, y1..yq."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = [f"x{i + 1}" for i in range(dataset.input_dim)] + [
        f"y{j + 1}" for j in range(dataset.output_dim)
    ]
    frame = pd.DataFrame(np.hstack([dataset.inputs, dataset.targets]), columns=columns)
    frame.to_csv(path, index=False, float_format="%.17g")
    return path
