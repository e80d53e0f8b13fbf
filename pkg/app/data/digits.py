# app/data/digits.py

"""
Loader for the pen-based handwritten digits set.

File format: one sample per line, 16 comma-separated numeric features
followed by the integer class label 0-9 (the layout of the widely
distributed pendigits files; spaces after commas are allowed).
"""

from __future__ import annotations

import logging
import re
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from app.core.errors import DatasetParseError
from app.data.datasets import Dataset, SplitDataset
from app.data.preprocessing import split
from app.data.problems import DatasetKind

logger = logging.getLogger(__name__)

FEATURE_COUNT = 16
CLASS_COUNT = 10
SPLIT_SIZES = (1000, 1000, 1000)

_LINE_RE = re.compile(r"line (\d+)")


def _read_frame(path: Path) -> pd.DataFrame:
    try:
        return pd.read_csv(
            path,
            header=None,
            dtype=str,
            skipinitialspace=True,
            skip_blank_lines=False,
        )
    except pd.errors.EmptyDataError as exc:
        raise DatasetParseError(f"digits file {path} is empty") from exc
    except pd.errors.ParserError as exc:
        match = _LINE_RE.search(str(exc))
        raise DatasetParseError(
            f"expected {FEATURE_COUNT + 1} comma-separated fields",
            int(match.group(1)) if match else None,
        ) from exc


def parse_digits(path: Union[str, Path]) -> Dataset:
    """All samples of the file as one classification dataset with one-hot targets."""
    path = Path(path)
    if not path.is_file():
        raise DatasetParseError(f"digits file {path} not found")
    frame = _read_frame(path)
    frame = frame.dropna(how="all")
    if frame.empty:
        raise DatasetParseError(f"digits file {path} is empty")
    if frame.shape[1] != FEATURE_COUNT + 1:
        raise DatasetParseError(
            f"expected {FEATURE_COUNT + 1} fields per line, found {frame.shape[1]}", 1
        )

    values = frame.apply(pd.to_numeric, errors="coerce")
    bad_rows = values.index[values.isna().any(axis=1)]
    if len(bad_rows):
        raise DatasetParseError("missing or non-numeric field", int(bad_rows[0]) + 1)

    labels = values.iloc[:, -1].to_numpy()
    invalid = (labels != np.round(labels)) | (labels < 0) | (labels >= CLASS_COUNT)
    if invalid.any():
        row = values.index[np.argmax(invalid)]
        raise DatasetParseError(
            f"label must be an integer 0-{CLASS_COUNT - 1}, got {labels[np.argmax(invalid)]!r}",
            int(row) + 1,
        )

    features = values.iloc[:, :FEATURE_COUNT].to_numpy(dtype=float)
    targets = np.zeros((labels.shape[0], CLASS_COUNT))
    targets[np.arange(labels.shape[0]), labels.astype(np.intp)] = 1.0
    return Dataset(features, targets, DatasetKind.CLASSIFICATION, CLASS_COUNT)


def load_digits(
    path: Union[str, Path],
    rng: np.random.Generator,
) -> SplitDataset:
    """Parse the file and draw the 1000/1000/1000 train/validation/test split."""
    dataset = parse_digits(path)
    needed = sum(SPLIT_SIZES)
    if len(dataset) < needed:
        raise DatasetParseError(
            f"digits file {path} has {len(dataset)} samples, at least {needed} are required"
        )
    logger.info("Loaded %d digit samples from %s", len(dataset), path)
    return split(dataset, SPLIT_SIZES, rng)
