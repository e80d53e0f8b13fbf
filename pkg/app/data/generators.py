# app/data/generators.py

"""
Synthetic benchmark data.

Regression targets get additive N(0, noise_sd^2) noise; autoencoder targets
are the noiseless inputs and classification labels are exact.
"""

from __future__ import annotations

from typing import Callable, Dict

import numpy as np

from app.core.errors import ContractViolation, UnknownProblemError
from app.data.datasets import Dataset
from app.data.problems import DatasetKind, get_problem

DEFAULT_NOISE_SD = 5e-3
CIRCLE_RADIUS = 0.39894
CIRCLE_CENTERS = np.array([[0.5, 0.5], [-0.5, -0.5]])

# classic two-spirals layout: 97 points per spiral, angle i*pi/16, radius (104 - i)/104
SPIRAL_POINTS = 97
SPIRAL_ANGLE_STEP = np.pi / 16


def _sinc(u: np.ndarray) -> np.ndarray:
    """sin(u)/u with the limit 1 at u = 0."""
    return np.sinc(u / np.pi)


# -----------------------------------------------------------------------------
# Target functions
# -----------------------------------------------------------------------------


def syn5(x: np.ndarray) -> np.ndarray:
    return (x - 0.5) ** 2 * (0.1 + (x + 0.65) ** 2)


def sinc(x: np.ndarray) -> np.ndarray:
    return _sinc(10.0 * x)


def inc_sinc(x: np.ndarray) -> np.ndarray:
    return x / 2.0 + _sinc(10.0 * x)


def radial_sinc(x: np.ndarray) -> np.ndarray:
    """sin(5||x||) / (15||x||), rows of x are points."""
    r = np.linalg.norm(np.atleast_2d(x), axis=1)
    return _sinc(5.0 * r) / 3.0


def in_two_circles(points: np.ndarray) -> np.ndarray:
    pts = np.atleast_2d(points)
    dist = np.linalg.norm(pts[:, None, :] - CIRCLE_CENTERS[None, :, :], axis=2)
    return np.any(dist <= CIRCLE_RADIUS, axis=1)


# -----------------------------------------------------------------------------
# Per-problem samplers
# -----------------------------------------------------------------------------


def _one_hot(labels: np.ndarray, class_count: int) -> np.ndarray:
    out = np.zeros((labels.shape[0], class_count))
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


def _regression_1d(fn: Callable[[np.ndarray], np.ndarray]):
    def sample(n: int, rng: np.random.Generator):
        x = rng.uniform(-1.0, 1.0, size=(n, 1))
        return x, fn(x)

    return sample


def _regression_nd(dim: int):
    def sample(n: int, rng: np.random.Generator):
        x = rng.uniform(-1.0, 1.0, size=(n, dim))
        return x, radial_sinc(x)[:, None]

    return sample


def _circle(n: int, rng: np.random.Generator):
    phi = rng.uniform(0.0, 2 * np.pi, size=n)
    x = np.column_stack([np.cos(phi), np.sin(phi)])
    return x, x.copy()


def _spiral(n: int, rng: np.random.Generator):
    phi = rng.uniform(0.0, 6 * np.pi, size=n)
    x = np.column_stack([np.cos(phi), np.sin(phi), phi])
    return x, x.copy()


def _sphere(n: int, rng: np.random.Generator):
    g = rng.standard_normal((n, 3))
    x = g / np.linalg.norm(g, axis=1, keepdims=True)
    return x, x.copy()


def _two_circles(n: int, rng: np.random.Generator):
    x = rng.uniform(-1.0, 1.0, size=(n, 2))
    labels = np.where(in_two_circles(x), 0, 1)
    return x, _one_hot(labels, 2)


def two_spirals_points(n: int) -> np.ndarray:
    """
    Points of the two spirals, first spiral then its point reflection,
    alternating so that any prefix is balanced. Returns (n, 3): x, y, label.
    """
    per_spiral = max(SPIRAL_POINTS, (n + 1) // 2)
    i = np.linspace(0.0, SPIRAL_POINTS - 1, per_spiral)
    angle = i * SPIRAL_ANGLE_STEP
    radius = (104.0 - i) / 104.0
    first = np.column_stack([radius * np.sin(angle), radius * np.cos(angle)])
    rows = np.empty((2 * per_spiral, 3))
    rows[0::2, :2], rows[0::2, 2] = first, 0
    rows[1::2, :2], rows[1::2, 2] = -first, 1
    return rows[:n]


def _two_spirals(n: int, rng: np.random.Generator):
    rows = two_spirals_points(n)
    return rows[:, :2], _one_hot(rows[:, 2].astype(np.intp), 2)


_SAMPLERS: Dict[str, Callable] = {
    "syn5": _regression_1d(syn5),
    "sinc": _regression_1d(sinc),
    "inc-sinc": _regression_1d(inc_sinc),
    "sinc2d": _regression_nd(2),
    "sinc3d": _regression_nd(3),
    "autoenc-circle": _circle,
    "autoenc-spiral": _spiral,
    "autoenc-sphere": _sphere,
    "two-circles": _two_circles,
    "two-spirals": _two_spirals,
}


def generate(
    problem_id: str,
    sample_count: int,
    noise_sd: float,
    rng: np.random.Generator,
) -> Dataset:
    """Draw `sample_count` samples of a synthetic problem."""
    spec = get_problem(problem_id)
    sampler = _SAMPLERS.get(problem_id)
    if sampler is None:
        raise UnknownProblemError(problem_id)
    if sample_count < 1:
        raise ContractViolation(f"sample_count must be >= 1, got {sample_count}")
    if noise_sd < 0:
        raise ContractViolation(f"noise_sd must be >= 0, got {noise_sd}")

    inputs, targets = sampler(sample_count, rng)
    if spec.kind is DatasetKind.REGRESSION and noise_sd > 0:
        targets = targets + rng.normal(0.0, noise_sd, size=targets.shape)
    return Dataset(inputs, targets, spec.kind, spec.class_count)
