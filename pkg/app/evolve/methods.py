# app/evolve/methods.py

"""
Method catalogue and the pieces shared by both optimizers: batch
evaluation and symmetry breaking of a whole population.
"""

from __future__ import annotations

from enum import Enum
from typing import Callable, Iterable, Iterator, Optional, Tuple

import numpy as np

from app.core.errors import ContractViolation
from app.net.topology import ParamVector, Topology
from app.symmetry.breaking import break_ideal_bf, break_invariant, break_mgop

Objective = Callable[[np.ndarray], float]
MapFn = Callable[[Objective, Iterable[np.ndarray]], Iterator[float]]


class SbMode(str, Enum):
    NONE = "None"
    INVARIANT = "Invariant"
    MGOP = "Mgop"
    MGOP_BRUTE_FORCE = "MgopBruteForce"

    @property
    def needs_goal(self) -> bool:
        return self in (SbMode.MGOP, SbMode.MGOP_BRUTE_FORCE)


class Family(str, Enum):
    DE = "DE"
    CMA_ES = "CMA-ES"


class Method(str, Enum):
    DE = "DE"
    DE_INV_SB = "DE-INV-SB"
    DE_SB = "DE-SB"
    DE_SB_BF = "DE-SB-BF"
    CMA_ES = "CMA-ES"
    CMA_ES_INV_SB = "CMA-ES-INV-SB"
    CMA_ES_SB = "CMA-ES-SB"
    CMA_ES_SB_BF = "CMA-ES-SB-BF"

    @property
    def family(self) -> Family:
        return Family.CMA_ES if self.value.startswith("CMA-ES") else Family.DE

    @property
    def sb_mode(self) -> SbMode:
        suffix = self.value[len(self.family.value):]
        return {
            "": SbMode.NONE,
            "-INV-SB": SbMode.INVARIANT,
            "-SB": SbMode.MGOP,
            "-SB-BF": SbMode.MGOP_BRUTE_FORCE,
        }[suffix]

    @classmethod
    def of(cls, family: Family, sb_mode: SbMode) -> "Method":
        for method in cls:
            if method.family is family and method.sb_mode is sb_mode:
                return method
        raise ContractViolation(f"no method for {family.value} with {sb_mode.value}")

    @classmethod
    def family_members(cls, family: Family) -> Tuple["Method", ...]:
        """Regular, INV-SB, SB and SB-BF variants of one family, in that order."""
        return tuple(
            cls.of(family, mode)
            for mode in (SbMode.NONE, SbMode.INVARIANT, SbMode.MGOP, SbMode.MGOP_BRUTE_FORCE)
        )


def population_centroid(candidates: np.ndarray) -> np.ndarray:
    """Arithmetic mean of the candidate rows; the DE goal estimate."""
    X = np.atleast_2d(np.asarray(candidates, dtype=float))
    if X.shape[0] == 0:
        raise ContractViolation("centroid of an empty population")
    return X.mean(axis=0)


def evaluate_candidates(
    objective: Objective,
    candidates: np.ndarray,
    map_fn: Optional[MapFn] = None,
) -> np.ndarray:
    """Objective values of every row, through `map_fn` when given (e.g. an executor's map)."""
    mapper = map_fn or map
    return np.fromiter(mapper(objective, list(candidates)), dtype=float, count=len(candidates))


def break_candidates(
    topology: Optional[Topology],
    candidates: np.ndarray,
    sb_mode: SbMode,
    goal_estimate: Optional[np.ndarray],
    rng: np.random.Generator,
    brute_force_cap: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Apply the breaking rule of `sb_mode` to every row.

    Returns the transformed candidates and per-row flags telling whether a
    symmetry operator changed that row.
    """
    X = np.asarray(candidates, dtype=float)
    flags = np.zeros(X.shape[0], dtype=bool)
    if sb_mode is SbMode.NONE:
        return X.copy(), flags
    if topology is None:
        raise ContractViolation(f"{sb_mode.value} symmetry breaking needs a network topology")
    goal: Optional[ParamVector] = None
    if sb_mode.needs_goal:
        if goal_estimate is None:
            raise ContractViolation(f"{sb_mode.value} symmetry breaking needs a goal estimate")
        goal = ParamVector(topology, goal_estimate)

    out = np.empty_like(X)
    for j, row in enumerate(X):
        params = ParamVector(topology, row)
        if sb_mode is SbMode.MGOP:
            result, flags[j] = break_mgop(params, goal, rng)
        else:
            if sb_mode is SbMode.INVARIANT:
                result = break_invariant(params)
            else:
                result = break_ideal_bf(params, goal, brute_force_cap)
            flags[j] = not np.array_equal(result.data, row)
        out[j] = result.data
    return out, flags
