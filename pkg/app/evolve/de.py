# app/evolve/de.py

"""
Differential evolution, rand/1/bin, with optional symmetry breaking.

One `de_step` is one synchronous generation: every trial vector is built
from the population as it was at the start of the step, all trials are
evaluated, greedy selection replaces targets, and finally every candidate
is passed through the symmetry breaking rule of the chosen mode.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from app.core.errors import ContractViolation
from app.evolve.methods import MapFn, Objective, SbMode, break_candidates, evaluate_candidates
from app.net.topology import Topology

logger = logging.getLogger(__name__)

DEFAULT_F = 0.5
DEFAULT_CR = 0.9
INFLATION_FACTOR = 100.0


@dataclass(frozen=True, eq=False)
class DePopulation:
    candidates: np.ndarray  # (N_p, D)
    stored_errors: np.ndarray  # (N_p,), possibly inflated
    F: float
    Cr: float
    eval_count: int
    best_candidate: np.ndarray
    best_error: float  # never inflated
    generation: int = 0

    @property
    def size(self) -> int:
        return self.candidates.shape[0]

    @property
    def dimension(self) -> int:
        return self.candidates.shape[1]


def _track_best(
    pop_best: np.ndarray, pop_error: float, X: np.ndarray, errors: np.ndarray
) -> Tuple[np.ndarray, float]:
    k = int(np.argmin(errors))
    if errors[k] < pop_error:
        return X[k].copy(), float(errors[k])
    return pop_best, pop_error


def de_init(
    dim: int,
    n_pop: int,
    rng: np.random.Generator,
    objective: Objective,
    F: float = DEFAULT_F,
    Cr: float = DEFAULT_CR,
    map_fn: Optional[MapFn] = None,
) -> DePopulation:
    """N_p uniform samples in [-1, 1]^D, each evaluated once."""
    if n_pop < 4:
        raise ContractViolation(f"DE needs a population of at least 4, got {n_pop}")
    if dim < 1:
        raise ContractViolation(f"dimension must be >= 1, got {dim}")
    X = rng.uniform(-1.0, 1.0, size=(n_pop, dim))
    errors = evaluate_candidates(objective, X, map_fn)
    k = int(np.argmin(errors))
    return DePopulation(
        candidates=X,
        stored_errors=errors,
        F=float(F),
        Cr=float(Cr),
        eval_count=n_pop,
        best_candidate=X[k].copy(),
        best_error=float(errors[k]),
    )


# -----------------------------------------------------------------------------
# Variation operators
# -----------------------------------------------------------------------------


def de_mutant(x_r1: np.ndarray, x_r2: np.ndarray, x_r3: np.ndarray, F: float) -> np.ndarray:
    return np.asarray(x_r1, dtype=float) + F * (np.asarray(x_r2, dtype=float) - np.asarray(x_r3, dtype=float))


def binomial_crossover(
    target: np.ndarray,
    mutant: np.ndarray,
    Cr: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Take each mutant coordinate with probability Cr; one random coordinate always."""
    dim = target.shape[0]
    mask = rng.random(dim) < Cr
    mask[rng.integers(dim)] = True
    return np.where(mask, mutant, target)


def _trial_vectors(pop: DePopulation, rng: np.random.Generator) -> np.ndarray:
    n_pop = pop.size
    trials = np.empty_like(pop.candidates)
    for i in range(n_pop):
        others = np.delete(np.arange(n_pop), i)
        r1, r2, r3 = rng.choice(others, 3, replace=False)
        mutant = de_mutant(pop.candidates[r1], pop.candidates[r2], pop.candidates[r3], pop.F)
        trials[i] = binomial_crossover(pop.candidates[i], mutant, pop.Cr, rng)
    return trials


# -----------------------------------------------------------------------------
# Generation
# -----------------------------------------------------------------------------


def de_sb_postprocess(
    pop: DePopulation,
    modified_flags: np.ndarray,
) -> DePopulation:
    """
    Multiply the stored error of candidate j by 100 when breaking modified it
    and j < N_p/2 (storage order, zero-based). The inflation stays until the
    candidate is replaced by selection.
    """
    flags = np.asarray(modified_flags, dtype=bool)
    if flags.shape != (pop.size,):
        raise ContractViolation(
            f"expected {pop.size} modification flags, got shape {flags.shape}"
        )
    inflate = flags & (np.arange(pop.size) < pop.size / 2)
    if not inflate.any():
        return pop
    errors = pop.stored_errors.copy()
    errors[inflate] *= INFLATION_FACTOR
    return dataclasses.replace(pop, stored_errors=errors)


def de_step(
    pop: DePopulation,
    objective: Objective,
    sb_mode: SbMode,
    goal_estimate: Optional[np.ndarray],
    rng: np.random.Generator,
    *,
    topology: Optional[Topology] = None,
    map_fn: Optional[MapFn] = None,
    brute_force_cap: Optional[int] = None,
) -> DePopulation:
    """
    One generation. `goal_estimate` is required for the goal-dependent modes;
    callers pass the population centroid taken before the step.
    """
    sb_mode = SbMode(sb_mode)
    if sb_mode.needs_goal and goal_estimate is None:
        raise ContractViolation(f"{sb_mode.value} mode requires a goal estimate")
    topology = topology or getattr(objective, "topology", None)

    sample_rng, break_rng = rng.spawn(2)
    trials = _trial_vectors(pop, sample_rng)
    trial_errors = evaluate_candidates(objective, trials, map_fn)

    accept = trial_errors <= pop.stored_errors
    X = np.where(accept[:, None], trials, pop.candidates)
    errors = np.where(accept, trial_errors, pop.stored_errors)
    best_candidate, best_error = _track_best(pop.best_candidate, pop.best_error, trials, trial_errors)

    X, flags = break_candidates(topology, X, sb_mode, goal_estimate, break_rng, brute_force_cap)

    nxt = dataclasses.replace(
        pop,
        candidates=X,
        stored_errors=errors,
        eval_count=pop.eval_count + pop.size,
        best_candidate=best_candidate,
        best_error=best_error,
        generation=pop.generation + 1,
    )
    if sb_mode is SbMode.MGOP:
        nxt = de_sb_postprocess(nxt, flags)
    logger.debug(
        "DE generation %d: best=%.6g accepted=%d modified=%d",
        nxt.generation,
        best_error,
        int(accept.sum()),
        int(flags.sum()),
    )
    return nxt
