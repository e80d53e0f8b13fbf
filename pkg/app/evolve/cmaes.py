# app/evolve/cmaes.py

"""
CMA-ES with optional symmetry breaking.

Strategy constants follow the usual (mu/mu_w, lambda) setting with
logarithmic recombination weights over the best half. Breaking is applied
after the candidates are evaluated and before the distribution update; the
step size update is damped by the shift the breaking induces in the
weighted centroid of the selected candidates.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from app.core.errors import ContractViolation
from app.evolve.methods import (
    MapFn,
    Objective,
    SbMode,
    break_candidates,
    evaluate_candidates,
    population_centroid,
)
from app.net.topology import Topology

logger = logging.getLogger(__name__)

INITIAL_SIGMA_FACTOR = 0.3
SHIFT_DAMPING = 0.05
EIGENVALUE_FLOOR = 1e-14


@dataclass(frozen=True, eq=False)
class CmaSettings:
    """Static strategy parameters for one (dimension, population size) pair."""

    dimension: int
    popsize: int
    mu: int
    weights: np.ndarray  # (mu,), positive, sum 1
    mueff: float
    cc: float
    cs: float
    c1: float
    cmu: float
    damps: float
    chi_n: float  # E||N(0, I)||
    initial_sigma: float

    @classmethod
    def create(cls, dim: int, n_pop: int) -> "CmaSettings":
        if n_pop < 4 or n_pop % 2:
            raise ContractViolation(f"CMA-ES needs an even population of at least 4, got {n_pop}")
        if dim < 1:
            raise ContractViolation(f"dimension must be >= 1, got {dim}")
        N = float(dim)
        mu = n_pop // 2
        raw = np.log(n_pop / 2 + 0.5) - np.log(np.arange(1, mu + 1))
        weights = raw / raw.sum()
        mueff = 1.0 / float(np.sum(weights**2))
        cc = (4 + mueff / N) / (N + 4 + 2 * mueff / N)
        cs = (mueff + 2) / (N + mueff + 5)
        c1 = 2 / ((N + 1.3) ** 2 + mueff)
        cmu = min(1 - c1, 2 * (mueff - 2 + 1 / mueff) / ((N + 2) ** 2 + mueff))
        damps = 1 + 2 * max(0.0, np.sqrt((mueff - 1) / (N + 1)) - 1) + cs
        chi_n = np.sqrt(N) * (1 - 1 / (4 * N) + 1 / (21 * N**2))
        return cls(
            dimension=dim,
            popsize=n_pop,
            mu=mu,
            weights=weights,
            mueff=float(mueff),
            cc=float(cc),
            cs=float(cs),
            c1=float(c1),
            cmu=float(cmu),
            damps=float(damps),
            chi_n=float(chi_n),
            initial_sigma=INITIAL_SIGMA_FACTOR * np.sqrt(N),
        )


@dataclass(frozen=True, eq=False)
class CmaState:
    settings: CmaSettings
    mean: np.ndarray
    sigma: float
    C: np.ndarray
    eigenbasis: np.ndarray
    eigenvalues: np.ndarray
    p_sigma: np.ndarray
    p_c: np.ndarray
    best_candidate: Optional[np.ndarray]
    best_error: float
    eval_count: int = 0
    generation: int = 0

    @property
    def dimension(self) -> int:
        return self.settings.dimension

    @property
    def popsize(self) -> int:
        return self.settings.popsize


def cmaes_init(dim: int, n_pop: int, settings: Optional[CmaSettings] = None) -> CmaState:
    """m = 0, sigma = 0.3 * sqrt(D), C = I, zero paths."""
    settings = settings or CmaSettings.create(dim, n_pop)
    if settings.dimension != dim or settings.popsize != n_pop:
        raise ContractViolation("CMA-ES settings were built for a different dimension or population")
    return CmaState(
        settings=settings,
        mean=np.zeros(dim),
        sigma=float(settings.initial_sigma),
        C=np.eye(dim),
        eigenbasis=np.eye(dim),
        eigenvalues=np.ones(dim),
        p_sigma=np.zeros(dim),
        p_c=np.zeros(dim),
        best_candidate=None,
        best_error=np.inf,
    )


def sample_candidates(state: CmaState, rng: np.random.Generator) -> np.ndarray:
    """N_p draws from N(m, sigma^2 C)."""
    z = rng.standard_normal((state.popsize, state.dimension))
    y = (z * np.sqrt(state.eigenvalues)) @ state.eigenbasis.T
    return state.mean + state.sigma * y


def cmaes_sb_mean(
    candidates: np.ndarray,
    modified_flags: np.ndarray,
    goal_estimate: np.ndarray,
    weights: np.ndarray,
) -> np.ndarray:
    """sum_j w_j * (goal if candidate j was modified else candidate j), ranks aligned."""
    X = np.atleast_2d(np.asarray(candidates, dtype=float))
    flags = np.asarray(modified_flags, dtype=bool)
    w = np.asarray(weights, dtype=float)
    if not (X.shape[0] == flags.shape[0] == w.shape[0]):
        raise ContractViolation("candidates, flags and weights must have the same length")
    contributions = np.where(flags[:, None], np.asarray(goal_estimate, dtype=float)[None, :], X)
    return w @ contributions


def selection_shift(selected: np.ndarray, broken_selected: np.ndarray) -> np.ndarray:
    """Move of the plain centroid of the selected candidates caused by breaking."""
    return population_centroid(broken_selected) - population_centroid(selected)


def sigma_update(sigma_k: float, chi: float, s_norm: float, D: int) -> float:
    """sigma_{k+1} = sigma_k * exp(chi * exp(-0.05 * D^2 * ||s||))."""
    if sigma_k <= 0:
        raise ContractViolation(f"sigma must be positive, got {sigma_k}")
    damping = np.exp(-SHIFT_DAMPING * D * D * s_norm)
    return float(sigma_k * np.exp(chi * damping))


def _repair_covariance(
    C: np.ndarray, generation: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    C = (C + C.T) / 2.0
    eigenvalues, eigenbasis = np.linalg.eigh(C)
    floor = EIGENVALUE_FLOOR * max(float(eigenvalues.max()), 0.0)
    if eigenvalues.min() < floor or not np.all(np.isfinite(eigenvalues)):
        logger.warning(
            "CMA-ES generation %d: covariance repaired (min eigenvalue %.3g)",
            generation,
            float(eigenvalues.min()),
        )
        eigenvalues = np.maximum(eigenvalues, floor if floor > 0 else EIGENVALUE_FLOOR)
        C = (eigenbasis * eigenvalues) @ eigenbasis.T
    return C, eigenbasis, eigenvalues


def cmaes_step(
    state: CmaState,
    objective: Objective,
    sb_mode: SbMode,
    rng: np.random.Generator,
    *,
    topology: Optional[Topology] = None,
    map_fn: Optional[MapFn] = None,
    brute_force_cap: Optional[int] = None,
) -> CmaState:
    sb_mode = SbMode(sb_mode)
    topology = topology or getattr(objective, "topology", None)
    par = state.settings
    N = par.dimension

    sample_rng, break_rng = rng.spawn(2)
    X = sample_candidates(state, sample_rng)
    errors = evaluate_candidates(objective, X, map_fn)

    k = int(np.argmin(errors))
    best_candidate, best_error = state.best_candidate, state.best_error
    if errors[k] < best_error:
        best_candidate, best_error = X[k].copy(), float(errors[k])

    broken, flags = break_candidates(topology, X, sb_mode, best_candidate, break_rng, brute_force_cap)

    selected = np.argsort(errors, kind="stable")[: par.mu]
    if sb_mode is SbMode.MGOP and flags[selected].any():
        new_mean = cmaes_sb_mean(broken[selected], flags[selected], best_candidate, par.weights)
    else:
        new_mean = par.weights @ broken[selected]
    shift = selection_shift(X[selected], broken[selected])

    # cumulation
    y_w = (new_mean - state.mean) / state.sigma
    inv_sqrt = (state.eigenbasis / np.sqrt(state.eigenvalues)) @ state.eigenbasis.T
    p_sigma = (1 - par.cs) * state.p_sigma + np.sqrt(par.cs * (2 - par.cs) * par.mueff) * (inv_sqrt @ y_w)
    generation = state.generation + 1
    ps_norm = float(np.linalg.norm(p_sigma))
    h_sigma = float(ps_norm / np.sqrt(1 - (1 - par.cs) ** (2 * generation)) < (1.4 + 2 / (N + 1)) * par.chi_n)
    p_c = (1 - par.cc) * state.p_c + h_sigma * np.sqrt(par.cc * (2 - par.cc) * par.mueff) * y_w

    # covariance: rank-one plus rank-mu on the post-breaking candidates
    steps = (broken[selected] - state.mean) / state.sigma
    rank_mu = (steps * par.weights[:, None]).T @ steps
    c1a = par.c1 * (1 - (1 - h_sigma) * par.cc * (2 - par.cc))
    C = (1 - c1a - par.cmu) * state.C + par.c1 * np.outer(p_c, p_c) + par.cmu * rank_mu
    C, eigenbasis, eigenvalues = _repair_covariance(C, generation)

    chi = (par.cs / par.damps) * (ps_norm / par.chi_n - 1)
    sigma = sigma_update(state.sigma, chi, float(np.linalg.norm(shift)), N)

    logger.debug(
        "CMA-ES generation %d: best=%.6g sigma=%.4g modified=%d",
        generation,
        best_error,
        sigma,
        int(flags.sum()),
    )
    return dataclasses.replace(
        state,
        mean=new_mean,
        sigma=sigma,
        C=C,
        eigenbasis=eigenbasis,
        eigenvalues=eigenvalues,
        p_sigma=p_sigma,
        p_c=p_c,
        best_candidate=best_candidate,
        best_error=best_error,
        eval_count=state.eval_count + par.popsize,
        generation=generation,
    )
