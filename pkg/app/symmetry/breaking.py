# app/symmetry/breaking.py

"""
Symmetry breaking rules.

- Global optimum invariant: positive shifts, then neurons sorted by shift
  (`break_invariant`, and its distance-rule restatement
  `break_invariant_by_distance`).
- Global optimum variant, greedy: point then permutation phase against a
  goal estimate (`break_mgop`).
- Global optimum variant, exact: the replica closest to the goal over the
  whole group (`break_ideal_bf`).
"""

from __future__ import annotations

import itertools
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from app.core.config import get_settings
from app.core.errors import ContractViolation, InfeasibleBruteForceError
from app.net.topology import ParamVector, Topology
from app.symmetry.group import (
    apply_layer_map,
    layer_maps,
    layer_permutations,
    layer_sign_patterns,
)
from app.symmetry.operators import group_size


def _check_goal(params: ParamVector, goal: ParamVector) -> None:
    if goal.topology != params.topology:
        raise ContractViolation(
            f"goal topology {goal.topology} does not match parameter topology {params.topology}"
        )


# =============================================================================
# TWO-BLOCK RULES
# =============================================================================


def point_rule(eta: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """
    eta if ||eta - ref||^2 <= ||-eta - ref||^2 else -eta.

    With reference (0, ..., 0, 1) this is the positive-shift rule.
    """
    eta = np.asarray(eta, dtype=float)
    ref = np.asarray(reference, dtype=float)
    keep = np.sum((eta - ref) ** 2)
    flip = np.sum((-eta - ref) ** 2)
    return eta.copy() if keep <= flip else -eta


def permutation_rule(
    eta_1: np.ndarray,
    eta_2: np.ndarray,
    reference: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Keep (eta_1 | eta_2) if it is not farther from `reference` than
    (eta_2 | eta_1), otherwise swap. `reference` is the concatenated pair.
    """
    a = np.asarray(eta_1, dtype=float)
    b = np.asarray(eta_2, dtype=float)
    ref = np.asarray(reference, dtype=float)
    if ref.shape[0] != a.shape[0] + b.shape[0] or a.shape != b.shape:
        raise ContractViolation("permutation rule needs two equal blocks and a matching reference")
    keep = np.sum((np.concatenate([a, b]) - ref) ** 2)
    swap = np.sum((np.concatenate([b, a]) - ref) ** 2)
    return (a.copy(), b.copy()) if keep <= swap else (b.copy(), a.copy())


class SeparationVariant(str, Enum):
    SORT_BY_A = "SortByA"
    SORT_BY_B = "SortByB"


def separation_distance(goal, variant: SeparationVariant) -> float:
    """
    Distance of a two-block optimum (a_1, b_1, a_2, b_2) to the separating
    region of sorting by a, {(l, alpha, l, beta)}, or by b, {(alpha, l, beta, l)}.
    """
    values = np.asarray(goal.data if isinstance(goal, ParamVector) else goal, dtype=float)
    if values.shape != (4,):
        raise ContractViolation(
            f"separation distance needs a two-block vector (a1, b1, a2, b2), got shape {values.shape}"
        )
    a_1, b_1, a_2, b_2 = values
    if SeparationVariant(variant) is SeparationVariant.SORT_BY_A:
        gap = a_1 - a_2
    else:
        gap = b_1 - b_2
    return float(np.sqrt(gap * gap / 2.0))


# =============================================================================
# GLOBAL OPTIMUM INVARIANT
# =============================================================================


def _permute_layer(topology: Topology, data: np.ndarray, layer: int, order: np.ndarray) -> np.ndarray:
    beta = topology.beta_matrix(layer)
    out = data.copy()
    out[beta] = data[beta[order]]
    return out


def break_invariant(params: ParamVector) -> ParamVector:
    """
    Canonical representative: every shift tau >= 0, then neurons of each
    hidden layer stably sorted by tau, largest first.
    """
    topology = params.topology
    data = params.data.copy()
    for layer in topology.hidden_layers:
        beta = topology.beta_matrix(layer)
        taus = topology.layer_block(data, layer)[:, -1]
        negative = taus < 0
        if negative.any():
            data[beta[negative]] = -data[beta[negative]]
        taus = topology.layer_block(data, layer)[:, -1]
        order = np.argsort(-taus, kind="stable")
        data = _permute_layer(topology, data, layer, order)
    return params.with_data(data)


def break_invariant_by_distance(params: ParamVector) -> ParamVector:
    """
    Same canonicalization expressed with reference vectors: the point rule
    against (0, ..., 0, 1) per neuron, then adjacent neuron pairs ordered by
    the permutation rule against (0, ..., 1 | 0, ..., 0) until stable.
    """
    topology = params.topology
    data = params.data.copy()
    for layer in topology.hidden_layers:
        size = topology.size(layer)
        width = topology.size(layer - 1) + 1
        reference = np.zeros(width)
        reference[-1] = 1.0
        beta = topology.beta_matrix(layer)
        for n in range(size):
            eta = topology.layer_block(data, layer)[n]
            if not np.array_equal(point_rule(eta, reference), eta):
                data[beta[n]] = -data[beta[n]]

        pair_reference = np.concatenate([reference, np.zeros(width)])
        for sweep in range(size - 1):
            for n in range(size - 1 - sweep):
                block = topology.layer_block(data, layer)
                first, _ = permutation_rule(block[n], block[n + 1], pair_reference)
                if not np.array_equal(first, block[n]):
                    order = np.arange(size)
                    order[[n, n + 1]] = order[[n + 1, n]]
                    data = _permute_layer(topology, data, layer, order)
    return params.with_data(data)


# =============================================================================
# GLOBAL OPTIMUM VARIANT
# =============================================================================


def break_mgop(
    params: ParamVector,
    goal: ParamVector,
    rng: np.random.Generator,
) -> Tuple[ParamVector, bool]:
    """
    Greedy approximation of the closest replica.

    An operator is applied only if it strictly decreases the squared block
    distance to the goal. The permutation phase tries one random pair per
    hidden layer; single-neuron layers skip it.
    """
    _check_goal(params, goal)
    topology = params.topology
    data = params.data.copy()
    target = goal.data
    modified = False

    for layer in topology.hidden_layers:
        beta = topology.beta_matrix(layer)
        for n in range(topology.size(layer)):
            block, goal_block = data[beta[n]], target[beta[n]]
            d_keep = np.sum((block - goal_block) ** 2)
            d_flip = np.sum((-block - goal_block) ** 2)
            if d_keep > d_flip:
                data[beta[n]] = -block
                modified = True

    for layer in topology.hidden_layers:
        size = topology.size(layer)
        if size < 2:
            continue
        m, n = rng.choice(size, 2, replace=False)
        beta = topology.beta_matrix(layer)
        b_m, b_n = data[beta[m]], data[beta[n]]
        g_m, g_n = target[beta[m]], target[beta[n]]
        d_keep = np.sum((b_n - g_n) ** 2) + np.sum((b_m - g_m) ** 2)
        d_swap = np.sum((b_n - g_m) ** 2) + np.sum((b_m - g_n) ** 2)
        if d_keep > d_swap:
            data[beta[m]], data[beta[n]] = b_n, b_m
            modified = True

    return params.with_data(data), modified


def break_ideal_bf(
    params: ParamVector,
    goal: ParamVector,
    cap: Optional[int] = None,
) -> ParamVector:
    """
    argmin over the full group of ||Phi theta - goal||^2.

    Ties go to the earliest element in enumeration order (identity first).
    The last hidden layer is evaluated in one vectorized pass per choice of
    the other layers' maps.
    """
    _check_goal(params, goal)
    topology = params.topology
    limit = get_settings().brute_force_cap if cap is None else cap
    total = group_size(topology)
    if total > limit:
        raise InfeasibleBruteForceError(total, limit)

    last = topology.last_hidden
    size = topology.size(last)
    perms = layer_permutations(size)
    signs = layer_sign_patterns(size)
    flips = (signs < 0).astype(float)  # (S, N)

    beta_last = topology.beta_matrix(last)
    tail = topology.layout.layer_offsets[last]
    goal_blocks = goal.data[beta_last]  # (N, b)

    outer = [layer_maps(topology, layer) for layer in topology.hidden_layers if layer != last]

    best_distance = np.inf
    best_data = params.data
    for combo in itertools.product(*outer):
        data = params.data
        for lmap in combo:
            data = apply_layer_map(topology, data, lmap)
        head = float(np.sum((data[:tail] - goal.data[:tail]) ** 2))

        blocks = data[beta_last][perms]  # (P, N, b)
        d_keep = np.sum((blocks - goal_blocks) ** 2, axis=2)  # (P, N)
        d_flip = np.sum((-blocks - goal_blocks) ** 2, axis=2)
        distances = head + d_keep.sum(axis=1)[:, None] + (d_flip - d_keep) @ flips.T  # (P, S)

        flat = int(np.argmin(distances))
        candidate = float(distances.flat[flat])
        if candidate < best_distance:
            best_distance = candidate
            p_idx, s_idx = divmod(flat, len(signs))
            out = data.copy()
            out[beta_last] = signs[s_idx][:, None] * data[beta_last[perms[p_idx]]]
            best_data = out

    return params.with_data(best_data)

