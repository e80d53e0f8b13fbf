# tests/evolve/test_de.py
import dataclasses

import numpy as np
import pytest

from app.core.errors import ContractViolation
from app.evolve.de import (
    DEFAULT_CR,
    DEFAULT_F,
    binomial_crossover,
    de_init,
    de_mutant,
    de_sb_postprocess,
    de_step,
)
from app.evolve.methods import SbMode, population_centroid
from app.net.network import NetworkObjective
from app.net.topology import ParamVector, Topology
from app.symmetry.group import enumerate_group


def sphere(x):
    return float(np.sum((np.asarray(x) - 0.3) ** 2))


def test_init_population(rng):
    pop = de_init(3, 10, rng, sphere)
    assert pop.candidates.shape == (10, 3)
    assert np.all(np.abs(pop.candidates) <= 1.0)
    assert pop.eval_count == 10
    assert pop.best_error == pytest.approx(min(sphere(x) for x in pop.candidates))


def test_init_is_deterministic():
    a = de_init(4, 8, np.random.default_rng(7), sphere)
    b = de_init(4, 8, np.random.default_rng(7), sphere)
    assert np.array_equal(a.candidates, b.candidates)


def test_init_rejects_small_population(rng):
    with pytest.raises(ContractViolation):
        de_init(3, 3, rng, sphere)


def test_mutant_hand_case():
    v = de_mutant(np.array([0.0, 0.0]), np.array([2.0, 0.0]), np.array([0.0, 2.0]), 0.5)
    assert v.tolist() == [1.0, -1.0]


def test_crossover_keeps_at_least_one_mutant_coordinate(rng):
    target, mutant = np.zeros(6), np.ones(6)
    for _ in range(50):
        assert binomial_crossover(target, mutant, 0.0, rng).sum() == 1.0
    assert np.array_equal(binomial_crossover(target, mutant, 1.0, rng), mutant)


def test_degenerate_mutation_copies_other_candidates(rng):
    pop = de_init(3, 6, rng, sphere, F=0.0, Cr=1.0)
    nxt = de_step(pop, lambda x: 0.0, SbMode.NONE, None, rng)
    # every trial equals some x_r1 and is accepted (0 <= stored error)
    for row in nxt.candidates:
        assert any(np.array_equal(row, old) for old in pop.candidates)
    assert nxt.eval_count == 12


def test_postprocess_inflation_rules():
    rng = np.random.default_rng(0)
    pop = de_init(2, 4, rng, sphere)
    pop = dataclasses.replace(pop, stored_errors=np.array([0.2, 0.3, 0.4, 0.5]))

    assert de_sb_postprocess(pop, np.zeros(4, dtype=bool)) is pop

    inflated = de_sb_postprocess(pop, np.array([True, False, False, True]))
    assert inflated.stored_errors[0] == pytest.approx(20.0)
    assert inflated.stored_errors[3] == 0.5
    assert inflated.stored_errors[1:3].tolist() == [0.3, 0.4]

    with pytest.raises(ContractViolation):
        de_sb_postprocess(pop, np.zeros(3, dtype=bool))


def test_sphere_best_is_monotone(rng):
    pop = de_init(10, 20, rng, sphere)
    previous = pop.best_error
    for _ in range(50):
        pop = de_step(pop, sphere, SbMode.NONE, None, rng)
        assert pop.best_error <= previous
        previous = pop.best_error


def test_sphere_converges_for_every_seed():
    for seed in range(10):
        rng = np.random.default_rng(seed)
        pop = de_init(10, 40, rng, sphere, F=DEFAULT_F, Cr=DEFAULT_CR)
        while pop.eval_count + 40 <= 100_000 and pop.best_error >= 1e-10:
            pop = de_step(pop, sphere, SbMode.NONE, None, rng)
        assert pop.best_error < 1e-10, f"seed {seed} stopped at {pop.best_error}"


@pytest.mark.parametrize("mode", [SbMode.INVARIANT, SbMode.MGOP, SbMode.MGOP_BRUTE_FORCE])
def test_symmetry_breaking_steps_on_a_network(mode, regression_data, rng):
    topology = Topology((1, 3, 1))
    objective = NetworkObjective(topology, regression_data)
    pop = de_init(topology.dimension, 8, rng, objective)
    previous = pop.best_error
    for _ in range(10):
        goal = population_centroid(pop.candidates)
        pop = de_step(pop, objective, mode, goal, rng, topology=topology)
        assert pop.best_error <= previous
        # the tracked best is never the inflated value
        assert objective(pop.best_candidate) == pop.best_error
        previous = pop.best_error
    assert pop.eval_count == 8 * 11


def test_goal_modes_require_goal(rng, regression_data):
    topology = Topology((1, 3, 1))
    objective = NetworkObjective(topology, regression_data)
    pop = de_init(topology.dimension, 8, rng, objective)
    with pytest.raises(ContractViolation):
        de_step(pop, objective, SbMode.MGOP, None, rng)


def _assert_canonical(topology, candidates):
    for row in candidates:
        params = ParamVector(topology, row)
        for layer in topology.hidden_layers:
            taus = params.tau(layer)
            assert np.all(taus >= 0)
            assert np.all(np.diff(taus) <= 0)


def test_invariant_steps_keep_population_canonical(regression_data, rng):
    topology = Topology((1, 3, 2, 1))
    objective = NetworkObjective(topology, regression_data)
    pop = de_init(topology.dimension, 8, rng, objective)
    for _ in range(5):
        pop = de_step(pop, objective, SbMode.INVARIANT, None, rng, topology=topology)
        _assert_canonical(topology, pop.candidates)


def test_brute_force_steps_leave_closest_replicas(regression_data, rng):
    topology = Topology((1, 3, 1))
    objective = NetworkObjective(topology, regression_data)
    elements = list(enumerate_group(topology))
    pop = de_init(topology.dimension, 8, rng, objective)
    for _ in range(5):
        goal = population_centroid(pop.candidates)
        pop = de_step(pop, objective, SbMode.MGOP_BRUTE_FORCE, goal, rng, topology=topology)
        for row in pop.candidates:
            params = ParamVector(topology, row)
            d_best = np.linalg.norm(row - goal)
            assert all(d_best <= np.linalg.norm(e.apply(params).data - goal) + 1e-12 for e in elements)
