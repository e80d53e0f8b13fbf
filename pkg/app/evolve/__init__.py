from app.evolve.cmaes import (
    CmaSettings,
    CmaState,
    cmaes_init,
    cmaes_sb_mean,
    cmaes_step,
    selection_shift,
    sigma_update,
)
from app.evolve.de import (
    DePopulation,
    binomial_crossover,
    de_init,
    de_mutant,
    de_sb_postprocess,
    de_step,
)
from app.evolve.methods import (
    Family,
    Method,
    SbMode,
    break_candidates,
    evaluate_candidates,
    population_centroid,
)

__all__ = [
    "CmaSettings",
    "CmaState",
    "DePopulation",
    "Family",
    "Method",
    "SbMode",
    "binomial_crossover",
    "break_candidates",
    "cmaes_init",
    "cmaes_sb_mean",
    "cmaes_step",
    "de_init",
    "de_mutant",
    "de_sb_postprocess",
    "de_step",
    "evaluate_candidates",
    "population_centroid",
    "selection_shift",
    "sigma_update",
]
