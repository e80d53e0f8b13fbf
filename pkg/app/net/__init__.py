from app.net.network import (
    EvaluatedNet,
    NetworkObjective,
    OutputWeights,
    PenaltyRescale,
    classification_error_rate,
    fit,
    forward,
    hidden_activations,
    mse,
    penalized_error,
    solve_output_weights,
)
from app.net.topology import OutputMode, ParamLayout, ParamVector, Topology

__all__ = [
    "EvaluatedNet",
    "NetworkObjective",
    "OutputMode",
    "OutputWeights",
    "ParamLayout",
    "ParamVector",
    "PenaltyRescale",
    "Topology",
    "classification_error_rate",
    "fit",
    "forward",
    "hidden_activations",
    "mse",
    "penalized_error",
    "solve_output_weights",
]
