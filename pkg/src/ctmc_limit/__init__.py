"""Final limit of the transition matrix of a finite intensity matrix."""

from .chain import (ClassStructure, EmbeddedChain, IntensityMatrix, classify_states,
                    embedded_chain, reachability_closure, validate)
from .limit import (AbsorptionTable, FinalLimit, StationaryVector, absorption_vector,
                    final_limit, stationary_distribution)
from .oracles import (SimulationResult, adaptive_horizon, resolvent, simulate,
                      transition_matrix)

__all__ = [
    "AbsorptionTable", "ClassStructure", "EmbeddedChain", "FinalLimit",
    "IntensityMatrix", "SimulationResult", "StationaryVector", "absorption_vector",
    "adaptive_horizon", "classify_states", "embedded_chain", "final_limit",
    "reachability_closure", "resolvent", "simulate", "stationary_distribution",
    "transition_matrix", "validate",
]
