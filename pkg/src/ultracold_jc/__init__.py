"""Quantized-motion Jaynes-Cummings simulator."""

from .coupling import CouplingSpec, coupling_operator, quadratic
from .dynamics import ScenarioParams, propagate_decomposed, propagate_oracle
from .hilbert import SpaceDims
from .observables import InitialStateSpec, UnitSystem, convert_units, initial_state

__all__ = [
    "CouplingSpec",
    "InitialStateSpec",
    "ScenarioParams",
    "SpaceDims",
    "UnitSystem",
    "convert_units",
    "coupling_operator",
    "initial_state",
    "propagate_decomposed",
    "propagate_oracle",
    "quadratic",
]
