"""Quantum-channel representations, noisy gate simulation and entanglement analysis."""

from .channels import (ChiMatrix, EvolutionMatrix, KrausSet, UnitaryDilation, chi_to_evolution,
                       chi_to_kraus, choi_state, dilation_to_kraus, evolution_to_chi,
                       kraus_to_chi, kraus_to_dilation, kraus_to_evolution)
from .errors import (DimensionError, NotCompletelyPositiveError, NumericalError, QNoiseError,
                     TraceDriftError, ValidationError)
from .gates import GateSpec, gate_library
from .noise import NoiseSpec, RelaxationParams
from .simulation import simulate

__version__ = "0.1.0"

__all__ = [
    "ChiMatrix", "EvolutionMatrix", "KrausSet", "UnitaryDilation",
    "chi_to_evolution", "chi_to_kraus", "choi_state", "dilation_to_kraus",
    "evolution_to_chi", "kraus_to_chi", "kraus_to_dilation", "kraus_to_evolution",
    "DimensionError", "NotCompletelyPositiveError", "NumericalError", "QNoiseError",
    "TraceDriftError", "ValidationError",
    "GateSpec", "gate_library", "NoiseSpec", "RelaxationParams", "simulate",
]
