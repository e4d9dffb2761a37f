"""Photon state transfer along coupled-cavity arrays.

Single-particle propagators, pretty-good-transfer analysis and an exact
truncated Fock-space engine for checking fidelities of arbitrary
single-mode photon states.
"""

from ccaqst.errors import (
    AnalysisError,
    CapacityError,
    CcaError,
    DegenerateSpectrumError,
    InvalidConfigurationError,
    NumericalError,
    ScenarioError,
    TruncationError,
)
from ccaqst.lattice import CavityArray, build_ballistic, build_custom, build_modulated, build_uniform
from ccaqst.propagator import (
    alpha_end,
    amplitudes,
    hopping_matrix,
    laplace_alpha,
    modulated_alpha_closed,
    uniform_alpha_series,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisError",
    "CapacityError",
    "CavityArray",
    "CcaError",
    "DegenerateSpectrumError",
    "InvalidConfigurationError",
    "NumericalError",
    "ScenarioError",
    "TruncationError",
    "alpha_end",
    "amplitudes",
    "build_ballistic",
    "build_custom",
    "build_modulated",
    "build_uniform",
    "hopping_matrix",
    "laplace_alpha",
    "modulated_alpha_closed",
    "uniform_alpha_series",
]
