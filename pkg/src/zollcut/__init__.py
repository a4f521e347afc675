"""Quantization of a phase-space disk in Bargmann space.

Spectral projectors onto low oscillator levels, cut observables as banded
Hermitian matrices, coherent-state propagation and Husimi densities, plus
experiment drivers for trace asymptotics, commutator localization, edge
(Toeplitz) universality and Egorov-type propagation checks.
"""

from zollcut.phase import (
    PhasePoint,
    Hamiltonian,
    Domain,
    FourierCoefficients,
    HARMONIC,
    SADDLE,
    hamilton_flow,
    poisson_bracket,
    disk_integral,
    orbit_fourier_coeffs,
)
from zollcut.bargmann import (
    SimulationScale,
    BargmannState,
    GridSpec,
    HusimiGrid,
    coherent_state,
    husimi,
    inner,
)
from zollcut.operators import (
    BandedHermitian,
    ToeplitzFiber,
    build_q_matrix,
    build_oscillator_matrix,
    build_projector,
    cut_operator,
    commutator,
    fiber_toeplitz,
    edge_symbol_error,
)
from zollcut.spectral import EigenSystem, eigendecompose, apply_function, propagate

__all__ = [
    "PhasePoint",
    "Hamiltonian",
    "Domain",
    "FourierCoefficients",
    "HARMONIC",
    "SADDLE",
    "hamilton_flow",
    "poisson_bracket",
    "disk_integral",
    "orbit_fourier_coeffs",
    "SimulationScale",
    "BargmannState",
    "GridSpec",
    "HusimiGrid",
    "coherent_state",
    "husimi",
    "inner",
    "BandedHermitian",
    "ToeplitzFiber",
    "build_q_matrix",
    "build_oscillator_matrix",
    "build_projector",
    "cut_operator",
    "commutator",
    "fiber_toeplitz",
    "edge_symbol_error",
    "EigenSystem",
    "eigendecompose",
    "apply_function",
    "propagate",
]

__version__ = "0.1.0"
