"""Solver toolkit for the Izergin-Korepin spin chain with generic open boundaries"""

from .errors import *
from .timer import Timer
from .lax import ModelParams, verify_identity
from .spectrum import SpectrumResult, diagonalize, hamiltonian_explicit, hamiltonian_from_transfer
from .zeroes import (
    ZeroSet,
    PatternReport,
    bae_residual,
    classify_pattern,
    energy_from_zeroes,
    extract_zeroes,
    ground_state_zeroes,
    regime_of,
    seed_ground_state,
    solve_bae,
)
from .thermo import ThermoReport, bulk_energy_periodic, excitation_energy, surface_energy

__version__ = "0.1.0"
