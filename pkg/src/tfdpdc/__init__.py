"""Truncated-Fock-space thermofield dynamics and parametric down conversion."""

from .errors import *  # noqa: F401,F403
from .fock import (
    MODES,
    BasisDescriptor,
    ModeId,
    StateVector,
    basis_state,
    build_basis,
    inner_product,
    normalize,
    occupations_of,
    state_index,
    vacuum,
)
from .liouville import PdcConfig, evolve, first_order_branch, liouvillian, pdc_hamiltonian
from .thermofield import ThermalParams, ThermalSpectrum

__version__ = "0.1.0"
