"""PDC Hamiltonian, Liouvillian L = H - H~ and exact evolution in the doubled space."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ZeroNorm
from .expm import expm_action
from .fock import BasisDescriptor, ModeId, StateVector, normalize
from .operators import (
    Expr,
    SparseOperator,
    evaluate,
    lower,
    number,
    raise_,
    tilde_conjugate,
)

A, B, C = ModeId.A, ModeId.B, ModeId.C
RESONANCE_RTOL = 1e-12


class OffResonanceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PdcConfig:
    omega0: float = 1.0
    omega1: float = 0.5
    omega2: float = 0.5
    kappa: float = 1.0
    t: float = 1.0
    cutoff_a: int = 16
    cutoff_b: int = 3
    cutoff_c: int = 3
    series_tolerance: float = 1e-10
    warnings: tuple = field(default=(), init=False, compare=False)

    def __post_init__(self):
        for name in ("omega0", "omega1", "omega2"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ConfigError(f"{name} must be positive, got {v}")
        if not self.kappa >= 0:
            raise ConfigError(f"kappa must be >= 0, got {self.kappa}")
        if not self.t >= 0:
            raise ConfigError(f"t must be >= 0, got {self.t}")
        for name in ("cutoff_a", "cutoff_b", "cutoff_c"):
            if int(getattr(self, name)) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if not self.series_tolerance > 0:
            raise ConfigError("series_tolerance must be positive")
        if not self.resonant:
            object.__setattr__(self, "warnings", ("off-resonance",))
            warnings.warn(
                f"omega0={self.omega0} != omega1+omega2={self.omega1 + self.omega2}",
                OffResonanceWarning, stacklevel=3,
            )

    @property
    def resonant(self) -> bool:
        return math.isclose(self.omega0, self.omega1 + self.omega2,
                            rel_tol=RESONANCE_RTOL, abs_tol=0.0)

    def basis(self) -> BasisDescriptor:
        return BasisDescriptor.from_pairs(self.cutoff_a, self.cutoff_b, self.cutoff_c)


def free_expression(config: PdcConfig) -> Expr:
    return config.omega0 * number(A) + config.omega1 * number(B) + config.omega2 * number(C)


def coupling_expression(config: PdcConfig) -> Expr:
    """``kappa (a b^dag c^dag + a^dag b c)``."""
    down = lower(A) * raise_(B) * raise_(C)
    up = raise_(A) * lower(B) * lower(C)
    return config.kappa * (down + up)


def hamiltonian_expression(config: PdcConfig) -> Expr:
    return free_expression(config) + coupling_expression(config)


def pdc_hamiltonian(config: PdcConfig, basis: BasisDescriptor | None = None) -> SparseOperator:
    return evaluate(hamiltonian_expression(config), basis or config.basis())


def liouvillian(config: PdcConfig, basis: BasisDescriptor | None = None) -> SparseOperator:
    """``H - H~`` with the tilde copy obtained by tilde conjugation of ``H``."""
    basis = basis or config.basis()
    h = hamiltonian_expression(config)
    return evaluate(h, basis) - evaluate(tilde_conjugate(h), basis)


def interaction_operator(config: PdcConfig, basis: BasisDescriptor | None = None) -> SparseOperator:
    """Coupling part of the Liouvillian, ``V - V~``."""
    basis = basis or config.basis()
    v = coupling_expression(config)
    return evaluate(v, basis) - evaluate(tilde_conjugate(v), basis)


def conserved_energy_operator(config: PdcConfig, basis: BasisDescriptor | None = None) -> SparseOperator:
    """``sum_i omega_i (N_i - N~_i)``, which commutes with L at resonance."""
    basis = basis or config.basis()
    f = free_expression(config)
    return evaluate(f, basis) - evaluate(tilde_conjugate(f), basis)


def evolve(state: StateVector, L: SparseOperator, t: float, tolerance: float = 1e-10,
           max_order: int = 60, max_substeps: int = 1 << 16) -> StateVector:
    """``exp(-i L t)|state>``; sub-steps automatically before giving up."""
    if t == 0:
        return state
    amps = expm_action(L.matrix, state.amplitudes, -1j * t, tolerance, max_order, max_substeps)
    return state.with_amplitudes(amps)


def signal_idler_vacuum_mask(basis: BasisDescriptor) -> np.ndarray:
    """True where b, b~, c and c~ are all unoccupied."""
    occ = basis.occupation_grid()
    return (occ[:, 2:] == 0).all(axis=1)


def excited_sector(state: StateVector) -> StateVector:
    """Normalized projection onto states with at least one signal/idler photon."""
    amps = np.where(signal_idler_vacuum_mask(state.basis), 0, state.amplitudes)
    return normalize(state.with_amplitudes(amps))


def first_order_branch(initial: StateVector, config: PdcConfig,
                       basis: BasisDescriptor | None = None) -> StateVector:
    """Normalized ``-i t V |initial>`` with any component along ``|initial>`` removed.

    The overall factor ``kappa * t`` cancels on normalization, so the result
    only depends on ``kappa`` and ``t`` through their sign.
    """
    basis = basis or initial.basis
    if config.kappa == 0 or config.t == 0:
        raise ZeroNorm("no interaction: kappa * t == 0")
    V = interaction_operator(config, basis)
    w = (-1j * config.t) * (V.matrix @ initial.amplitudes)
    w = w - np.vdot(initial.amplitudes, w) / np.vdot(initial.amplitudes, initial.amplitudes) * initial.amplitudes
    nrm = np.linalg.norm(w)
    if nrm <= 1e-300:
        raise ZeroNorm("interaction annihilates the input state")
    return initial.with_amplitudes(w / nrm, tail_weight=initial.tail_weight)


def fidelity(s1: StateVector, s2: StateVector) -> float:
    return float(abs(np.vdot(s1.amplitudes, s2.amplitudes)) ** 2)


def branch_infidelity(initial: StateVector, config: PdcConfig,
                      L: SparseOperator | None = None) -> float:
    """``1 - |<first-order branch | excited part of exp(-iLt)|initial>>|^2``."""
    L = L if L is not None else liouvillian(config, initial.basis)
    branch = first_order_branch(initial, config)
    exact = excited_sector(evolve(initial, L, config.t, config.series_tolerance))
    return 1.0 - fidelity(branch, exact)
