"""Thermofield vacua for a single hat/tilde oscillator pair.

Units: k_B = hbar = 1.  The bosonic mixing angle is ``atanh(exp(-beta*omega/2))``
and the fermionic one ``atan(exp(-beta*omega/2))``.

Fermions are realized on a cutoff-1 pair with the same (hard-core) ladder
matrices as bosons.  On that 4-state space ``exp(-iG)`` is an exact rotation in
the ``(|1,1~>, |0,0~>)`` plane and the identity on ``(|1,0~>, |0,1~>)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import (
    ConfigError,
    NotAPartnerPair,
    OperatorTouchesTildeSector,
    SpectrumTooLong,
)
from .expm import expm_action
from .fock import MODES, BasisDescriptor, ModeId, StateVector, state_index
from .operators import (
    SparseOperator,
    annihilator,
    creator,
    embed,
    expectation,
    local_lowering,
    number_operator,
)

BOSON = "boson"
FERMION = "fermion"
SERIES_TOL = 1e-10


@dataclass(frozen=True)
class ThermalParams:
    beta: float
    omega: float = 1.0
    statistics: str = BOSON

    def __post_init__(self):
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ConfigError(f"beta must be positive and finite, got {self.beta}")
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise ConfigError(f"omega must be positive and finite, got {self.omega}")
        if self.statistics not in (BOSON, FERMION):
            raise ConfigError(f"statistics must be 'boson' or 'fermion', got {self.statistics!r}")

    @classmethod
    def from_beta_omega(cls, beta_omega: float, statistics: str = BOSON, omega: float = 1.0):
        return cls(beta_omega / omega, omega, statistics)

    @property
    def beta_omega(self) -> float:
        return self.beta * self.omega

    @property
    def boltzmann(self) -> float:
        """``exp(-beta*omega)``."""
        return math.exp(-self.beta_omega)


@dataclass(frozen=True)
class ThermalSpectrum:
    energies: tuple

    def __post_init__(self):
        e = tuple(float(x) for x in self.energies)
        if not e or not all(math.isfinite(x) for x in e):
            raise ConfigError("spectrum must be a non-empty list of finite energies")
        object.__setattr__(self, "energies", e)

    @classmethod
    def harmonic(cls, omega: float, levels: int) -> "ThermalSpectrum":
        return cls(tuple(n * omega for n in range(levels)))

    def boltzmann_weights(self, beta: float) -> np.ndarray:
        e = np.asarray(self.energies)
        return np.exp(-beta * (e - e.min()))

    def partition_function(self, beta: float) -> float:
        e = np.asarray(self.energies)
        return float(np.exp(-beta * e).sum())


def mixing_angle(params: ThermalParams) -> float:
    x = math.exp(-params.beta_omega / 2)
    return math.atanh(x) if params.statistics == BOSON else math.atan(x)


def thermal_occupation(params: ThermalParams) -> float:
    """Bose-Einstein or Fermi-Dirac occupation of the mode."""
    if params.statistics == BOSON:
        return 1.0 / math.expm1(params.beta_omega)
    return 1.0 / (math.exp(params.beta_omega) + 1.0)


def tail_weight(params: ThermalParams, cutoff: int) -> float:
    """Thermal probability above ``cutoff`` that a truncated vacuum discards."""
    if params.statistics == FERMION:
        return 0.0 if cutoff >= 1 else params.boltzmann / (1 + params.boltzmann)
    return params.boltzmann ** (cutoff + 1)


def occupation_error_bound(params: ThermalParams, cutoff: int) -> float:
    """``|<N>_exact - <N>_truncated|`` for the renormalized truncated boson vacuum."""
    if params.statistics == FERMION:
        return 0.0 if cutoff >= 1 else thermal_occupation(params)
    w = tail_weight(params, cutoff)
    return (cutoff + 1) * w / (1.0 - w)


def _check_pair(basis: BasisDescriptor, hat_mode, tilde_mode) -> tuple[ModeId, ModeId]:
    hat, tilde = ModeId.parse(hat_mode), ModeId.parse(tilde_mode)
    if hat.is_tilde or hat.partner != tilde:
        raise NotAPartnerPair(f"{hat}/{tilde} is not a hat/tilde partner pair")
    return hat, tilde


def _paired_state(basis, hat, tilde, amps_by_n, tail) -> StateVector:
    out = np.zeros(basis.total_dim, dtype=np.complex128)
    occ = [0] * len(MODES)
    for n, amp in enumerate(amps_by_n):
        occ[hat.position] = occ[tilde.position] = n
        out[state_index(occ, basis)] = amp
    return StateVector(basis, out, tail)


def thermofield_vacuum_closed_form(params: ThermalParams, basis: BasisDescriptor,
                                   hat_mode=ModeId.A, tilde_mode=ModeId.A_T) -> StateVector:
    """Closed-form thermal vacuum on one pair, vacuum on every other mode.

    Bosons: amplitudes ``exp(-n*beta*omega/2)`` on ``|n, n~>`` for
    ``n <= cutoff``, renormalized over the truncated support; the discarded
    weight is stored in ``tail_weight``.  Fermions: ``cos(theta)|0,0~> +
    sin(theta)|1,1~>``.
    """
    hat, tilde = _check_pair(basis, hat_mode, tilde_mode)
    cutoff = basis.cutoff(hat)
    if params.statistics == FERMION:
        if cutoff < 1:
            raise ConfigError("fermionic vacuum needs cutoff >= 1")
        th = mixing_angle(params)
        return _paired_state(basis, hat, tilde, [math.cos(th), math.sin(th)], 0.0)
    n = np.arange(cutoff + 1)
    amps = np.exp(-0.5 * params.beta_omega * n)
    amps /= np.linalg.norm(amps)
    return _paired_state(basis, hat, tilde, amps, tail_weight(params, cutoff))


def thermofield_vacuum_from_spectrum(spectrum: ThermalSpectrum, beta: float,
                                     basis: BasisDescriptor, hat_mode=ModeId.A,
                                     tilde_mode=ModeId.A_T) -> StateVector:
    """``Z^{-1/2} sum_n exp(-beta E_n / 2) |n, n~>`` over the given levels."""
    hat, tilde = _check_pair(basis, hat_mode, tilde_mode)
    if len(spectrum.energies) > basis.cutoff(hat) + 1:
        raise SpectrumTooLong(
            f"{len(spectrum.energies)} levels do not fit cutoff {basis.cutoff(hat)}"
        )
    w = spectrum.boltzmann_weights(beta)
    amps = np.sqrt(w / w.sum())
    return _paired_state(basis, hat, tilde, amps, 0.0)


def bogoliubov_generator(angle: float, basis: BasisDescriptor, hat_mode=ModeId.A,
                         tilde_mode=ModeId.A_T) -> SparseOperator:
    """``G = i*angle*(a^dag b~^dag - a b~)``, Hermitian."""
    hat, tilde = _check_pair(basis, hat_mode, tilde_mode)
    a, bt = annihilator(hat, basis), annihilator(tilde, basis)
    pair_create = creator(hat, basis) @ creator(tilde, basis)
    return (pair_create - a @ bt).scale(1j * angle)


def apply_bogoliubov(state: StateVector, generator: SparseOperator,
                     tolerance: float = SERIES_TOL, max_order: int = 60,
                     max_substeps: int = 1 << 16) -> StateVector:
    """``exp(-iG)|state>`` via the scaled Taylor series."""
    amps = expm_action(generator.matrix, state.amplitudes, -1j, tolerance,
                       max_order, max_substeps)
    return state.with_amplitudes(amps)


def fermionic_rotation_check(angle: float, tolerance: float = 1e-14) -> dict:
    """Extract the action of ``exp(-iG)`` on the four cutoff-1 pair states.

    Returns ``{"rotation": R, "identity_block": P}`` where ``R[i, j]`` is the
    coefficient of ket ``j`` in ``exp(-iG)|ket i>`` for kets ordered
    ``(|1,1~>, |0,0~>)``, which gives ``[[cos, -sin], [sin, cos]]``.  ``P`` is
    the same table for ``(|1,0~>, |0,1~>)``.
    """
    basis = BasisDescriptor((1, 1, 0, 0, 0, 0))
    gen = bogoliubov_generator(angle, basis)
    kets = {"11": (1, 1, 0, 0, 0, 0), "00": (0, 0, 0, 0, 0, 0),
            "10": (1, 0, 0, 0, 0, 0), "01": (0, 1, 0, 0, 0, 0)}
    idx = {k: state_index(v, basis) for k, v in kets.items()}

    def table(order):
        out = np.zeros((2, 2))
        for i, src in enumerate(order):
            v = np.zeros(basis.total_dim, dtype=np.complex128)
            v[idx[src]] = 1
            img = expm_action(gen.matrix, v, -1j, tolerance)
            for j, dst in enumerate(order):
                out[i, j] = img[idx[dst]].real
        return out

    return {"rotation": table(("11", "00")), "identity_block": table(("10", "01"))}


def _pair_matrices(basis: BasisDescriptor, hat: ModeId):
    d = basis.dim(hat)
    low = local_lowering(d)
    eye = sp.identity(d, dtype=np.complex128, format="csr")
    a = sp.kron(low, eye, format="csr")
    bt = sp.kron(eye, low, format="csr")
    return a, bt


def _embed_pair(pair_matrix, basis: BasisDescriptor, hat: ModeId) -> SparseOperator:
    pos = hat.position
    left = int(np.prod(basis.dims[:pos]))
    right = int(np.prod(basis.dims[pos + 2:]))
    full = sp.kron(sp.identity(left, format="csr"),
                   sp.kron(sp.csr_matrix(pair_matrix), sp.identity(right, format="csr")),
                   format="csr")
    return SparseOperator(basis, full, frozenset({hat, hat.partner}))


def _require_fermion_cutoff(params: ThermalParams, basis, hat):
    if params.statistics == FERMION and basis.cutoff(hat) != 1:
        raise ConfigError("fermionic pair operators need cutoff exactly 1")


def thermal_ladder(params: ThermalParams, basis: BasisDescriptor, hat_mode=ModeId.A,
                   tilde_mode=ModeId.A_T, sector: str = "hat", dagger: bool = False,
                   tolerance: float = SERIES_TOL) -> SparseOperator:
    """``exp(-iG) X exp(iG)`` for ``X`` one of ``a``, ``a^dag``, ``b~``, ``b~^dag``.

    The conjugation is carried out on the pair subspace (``exp(-iG)`` is built
    column by column with the series) and Kronecker-embedded, since ``G`` acts
    on nothing else.
    """
    hat, tilde = _check_pair(basis, hat_mode, tilde_mode)
    _require_fermion_cutoff(params, basis, hat)
    if sector not in ("hat", "tilde"):
        raise ValueError(f"sector must be 'hat' or 'tilde', got {sector!r}")
    a, bt = _pair_matrices(basis, hat)
    x = a if sector == "hat" else bt
    if dagger:
        x = x.conj().T.tocsr()
    th = mixing_angle(params)
    gen = (1j * th) * (a.conj().T @ bt.conj().T - a @ bt)
    n = gen.shape[0]
    u = expm_action(gen.tocsr(), np.eye(n, dtype=np.complex128), -1j, tolerance)
    conj = u @ (x @ u.conj().T)
    conj[np.abs(conj) < 1e-15] = 0
    return _embed_pair(conj, basis, hat)


def thermal_annihilator(params: ThermalParams, basis: BasisDescriptor, hat_mode=ModeId.A,
                        tilde_mode=ModeId.A_T, tolerance: float = SERIES_TOL) -> SparseOperator:
    return thermal_ladder(params, basis, hat_mode, tilde_mode, "hat", False, tolerance)


def bogoliubov_combination(params: ThermalParams, basis: BasisDescriptor,
                           hat_mode=ModeId.A, tilde_mode=ModeId.A_T) -> SparseOperator:
    """Linear form ``cosh*a - sinh*b~^dag`` (boson) or ``cos*a - sin*b~^dag`` (fermion)."""
    hat, tilde = _check_pair(basis, hat_mode, tilde_mode)
    th = mixing_angle(params)
    if params.statistics == BOSON:
        u, v = math.cosh(th), math.sinh(th)
    else:
        u, v = math.cos(th), math.sin(th)
    return annihilator(hat, basis).scale(u) - creator(tilde, basis).scale(v)


def low_occupation_columns(basis: BasisDescriptor, hat_mode, max_occupation: int) -> np.ndarray:
    """Indices whose hat and tilde occupations are both ``<= max_occupation``."""
    hat = ModeId.parse(hat_mode)
    ok = ((basis.mode_occupations(hat) <= max_occupation)
          & (basis.mode_occupations(hat.partner) <= max_occupation))
    return np.flatnonzero(ok)


def annihilation_residual(params: ThermalParams, basis: BasisDescriptor, vacuum: StateVector,
                          tolerance: float = SERIES_TOL, hat_mode=ModeId.A,
                          tilde_mode=ModeId.A_T) -> float:
    """``|| a_beta |0(beta)> ||`` with the conjugated thermal annihilator."""
    op = thermal_annihilator(params, basis, hat_mode, tilde_mode, tolerance)
    return float(np.linalg.norm(op.matrix @ vacuum.amplitudes))


def residual_tail_estimate(params: ThermalParams, cutoff: int) -> float:
    """Predicted residual scale ``tanh(angle)**cutoff`` (boson); 0 for fermions."""
    if params.statistics == FERMION:
        return 0.0
    return math.tanh(mixing_angle(params)) ** cutoff


def gibbs_expectation(op: SparseOperator, spectrum: ThermalSpectrum, beta: float) -> complex:
    """``Tr(rho A) = Z^{-1} sum_n exp(-beta E_n) <n|A|n>`` for ``A`` on one hat mode."""
    touched = [m for m in op.support if m.is_tilde]
    if touched:
        raise OperatorTouchesTildeSector(f"operator acts on {sorted(map(str, touched))}")
    if len(op.support) > 1:
        raise ConfigError("gibbs_expectation expects an operator on a single hat mode")
    mode = next(iter(op.support)) if op.support else ModeId.A
    basis = op.basis
    levels = min(len(spectrum.energies), basis.dim(mode))
    w = spectrum.boltzmann_weights(beta)[:levels]
    occ = [0] * len(MODES)
    diag = np.empty(levels, dtype=np.complex128)
    for n in range(levels):
        occ[mode.position] = n
        i = state_index(occ, basis)
        diag[n] = op.matrix[i, i]
    return complex((w * diag).sum() / w.sum())


def vacuum_expectation(op: SparseOperator, vacuum: StateVector) -> complex:
    return expectation(op, vacuum)


def mean_occupation(vacuum: StateVector, mode=ModeId.A) -> float:
    return expectation(number_operator(mode, vacuum.basis), vacuum).real
