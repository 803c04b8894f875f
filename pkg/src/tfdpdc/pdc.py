"""Parametric down conversion of a bosonic thermofield vacuum: the full pipeline.

Photon numbers are reported two ways.  ``n0_*`` is the hat-mode pump number
``<a^dag a>``.  ``n1_*``/``n2_*`` are the photon numbers of the whole doubled
signal/idler sector (``<b^dag b + b~^dag b~>``); the hat-only parts are kept
in ``n1_hat_after``/``n2_hat_after``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, OccupationOutOfRange
from .fock import BasisDescriptor, ModeId, StateVector, normalize, state_index
from .liouville import (
    PdcConfig,
    evolve,
    excited_sector,
    fidelity,
    first_order_branch,
    liouvillian,
)
from .operators import expectation, number_operator
from .thermofield import ThermalParams, thermofield_vacuum_closed_form

CLOSED_FORM = "closed-form"
EXACT = "exact-evolution"
SEPARABILITY_TOL = 1e-10


@dataclass(frozen=True)
class LambdaSeries:
    """``lambda_n = exp(-n beta omega0 / 2) sqrt(1 - exp(-beta omega0))``, n <= cutoff."""

    beta_omega0: float
    cutoff: int
    lambdas: np.ndarray = field(repr=False)
    tail_weight: float

    @classmethod
    def build(cls, beta_omega0: float, cutoff: int) -> "LambdaSeries":
        if not beta_omega0 > 0:
            raise ConfigError(f"beta*omega0 must be positive, got {beta_omega0}")
        n = np.arange(cutoff + 1)
        lam = np.exp(-0.5 * beta_omega0 * n) * math.sqrt(-math.expm1(-beta_omega0))
        return cls(beta_omega0, cutoff, lam, math.exp(-beta_omega0 * (cutoff + 1)))

    @property
    def n(self) -> np.ndarray:
        return np.arange(self.cutoff + 1)

    def mean_number(self) -> float:
        """``sum n lambda_n^2`` over the truncated series."""
        return float((self.n * self.lambdas ** 2).sum())


@dataclass(frozen=True)
class PdcReport:
    method: str
    n0_before: float
    n1_before: float
    n2_before: float
    n0_after: float
    n1_after: float
    n2_after: float
    n1_hat_after: float
    n2_hat_after: float
    residual_profile: list
    profile_before: list
    tail_weight: float
    warnings: tuple = ()

    def as_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


@dataclass(frozen=True)
class SchmidtReport:
    separable: bool
    singular_values: np.ndarray
    gap: float  # second singular value


def _basis(config: PdcConfig, basis: BasisDescriptor | None) -> BasisDescriptor:
    return basis or config.basis()


def build_initial_state(beta: float, config: PdcConfig,
                        basis: BasisDescriptor | None = None) -> StateVector:
    """Thermal vacuum on the pump pair, doubled vacuum on signal and idler."""
    params = ThermalParams(beta, config.omega0)
    return thermofield_vacuum_closed_form(params, _basis(config, basis))


def closed_form_output_state(beta: float, config: PdcConfig,
                             basis: BasisDescriptor | None = None) -> StateVector:
    """Two-branch converted state written down coefficient by coefficient.

    Amplitude ``-i lambda_n sqrt(n) / N`` on ``|n-1, n~>_a |1,0~>_b |1,0~>_c``
    and ``+i lambda_n sqrt(n) / N`` on ``|n, n-1~>_a |0,1~>_b |0,1~>_c`` with
    ``N = sqrt(2 sum n lambda_n^2)``.
    """
    basis = _basis(config, basis)
    if min(basis.cutoff(ModeId.B), basis.cutoff(ModeId.C)) < 1:
        raise ConfigError("signal and idler cutoffs must be >= 1")
    series = LambdaSeries.build(beta * config.omega0, basis.cutoff(ModeId.A))
    return _two_branch_state(series.lambdas, basis, series.tail_weight)


def _two_branch_state(lambdas, basis: BasisDescriptor, tail: float = 0.0) -> StateVector:
    lam = np.asarray(lambdas, dtype=float)
    n = np.arange(len(lam))
    norm = math.sqrt(2 * float((n * lam ** 2).sum()))
    amps = np.zeros(basis.total_dim, dtype=np.complex128)
    for k in range(1, len(lam)):
        c = lam[k] * math.sqrt(k) / norm
        amps[state_index((k - 1, k, 1, 0, 1, 0), basis)] = -1j * c
        amps[state_index((k, k - 1, 0, 1, 0, 1), basis)] = 1j * c
    return StateVector(basis, amps, tail)


def marginal_distribution(state: StateVector, mode=ModeId.A) -> np.ndarray:
    """Occupation probabilities of one mode (normalized state assumed)."""
    mode = ModeId.parse(mode)
    probs = np.abs(state.tensor()) ** 2
    axes = tuple(i for i in range(probs.ndim) if i != mode.position)
    return probs.sum(axis=axes)


def _numbers(state: StateVector) -> dict:
    basis = state.basis
    out = {}
    for m in ModeId:
        out[m] = expectation(number_operator(m, basis), state).real
    return out


def photon_number_report(beta: float, config: PdcConfig, method: str = CLOSED_FORM,
                         basis: BasisDescriptor | None = None) -> PdcReport:
    """Photon numbers before and after conversion.

    ``method="closed-form"`` uses :func:`closed_form_output_state`;
    ``method="exact-evolution"`` evolves under the Liouvillian for
    ``config.t`` and keeps the normalized signal/idler-excited part.
    """
    basis = _basis(config, basis)
    initial = build_initial_state(beta, config, basis)
    if method == CLOSED_FORM:
        after = closed_form_output_state(beta, config, basis)
    elif method == EXACT:
        L = liouvillian(config, basis)
        after = excited_sector(evolve(initial, L, config.t, config.series_tolerance))
    else:
        raise ConfigError(f"unknown method {method!r}")
    before_n, after_n = _numbers(initial), _numbers(after)
    p_before = marginal_distribution(initial)
    p_after = marginal_distribution(after)
    return PdcReport(
        method=method,
        n0_before=before_n[ModeId.A],
        n1_before=before_n[ModeId.B] + before_n[ModeId.B_T],
        n2_before=before_n[ModeId.C] + before_n[ModeId.C_T],
        n0_after=after_n[ModeId.A],
        n1_after=after_n[ModeId.B] + after_n[ModeId.B_T],
        n2_after=after_n[ModeId.C] + after_n[ModeId.C_T],
        n1_hat_after=after_n[ModeId.B],
        n2_hat_after=after_n[ModeId.C],
        residual_profile=[(n, float(p)) for n, p in enumerate(p_after)],
        profile_before=[(n, float(p)) for n, p in enumerate(p_before)],
        tail_weight=initial.tail_weight,
        warnings=config.warnings,
    )


def branch_fidelity(beta: float, config: PdcConfig, basis: BasisDescriptor | None = None) -> float:
    """Fidelity between the closed-form state and the excited part of exact evolution."""
    basis = _basis(config, basis)
    initial = build_initial_state(beta, config, basis)
    exact = excited_sector(evolve(initial, liouvillian(config, basis), config.t,
                                  config.series_tolerance))
    return fidelity(closed_form_output_state(beta, config, basis), exact)


def analytic_pump_after(lambdas) -> float:
    """``sum(2 n^2 lambda_n^2 - n lambda_n^2) / (2 sum n lambda_n^2)``."""
    lam2 = np.asarray(lambdas, dtype=float) ** 2
    n = np.arange(len(lam2))
    return float((2 * n ** 2 * lam2 - n * lam2).sum() / (2 * (n * lam2).sum()))


def simplified_pump_after(lambdas) -> float:
    """``<N0>_0 - sum_{n != m} n m lambda_n lambda_m / <N0>_0 - 1/2``."""
    lam = np.asarray(lambdas, dtype=float)
    n = np.arange(len(lam))
    n0 = float((n * lam ** 2).sum())
    nl = n * lam
    off_diagonal = float(nl.sum() ** 2 - (nl ** 2).sum())
    return n0 - off_diagonal / n0 - 0.5


@dataclass(frozen=True)
class ResidualAudit:
    main: float
    simplified: float
    discrepancy: float


def residual_simplified_eval(beta_omega0: float, cutoff: int) -> ResidualAudit:
    """Evaluate both printed residual-pump formulas on the same truncated series."""
    lam = LambdaSeries.build(beta_omega0, cutoff).lambdas
    main, simp = analytic_pump_after(lam), simplified_pump_after(lam)
    return ResidualAudit(main, simp, simp - main)


def worked_example_sum(cutoff: int) -> float:
    """``(1/2) [sum n^2 exp(-n ln 2) - 1]`` truncated at ``cutoff``."""
    n = np.arange(cutoff + 1)
    return 0.5 * (float((n ** 2 * np.exp(-n * math.log(2))).sum()) - 1.0)


def project_pump(state: StateVector, n_hat: int, n_tilde: int) -> tuple[StateVector, float]:
    """Partial inner product ``<n_hat, n_tilde|_a |state>``.

    The (unnormalized) result lives on a basis whose pump pair has cutoff 0;
    the second return value is its squared norm.
    """
    basis = state.basis
    ca = basis.cutoff(ModeId.A)
    if not (0 <= n_hat <= ca and 0 <= n_tilde <= ca):
        raise OccupationOutOfRange(f"pump outcome ({n_hat}, {n_tilde}) outside cutoff {ca}")
    sub = state.tensor()[n_hat, n_tilde]
    cond_basis = BasisDescriptor((0, 0) + basis.cutoffs[2:])
    cond = StateVector(cond_basis, sub.reshape(-1))
    return cond, float(np.vdot(cond.amplitudes, cond.amplitudes).real)


def separability_check(conditional: StateVector, tol: float = SEPARABILITY_TOL) -> SchmidtReport:
    """Schmidt test across the ``(b, b~) | (c, c~)`` split."""
    basis = conditional.basis
    t = conditional.tensor()
    if basis.dims[0] * basis.dims[1] != 1:
        raise ConfigError("separability_check expects a state with the pump pair projected out")
    mat = t.reshape(basis.dims[2] * basis.dims[3], basis.dims[4] * basis.dims[5])
    s = np.linalg.svd(mat, compute_uv=False)
    gap = float(s[1]) if len(s) > 1 else 0.0
    return SchmidtReport(gap <= tol, s, gap)


def pump_entanglement_spectrum(state: StateVector) -> np.ndarray:
    """Schmidt coefficients across ``(a, a~) | (b, b~, c, c~)``."""
    dims = state.basis.dims
    mat = state.amplitudes.reshape(dims[0] * dims[1], -1)
    return np.linalg.svd(mat, compute_uv=False)


def schmidt_rank(singular_values, tol: float = SEPARABILITY_TOL) -> int:
    return int((np.asarray(singular_values) > tol).sum())


def truncated_vacuum_two_photon(beta: float, config: PdcConfig,
                                basis: BasisDescriptor | None = None) -> StateVector:
    """Three-term pump vacuum renormalized by ``sqrt(1-x)/sqrt(1-x^3)``, ``x = exp(-beta omega0)``."""
    basis = _basis(config, basis)
    if basis.cutoff(ModeId.A) < 2:
        raise ConfigError("pump cutoff must be >= 2 for the two-photon truncation")
    x = math.exp(-beta * config.omega0)
    pref = math.sqrt(-math.expm1(-beta * config.omega0)) / math.sqrt(1 - x ** 3)
    amps = np.zeros(basis.total_dim, dtype=np.complex128)
    for k in range(3):
        amps[state_index((k, k, 0, 0, 0, 0), basis)] = pref * x ** (k / 2)
    return StateVector(basis, amps, x ** 3)


def truncated_two_photon_state(beta: float, config: PdcConfig,
                               basis: BasisDescriptor | None = None) -> StateVector:
    """First-order converted state of the two-photon-truncated pump vacuum."""
    basis = _basis(config, basis)
    return first_order_branch(truncated_vacuum_two_photon(beta, config, basis), config, basis)


def projection_table(state: StateVector) -> list[dict]:
    """Every pump outcome with non-negligible probability, plus its separability."""
    rows = []
    ca = state.basis.cutoff(ModeId.A)
    for nh in range(ca + 1):
        for nt in range(ca + 1):
            cond, p = project_pump(state, nh, nt)
            if p > 0:
                rep = separability_check(cond)
                rows.append({"n_hat": nh, "n_tilde": nt, "probability": p,
                             "separable": rep.separable, "schmidt_gap": rep.gap})
    return rows
