"""Doubled multimode Fock basis, state vectors and inner products.

The product space holds three oscillators (pump ``a``, signal ``b``, idler
``c``) together with their tilde partners.  Mode order is fixed to
``(a, a~, b, b~, c, c~)``; the first mode is the most significant digit of the
mixed-radix index, which matches ``kron(op_a, op_a~, ..., op_c~)``.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    BasisMismatch,
    DimensionTooLarge,
    MismatchedPartnerCutoff,
    OccupationOutOfRange,
    UnknownMode,
    ZeroNorm,
)

DEFAULT_MAX_DIM = 2_000_000


class ModeId(enum.Enum):
    A = "a"
    A_T = "a~"
    B = "b"
    B_T = "b~"
    C = "c"
    C_T = "c~"

    @property
    def is_tilde(self) -> bool:
        return self.value.endswith("~")

    @property
    def partner(self) -> "ModeId":
        return _PARTNERS[self]

    @property
    def position(self) -> int:
        return MODES.index(self)

    @classmethod
    def parse(cls, label) -> "ModeId":
        if isinstance(label, cls):
            return label
        try:
            return cls(str(label).replace("̃", "~"))
        except ValueError:
            raise UnknownMode(label) from None

    def __str__(self):
        return self.value


MODES: tuple[ModeId, ...] = (ModeId.A, ModeId.A_T, ModeId.B, ModeId.B_T, ModeId.C, ModeId.C_T)
HAT_MODES = (ModeId.A, ModeId.B, ModeId.C)
_PARTNERS = {
    ModeId.A: ModeId.A_T, ModeId.A_T: ModeId.A,
    ModeId.B: ModeId.B_T, ModeId.B_T: ModeId.B,
    ModeId.C: ModeId.C_T, ModeId.C_T: ModeId.C,
}


def max_dimension() -> int:
    """Dimension guard, raised through the ``TFD_MAX_DIM`` environment variable."""
    raw = os.environ.get("TFD_MAX_DIM")
    return int(raw) if raw else DEFAULT_MAX_DIM


@dataclass(frozen=True)
class BasisDescriptor:
    """Per-mode cutoffs in the fixed order ``MODES``."""

    cutoffs: tuple[int, ...]
    dims: tuple[int, ...] = field(init=False, repr=False)
    strides: tuple[int, ...] = field(init=False, repr=False)
    total_dim: int = field(init=False)

    def __post_init__(self):
        cutoffs = tuple(int(c) for c in self.cutoffs)
        if len(cutoffs) != len(MODES):
            raise ValueError(f"expected {len(MODES)} cutoffs, got {len(cutoffs)}")
        if any(c < 0 for c in cutoffs):
            raise ValueError(f"cutoffs must be non-negative, got {cutoffs}")
        for hat in HAT_MODES:
            i, j = hat.position, hat.partner.position
            if cutoffs[i] != cutoffs[j]:
                raise MismatchedPartnerCutoff(hat, hat.partner, cutoffs[i], cutoffs[j])
        dims = tuple(c + 1 for c in cutoffs)
        strides = tuple(math.prod(dims[k + 1:]) for k in range(len(dims)))
        object.__setattr__(self, "cutoffs", cutoffs)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "strides", strides)
        object.__setattr__(self, "total_dim", math.prod(dims))

    @property
    def modes(self) -> tuple[ModeId, ...]:
        return MODES

    @classmethod
    def from_pairs(cls, a: int = 16, b: int = 3, c: int = 3) -> "BasisDescriptor":
        """Basis with one cutoff per hat/tilde pair (tilde copies the hat cutoff)."""
        return build_basis({ModeId.A: a, ModeId.A_T: a, ModeId.B: b,
                            ModeId.B_T: b, ModeId.C: c, ModeId.C_T: c})

    def cutoff(self, mode) -> int:
        return self.cutoffs[ModeId.parse(mode).position]

    def dim(self, mode) -> int:
        return self.dims[ModeId.parse(mode).position]

    def occupation_grid(self) -> np.ndarray:
        """(total_dim, 6) integer array of occupations for every index."""
        idx = np.arange(self.total_dim)
        return np.stack([(idx // s) % d for s, d in zip(self.strides, self.dims)], axis=1)

    def mode_occupations(self, mode) -> np.ndarray:
        pos = ModeId.parse(mode).position
        return (np.arange(self.total_dim) // self.strides[pos]) % self.dims[pos]


def build_basis(mode_cutoffs: Mapping) -> BasisDescriptor:
    """Build a descriptor from a mapping ``ModeId -> cutoff``.

    All six modes must be present.  Keys may be ``ModeId`` members or their
    labels (``"a"``, ``"a~"``, ...).
    """
    parsed = {ModeId.parse(k): int(v) for k, v in mode_cutoffs.items()}
    missing = [m for m in MODES if m not in parsed]
    if missing:
        raise UnknownMode(f"missing cutoffs for modes {[str(m) for m in missing]}")
    basis = BasisDescriptor(tuple(parsed[m] for m in MODES))
    if basis.total_dim > max_dimension():
        raise DimensionTooLarge(
            f"total_dim {basis.total_dim} exceeds guard {max_dimension()} (set TFD_MAX_DIM)"
        )
    return basis


def _as_occupations(occupations, basis: BasisDescriptor) -> tuple[int, ...]:
    if isinstance(occupations, Mapping):
        occ = [0] * len(MODES)
        for k, v in occupations.items():
            occ[ModeId.parse(k).position] = int(v)
        occupations = occ
    occ = tuple(int(n) for n in occupations)
    if len(occ) != len(MODES):
        raise OccupationOutOfRange(f"expected {len(MODES)} occupations, got {len(occ)}")
    for n, c, m in zip(occ, basis.cutoffs, MODES):
        if not 0 <= n <= c:
            raise OccupationOutOfRange(f"occupation {n} of mode {m} outside [0, {c}]")
    return occ


def state_index(occupations, basis: BasisDescriptor) -> int:
    """Mixed-radix rank of an occupation tuple (or a ``{mode: n}`` mapping)."""
    occ = _as_occupations(occupations, basis)
    return sum(n * s for n, s in zip(occ, basis.strides))


def occupations_of(index: int, basis: BasisDescriptor) -> tuple[int, ...]:
    if not 0 <= index < basis.total_dim:
        raise OccupationOutOfRange(f"index {index} outside [0, {basis.total_dim})")
    return tuple((index // s) % d for s, d in zip(basis.strides, basis.dims))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Dense complex amplitudes over a basis.

    ``tail_weight`` records thermal probability discarded by a cutoff when the
    state came from a truncated series; it is 0 for exactly representable
    states.
    """

    basis: BasisDescriptor
    amplitudes: np.ndarray
    tail_weight: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != self.basis.total_dim:
            raise BasisMismatch(
                f"{amps.shape[0]} amplitudes for basis of dimension {self.basis.total_dim}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, occupations) -> complex:
        return complex(self.amplitudes[state_index(occupations, self.basis)])

    def with_amplitudes(self, amplitudes, tail_weight=None) -> "StateVector":
        tw = self.tail_weight if tail_weight is None else tail_weight
        return StateVector(self.basis, amplitudes, tw)

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per mode."""
        return self.amplitudes.reshape(self.basis.dims)

    def __mul__(self, z):
        return self.with_amplitudes(z * self.amplitudes)

    __rmul__ = __mul__

    def __add__(self, other: "StateVector"):
        _check_same_basis(self.basis, other.basis)
        return self.with_amplitudes(self.amplitudes + other.amplitudes)

    def __sub__(self, other: "StateVector"):
        return self + (-1) * other


def _check_same_basis(b1: BasisDescriptor, b2: BasisDescriptor):
    if b1 != b2:
        raise BasisMismatch(f"bases differ: {b1.cutoffs} vs {b2.cutoffs}")


def basis_state(occupations, basis: BasisDescriptor) -> StateVector:
    amps = np.zeros(basis.total_dim, dtype=np.complex128)
    amps[state_index(occupations, basis)] = 1.0
    return StateVector(basis, amps)


def vacuum(basis: BasisDescriptor) -> StateVector:
    return basis_state((0,) * len(MODES), basis)


def inner_product(s1: StateVector, s2: StateVector) -> complex:
    """``<s1|s2>``, conjugate-linear in the first argument."""
    _check_same_basis(s1.basis, s2.basis)
    return complex(np.vdot(s1.amplitudes, s2.amplitudes))


def normalize(s: StateVector) -> StateVector:
    nrm = s.norm()
    if nrm <= 1e-300:
        raise ZeroNorm("cannot normalize a zero vector")
    return s.with_amplitudes(s.amplitudes / nrm)


def product_state(factors: Sequence[tuple], basis: BasisDescriptor) -> StateVector:
    """Superposition ``sum_k coeff_k |occ_k>`` from ``(coeff, occupations)`` pairs."""
    amps = np.zeros(basis.total_dim, dtype=np.complex128)
    for coeff, occ in factors:
        amps[state_index(occ, basis)] += coeff
    return StateVector(basis, amps)
