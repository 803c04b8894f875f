"""Sparse ladder operators on the doubled space and formal operator expressions.

Two layers live here:

* :class:`SparseOperator`: a concrete CSR matrix bound to a basis, with
  exact sparse arithmetic (add, scale, compose, dagger, apply, commutator).
* ``Expr`` trees: formal sums/products/daggers of ladder symbols.  Tilde
  conjugation is defined on these trees, and :func:`evaluate` turns a tree
  into a :class:`SparseOperator`.

Creation operators use projector truncation: amplitude pushed above the cutoff
is dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from numbers import Number

import numpy as np
import scipy.sparse as sp

from .errors import (
    BasisMismatch,
    DimensionMismatch,
    ExpressionContainsTildeMode,
    UnknownMode,
)
from .fock import MODES, BasisDescriptor, ModeId, StateVector

PRUNE = 1e-300


def _prune(m) -> sp.csr_matrix:
    m = sp.csr_matrix(m, dtype=np.complex128)
    if m.nnz:
        m.data[np.abs(m.data) < PRUNE] = 0
        m.eliminate_zeros()
    m.sort_indices()
    return m


@dataclass(frozen=True, eq=False)
class SparseOperator:
    """Complex sparse matrix acting on ``basis``.

    ``support`` is the set of modes the operator acts on non-trivially (the
    full mode set when unknown).
    """

    basis: BasisDescriptor
    matrix: sp.csr_matrix
    support: frozenset = frozenset(MODES)

    def __post_init__(self):
        m = _prune(self.matrix)
        n = self.basis.total_dim
        if m.shape != (n, n):
            raise DimensionMismatch(f"matrix shape {m.shape} does not match basis dimension {n}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "support", frozenset(self.support))

    def _check(self, other: "SparseOperator"):
        if self.basis != other.basis:
            raise BasisMismatch(f"bases differ: {self.basis.cutoffs} vs {other.basis.cutoffs}")

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        self._check(other)
        return SparseOperator(self.basis, self.matrix + other.matrix, self.support | other.support)

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, z) -> "SparseOperator":
        return SparseOperator(self.basis, self.matrix * complex(z), self.support)

    def __mul__(self, z):
        if isinstance(z, Number):
            return self.scale(z)
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, SparseOperator):
            return compose(self, other)
        if isinstance(other, StateVector):
            return apply(self, other)
        return NotImplemented

    def dagger(self) -> "SparseOperator":
        return SparseOperator(self.basis, self.matrix.conj().T.tocsr(), self.support)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def element(self, bra, ket) -> complex:
        from .fock import state_index
        return complex(self.matrix[state_index(bra, self.basis), state_index(ket, self.basis)])

    def max_abs(self) -> float:
        return float(np.abs(self.matrix.data).max()) if self.matrix.nnz else 0.0

    def is_hermitian(self, atol: float = 0.0) -> bool:
        return hermiticity_defect(self) <= atol


def add(A: SparseOperator, B: SparseOperator) -> SparseOperator:
    return A + B


def scale(A: SparseOperator, z) -> SparseOperator:
    return A.scale(z)


def dagger(A: SparseOperator) -> SparseOperator:
    return A.dagger()


def compose(A: SparseOperator, B: SparseOperator) -> SparseOperator:
    """Matrix product ``A B``."""
    A._check(B)
    return SparseOperator(A.basis, A.matrix @ B.matrix, A.support | B.support)


def apply(A: SparseOperator, s: StateVector) -> StateVector:
    if A.basis != s.basis:
        raise BasisMismatch(f"operator basis {A.basis.cutoffs} vs state basis {s.basis.cutoffs}")
    return StateVector(s.basis, A.matrix @ s.amplitudes)


def commutator(A: SparseOperator, B: SparseOperator) -> SparseOperator:
    return compose(A, B) - compose(B, A)


def expectation(A: SparseOperator, s: StateVector) -> complex:
    """``<s|A|s>`` (no normalization applied)."""
    return complex(np.vdot(s.amplitudes, A.matrix @ s.amplitudes))


def hermiticity_defect(A: SparseOperator) -> float:
    """``max |A - A^dagger|`` over all entries."""
    d = A.matrix - A.matrix.conj().T
    return float(np.abs(d.data).max()) if d.nnz else 0.0


def identity(basis: BasisDescriptor) -> SparseOperator:
    return SparseOperator(basis, sp.identity(basis.total_dim, dtype=np.complex128, format="csr"),
                          frozenset())


def zero_operator(basis: BasisDescriptor) -> SparseOperator:
    n = basis.total_dim
    return SparseOperator(basis, sp.csr_matrix((n, n), dtype=np.complex128), frozenset())


# --- single-mode matrices and embedding -------------------------------------

def local_lowering(dim: int) -> sp.csr_matrix:
    """Truncated lowering matrix with ``<n-1|a|n> = sqrt(n)``."""
    return sp.diags(np.sqrt(np.arange(1, dim, dtype=float)), 1, shape=(dim, dim),
                    format="csr", dtype=np.complex128)


def local_number(dim: int) -> sp.csr_matrix:
    return sp.diags(np.arange(dim, dtype=float), 0, shape=(dim, dim), format="csr",
                    dtype=np.complex128)


def embed(local_ops: dict, basis: BasisDescriptor) -> SparseOperator:
    """Kronecker-embed ``{mode: local matrix}`` with identities elsewhere."""
    parts = {ModeId.parse(k): v for k, v in local_ops.items()}
    factors = []
    for mode, dim in zip(MODES, basis.dims):
        if mode in parts:
            m = sp.csr_matrix(parts[mode], dtype=np.complex128)
            if m.shape != (dim, dim):
                raise DimensionMismatch(f"local operator on {mode} has shape {m.shape}, need {dim}")
            factors.append(m)
        else:
            factors.append(sp.identity(dim, dtype=np.complex128, format="csr"))
    full = reduce(lambda x, y: sp.kron(x, y, format="csr"), factors)
    return SparseOperator(basis, full, frozenset(parts))


def _mode_in(mode, basis) -> ModeId:
    try:
        return ModeId.parse(mode)
    except UnknownMode:
        raise UnknownMode(f"mode {mode!r} is not part of the basis") from None


def annihilator(mode, basis: BasisDescriptor) -> SparseOperator:
    mode = _mode_in(mode, basis)
    return embed({mode: local_lowering(basis.dim(mode))}, basis)


def creator(mode, basis: BasisDescriptor) -> SparseOperator:
    return annihilator(mode, basis).dagger()


def number_operator(mode, basis: BasisDescriptor) -> SparseOperator:
    mode = _mode_in(mode, basis)
    return embed({mode: local_number(basis.dim(mode))}, basis)


def local_operator(matrix, mode, basis: BasisDescriptor) -> SparseOperator:
    """Embed an arbitrary single-mode matrix ``matrix`` acting on ``mode``."""
    return embed({_mode_in(mode, basis): matrix}, basis)


# --- formal expressions ------------------------------------------------------

class Expr:
    """Formal operator expression; combine with ``+``, ``-``, ``*`` and ``.dag()``."""

    def __add__(self, other):
        return Sum(((1, self), (1, _as_expr(other))))

    def __sub__(self, other):
        return Sum(((1, self), (-1, _as_expr(other))))

    def __neg__(self):
        return Sum(((-1, self),))

    def __mul__(self, other):
        if isinstance(other, Number):
            return Sum(((other, self),))
        return Product((self, _as_expr(other)))

    def __rmul__(self, other):
        if isinstance(other, Number):
            return Sum(((other, self),))
        return Product((_as_expr(other), self))

    def dag(self):
        return Dagger(self)

    def modes(self) -> frozenset:
        raise NotImplementedError


def _as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    raise TypeError(f"cannot combine expression with {type(x).__name__}")


@dataclass(frozen=True, eq=False)
class Identity(Expr):
    def modes(self):
        return frozenset()

    def __repr__(self):
        return "1"


@dataclass(frozen=True, eq=False)
class Ladder(Expr):
    mode: ModeId
    dagger: bool = False

    def modes(self):
        return frozenset({self.mode})

    def __repr__(self):
        return f"{self.mode}{'†' if self.dagger else ''}"


@dataclass(frozen=True, eq=False)
class Product(Expr):
    factors: tuple

    def modes(self):
        return frozenset().union(*(f.modes() for f in self.factors))

    def __repr__(self):
        return "(" + " ".join(map(repr, self.factors)) + ")"


@dataclass(frozen=True, eq=False)
class Sum(Expr):
    terms: tuple  # ((coefficient, Expr), ...)

    def modes(self):
        return frozenset().union(*(e.modes() for _, e in self.terms))

    def __repr__(self):
        return " + ".join(f"{c!r}*{e!r}" for c, e in self.terms)


@dataclass(frozen=True, eq=False)
class Dagger(Expr):
    expr: Expr

    def modes(self):
        return self.expr.modes()

    def __repr__(self):
        return f"({self.expr!r})†"


def lower(mode) -> Ladder:
    return Ladder(ModeId.parse(mode), False)


def raise_(mode) -> Ladder:
    return Ladder(ModeId.parse(mode), True)


def number(mode) -> Product:
    return Product((raise_(mode), lower(mode)))


def tilde_conjugate(expr: Expr, allow_tilde: bool = False) -> Expr:
    """Tilde conjugate of a formal expression (bosonic rules).

    Every ladder symbol moves to its partner mode, products keep their order,
    scalars are complex-conjugated and daggers commute with the map.  Input
    containing tilde modes is rejected unless ``allow_tilde`` is set, in which
    case tilde symbols map back to hat symbols with the bosonic ``+`` sign.
    """
    if not allow_tilde:
        bad = [m for m in expr.modes() if m.is_tilde]
        if bad:
            raise ExpressionContainsTildeMode(f"expression already contains {sorted(map(str, bad))}")
    return _tilde(expr)


def _tilde(expr: Expr) -> Expr:
    if isinstance(expr, Identity):
        return expr
    if isinstance(expr, Ladder):
        return Ladder(expr.mode.partner, expr.dagger)
    if isinstance(expr, Product):
        return Product(tuple(_tilde(f) for f in expr.factors))
    if isinstance(expr, Sum):
        return Sum(tuple((complex(c).conjugate(), _tilde(e)) for c, e in expr.terms))
    if isinstance(expr, Dagger):
        return Dagger(_tilde(expr.expr))
    raise TypeError(f"unsupported expression node {type(expr).__name__}")


def _flatten_ladders(expr: Expr):
    """Ladder factors of a pure product, or None if the product has other nodes."""
    if isinstance(expr, Ladder):
        return [expr]
    if isinstance(expr, Identity):
        return []
    if isinstance(expr, Product):
        out = []
        for f in expr.factors:
            sub = _flatten_ladders(f)
            if sub is None:
                return None
            out.extend(sub)
        return out
    return None


def evaluate(expr: Expr, basis: BasisDescriptor) -> SparseOperator:
    """Evaluate a formal expression to a sparse matrix on ``basis``."""
    ladders = _flatten_ladders(expr)
    if ladders is not None:
        # bosonic modes commute: group factors by mode keeping their order,
        # multiply locally, then one Kronecker product
        local = {}
        for lad in ladders:
            dim = basis.dim(lad.mode)
            m = local_lowering(dim)
            if lad.dagger:
                m = m.conj().T.tocsr()
            local[lad.mode] = local[lad.mode] @ m if lad.mode in local else m
        return embed(local, basis)
    if isinstance(expr, Product):
        return reduce(compose, (evaluate(f, basis) for f in expr.factors))
    if isinstance(expr, Sum):
        total = zero_operator(basis)
        for c, e in expr.terms:
            total = total + evaluate(e, basis).scale(c)
        return total
    if isinstance(expr, Dagger):
        return evaluate(expr.expr, basis).dagger()
    raise TypeError(f"unsupported expression node {type(expr).__name__}")
