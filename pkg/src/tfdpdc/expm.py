"""Action of a sparse matrix exponential on vectors.

``expm_action(A, v, z)`` returns ``exp(z A) v`` by splitting the interval into
``s`` equal sub-steps and summing a truncated Taylor series on each.  The
series order is chosen a priori from the bound

    ||R_m|| <= rho^(m+1) / (m+1)! * 1 / (1 - rho / (m+2)),   rho = |z| ||A|| / s,

so every sub-step meets ``tol / s`` relative to the input norm.  Summation
order is fixed, so results are bitwise reproducible for a given input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ConvergenceFailure

TARGET_STEP_NORM = 4.0


@dataclass(frozen=True)
class SeriesPlan:
    substeps: int
    order: int
    step_norm: float


def norm_bound(A) -> float:
    """``max(||A||_1, ||A||_inf)``, an upper bound on the spectral norm."""
    if sp.issparse(A):
        if not A.nnz:
            return 0.0
        absA = abs(A)
        return float(max(absA.sum(axis=0).max(), absA.sum(axis=1).max()))
    absA = np.abs(A)
    return float(max(absA.sum(axis=0).max(), absA.sum(axis=1).max())) if A.size else 0.0


def remainder_bound(rho: float, m: int) -> float:
    """Upper bound on the Taylor remainder after terms ``0..m`` for norm ``rho``."""
    if rho == 0.0:
        return 0.0
    if rho >= m + 2:
        return math.inf
    log_term = (m + 1) * math.log(rho) - math.lgamma(m + 2)
    return math.exp(log_term) / (1.0 - rho / (m + 2))


def plan_series(norm: float, tol: float, max_order: int = 60,
                max_substeps: int = 1 << 16) -> SeriesPlan:
    """Pick sub-step count and Taylor order meeting ``tol`` overall."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if norm == 0.0:
        return SeriesPlan(1, 0, 0.0)
    s = max(1, math.ceil(norm / TARGET_STEP_NORM))
    while s <= max_substeps:
        rho = norm / s
        step_tol = tol / s
        for m in range(1, max_order + 1):
            if remainder_bound(rho, m) <= step_tol:
                return SeriesPlan(s, m, rho)
        s *= 2
    raise ConvergenceFailure(
        f"no series of order <= {max_order} reaches tol={tol:g} for norm {norm:g} "
        f"within {max_substeps} sub-steps"
    )


def expm_action(A, v, z: complex = 1.0, tol: float = 1e-10, max_order: int = 60,
                max_substeps: int = 1 << 16) -> np.ndarray:
    """Compute ``exp(z * A) @ v``.

    Parameters
    ----------
    A : sparse matrix or ndarray, shape (n, n)
    v : ndarray, shape (n,) or (n, k)
    z : complex scalar multiplying ``A`` (e.g. ``-1j * t``).
    tol : relative error target measured against ``||v||``.
    max_order, max_substeps : limits; exceeding both raises ConvergenceFailure.
    """
    v = np.asarray(v, dtype=np.complex128)
    if z == 0 or (sp.issparse(A) and A.nnz == 0):
        return v.copy()
    plan = plan_series(abs(z) * norm_bound(A), tol, max_order, max_substeps)
    h = complex(z) / plan.substeps
    out = v.copy()
    for _ in range(plan.substeps):
        term = out
        acc = out.copy()
        for k in range(1, plan.order + 1):
            term = (h / k) * (A @ term)
            acc += term
        out = acc
    return out
