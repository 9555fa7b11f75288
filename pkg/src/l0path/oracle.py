"""Exhaustive certified solver for small instances.

Enumerates all 2^n supports, solving the restricted equality system for
each; used as the ground truth in tests and exposed through the CLI for
desk-scale certification.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ._kernels import PIVOT_TOL, enumerate_kernel
from .errors import SingularSupport, TooLarge
from .instance import Instance

logger = logging.getLogger(__name__)

MAX_ENUM_VARS = 20


@dataclass(frozen=True, eq=False)
class OracleResult:
    value: float
    x: np.ndarray
    z: np.ndarray
    supports_enumerated: int


def _solve_support(q: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Gaussian elimination with the shared pivot tolerance."""
    k = q.shape[0]
    g = np.empty((k, k + 1))
    g[:, :k] = q
    g[:, k] = rhs
    for p in range(k):
        if g[p, p] <= PIVOT_TOL:
            raise SingularSupport(f"pivot {g[p, p]:.3g} at elimination step {p}")
        g[p + 1 :, p : k + 1] -= np.outer(g[p + 1 :, p] / g[p, p], g[p, p : k + 1])
    x = np.empty(k)
    for p in range(k - 1, -1, -1):
        x[p] = (g[p, k] - g[p, p + 1 : k] @ x[p + 1 : k]) / g[p, p]
    return x


def fixed_z_qp(instance: Instance, z) -> tuple[np.ndarray, float]:
    """Minimize over x with the support fixed to z.

    Solves Q_S x_S = -c_S on the support S = {i : z_i = 1}; at that
    stationary point the objective collapses to sum(a_S) + (1/2) c_S . x_S.
    """
    z = np.asarray(z)
    sel = np.flatnonzero(z)
    x = np.zeros(instance.n)
    if sel.size == 0:
        return x, 0.0
    q = instance.dense_q()[np.ix_(sel, sel)]
    xs = _solve_support(q, -instance.c[sel])
    x[sel] = xs
    value = float(np.sum(instance.a[sel]) + 0.5 * instance.c[sel] @ xs)
    return x, value


def enumerate_supports(instance: Instance) -> OracleResult:
    """Minimize over every support; ties go to the lexicographically
    smallest z. Supports with a singular restriction are skipped."""
    n = instance.n
    if n > MAX_ENUM_VARS:
        raise TooLarge(f"n = {n} exceeds the enumeration cap {MAX_ENUM_VARS}")
    q = instance.dense_q()
    best_val, best_mask, skipped = enumerate_kernel(
        np.ascontiguousarray(instance.a),
        np.ascontiguousarray(instance.c),
        np.ascontiguousarray(q),
    )
    if skipped:
        logger.debug("skipped %d singular supports out of %d", skipped, 1 << n)
    z = np.array([(best_mask >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.int64)
    x, value = fixed_z_qp(instance, z)
    return OracleResult(value=float(value), x=x, z=z, supports_enumerated=1 << n)
