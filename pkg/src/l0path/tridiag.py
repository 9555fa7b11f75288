"""Exact solver for path-structured instances.

The minimum over (x, z) of a . z + c . x + (1/2) x'Qx with tridiagonal
positive definite Q equals the shortest path from node 0 to node m+1 in a
DAG whose arc (i, j) carries the optimal value of the continuous
subproblem on variables i+1 .. j-1 (those strictly between the endpoints;
the path's visited interior nodes are exactly the zeros of z). All arc
weights out of one node are produced by a single forward-elimination
recurrence, giving the O(m^2) time / O(m) memory labeling pass; x is then
recovered by re-solving each chosen block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import PIVOT_TOL, labels_kernel, thomas_kernel
from .errors import InputError, NotPositiveDefinite
from .instance import Instance


@dataclass(frozen=True, eq=False)
class TridiagProblem:
    """Path-structured subproblem: minimize a.z + c.x + (1/2) x'Qx with
    Q tridiagonal (diagonal `diag`, superdiagonal `off`).

    Zero entries in `off` are legal; they decouple the problem into
    independent blocks and the recurrences handle them exactly.
    """

    m: int
    a: np.ndarray
    c: np.ndarray
    diag: np.ndarray
    off: np.ndarray

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        for name in ("a", "c", "diag", "off"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.a.shape == self.c.shape == self.diag.shape == (self.m,)):
            raise ValueError("a, c, diag must have length m")
        if self.off.shape != (max(self.m - 1, 0),):
            raise ValueError("off must have length m - 1")
        # forward-elimination pivots of the full matrix; these are the
        # leading-minor ratios, so all > 0 is exactly positive definiteness
        piv = self.diag[0]
        if piv <= PIVOT_TOL:
            raise NotPositiveDefinite(f"pivot {piv:.3g} at position 0")
        for t in range(1, self.m):
            piv = self.diag[t] - self.off[t - 1] ** 2 / piv
            if piv <= PIVOT_TOL:
                raise NotPositiveDefinite(f"pivot {piv:.3g} at position {t}")

    def objective(self, x: np.ndarray, z: np.ndarray) -> float:
        """Direct evaluation of a.z + c.x + (1/2) x'Qx."""
        val = float(self.a @ z + self.c @ x + 0.5 * self.diag @ (x * x))
        if self.m > 1:
            val += float(self.off @ (x[:-1] * x[1:]))
        return val


@dataclass(frozen=True, eq=False)
class SPSolution:
    """Optimal point: `visited` lists the zero positions (the interior
    nodes of the shortest path, 0-based)."""

    objective: float
    z: np.ndarray
    x: np.ndarray
    visited: tuple[int, ...]


def _solve_block(p: TridiagProblem, lo: int, hi: int, x: np.ndarray) -> None:
    """Fill x[lo:hi] with the stationary point of the block [lo, hi)."""
    xs, fail = thomas_kernel(p.diag[lo:hi], p.off[lo : hi - 1], -p.c[lo:hi])
    if fail >= 0:
        raise NotPositiveDefinite(f"pivot failed at position {lo + int(fail)}")
    x[lo:hi] = xs


def solve(p: TridiagProblem) -> SPSolution:
    """Global optimum via the shortest-path labeling pass.

    Labels are updated in topological order; ties break toward the
    smaller predecessor, so the result is deterministic.
    """
    labels, preds, fail = labels_kernel(p.a, p.c, p.diag, p.off)
    if fail >= 0:
        raise NotPositiveDefinite(f"pivot failed while weighting column {int(fail)}")
    # backtrack the predecessor chain from the sink m+1 to the source 0
    chain = [p.m + 1]
    while chain[-1] != 0:
        chain.append(int(preds[chain[-1]]))
    chain.reverse()
    visited = tuple(v - 1 for v in chain[1:-1])
    z = np.ones(p.m, dtype=np.int64)
    x = np.zeros(p.m)
    for v in visited:
        z[v] = 0
    for u, v in zip(chain, chain[1:]):
        if v > u + 1:
            _solve_block(p, u, v - 1, x)
    return SPSolution(objective=float(labels[p.m + 1]), z=z, x=x, visited=visited)


def solve_fixed_z(p: TridiagProblem, zbar) -> tuple[np.ndarray, float]:
    """Minimize over x with the support fixed to zbar.

    Each maximal run of ones is one tridiagonal block; at its stationary
    point the block objective collapses to sum(a) + (1/2) c . x.
    """
    zbar = np.asarray(zbar)
    if zbar.shape != (p.m,):
        raise ValueError("zbar must have length m")
    x = np.zeros(p.m)
    value = 0.0
    t = 0
    while t < p.m:
        if zbar[t] == 0:
            t += 1
            continue
        lo = t
        while t < p.m and zbar[t] != 0:
            t += 1
        _solve_block(p, lo, t, x)
        value += float(np.sum(p.a[lo:t]) + 0.5 * p.c[lo:t] @ x[lo:t])
    return x, value


def arc_weight_row(p: TridiagProblem, i: int):
    """Yield (j, w_ij) for j = i+2 .. m+1 by the O(1)-per-step recurrence.

    w_ij is the optimal value of the continuous subproblem on positions
    i+1 .. j-1 plus their indicator penalties; the length-one arcs
    (i, i+1) all have weight zero and are not emitted.
    """
    if not 0 <= i <= p.m - 1:
        raise ValueError("i must be in 0 .. m-1")
    cbar = 0.0
    qbar = np.inf
    wbar = 0.0
    for j in range(i + 2, p.m + 2):
        o = p.off[j - 3] if j >= 3 else 0.0
        cbar = p.c[j - 2] - o * cbar / qbar
        qbar = p.diag[j - 2] - o * o / qbar
        if qbar <= PIVOT_TOL:
            raise NotPositiveDefinite(f"pivot {qbar:.3g} while weighting column {j}")
        wbar = wbar + p.a[j - 2] - 0.5 * cbar * cbar / qbar
        yield j, wbar


def to_tridiagonal(instance: Instance) -> TridiagProblem:
    """View an instance whose stored order is already a path as a
    TridiagProblem; rejects any entry beyond the first off-diagonal."""
    diag = np.zeros(instance.n)
    off = np.zeros(max(instance.n - 1, 0))
    for i, j, v in zip(instance.qi, instance.qj, instance.qv):
        if j - i > 1:
            raise InputError(
                f"Q entry ({int(i)}, {int(j)}) is off the tridiagonal band; "
                "reorder the instance (see the decompose command) first"
            )
        if i == j:
            diag[i] = v
        else:
            off[i] = v
    return TridiagProblem(m=instance.n, a=instance.a, c=instance.c, diag=diag, off=off)
