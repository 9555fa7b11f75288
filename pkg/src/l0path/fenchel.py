"""Closed-form conjugate of the rank-one perspective term and its
subgradients.

The underlying term is (x1 + sign * x2)^2 / min{1, z1 + z2} over
x in R^2, z in [0,1]^2. Its conjugate in the dual triple (alpha, beta1,
beta2) has the closed form

    f*(alpha, beta1, beta2)
        = max{0, alpha^2/4 - min(beta1, beta2)} - min{max(beta1, beta2), 0}

independently of the sign (the substitution x2 -> -x2 maps one sign case
onto the other without touching the duals).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RHO_CAP = 1e6


@dataclass(frozen=True)
class DualTriple:
    """One multiplier triple for a relaxed pairwise term."""

    alpha: float
    beta1: float
    beta2: float
    sign: int = -1


def f_star(d: DualTriple) -> float:
    """Closed-form conjugate value."""
    lo = min(d.beta1, d.beta2)
    hi = max(d.beta1, d.beta2)
    return max(0.0, 0.25 * d.alpha**2 - lo) - min(hi, 0.0)


def f_star_subgradient(d: DualTriple) -> tuple[float, float, float]:
    """One subgradient of f* at d.

    The conjugate is a pointwise max of smooth pieces; each branch below
    returns the gradient of a piece active on that region. On the tie
    beta1 == beta2 both single-beta pieces are active and either gradient
    is valid; this routine decrements beta2 there (the choice that
    reproduces the reference iteration trajectory, see the decomposition
    tests).
    """
    q = 0.25 * d.alpha**2
    if d.beta1 > q and d.beta2 > q:
        return (0.0, 0.0, 0.0)
    if d.beta1 < 0 and d.beta2 < 0:
        return (0.5 * d.alpha, -1.0, -1.0)
    if d.beta1 >= d.beta2:
        return (0.5 * d.alpha, 0.0, -1.0)
    return (0.5 * d.alpha, -1.0, 0.0)


def tight_duals(
    x1: float, x2: float, z1: float, z2: float, sign: int
) -> tuple[DualTriple, bool]:
    """Duals making the conjugate inequality tight at (x, z).

    Returns (triple, asymptotic). The asymptotic flag marks the z = 0,
    x1 + sign*x2 != 0 case, where tightness is only reached in the limit;
    the returned triple uses the finite cap RHO_CAP and the caller decides
    whether that is acceptable.
    """
    s = x1 + sign * x2
    sigma = z1 + z2
    if sigma == 0.0:
        if s == 0.0:
            return DualTriple(0.0, 0.0, 0.0, sign), False
        alpha = RHO_CAP * s
        return DualTriple(alpha, 0.25 * alpha**2, 0.25 * alpha**2, sign), True
    if sigma < 1.0:
        alpha = 2.0 * s / sigma
        beta = (s / sigma) ** 2
        return DualTriple(alpha, beta, beta, sign), False
    return DualTriple(2.0 * s, 0.0, 0.0, sign), False


def f_star_bruteforce(
    d: DualTriple, xmax: float = 10.0, xstep: float = 1e-3, zstep: float = 1e-2
) -> float:
    """Grid evaluation of the defining supremum; a lower bound on f_star
    within O(xstep). Test oracle only.

    The objective depends on x only through t = x1 + sign * x2 and on z
    only through (z1, z2, min{1, z1 + z2}), so the grid maximum factors:
    first the best t for every distinct denominator, then the best
    (z1, z2) pair.
    """
    t = np.arange(-xmax, xmax + 0.5 * xstep, xstep)
    zg = np.linspace(0.0, 1.0, round(1.0 / zstep) + 1)
    sums = zg[:, None] + zg[None, :]
    denom = np.minimum(1.0, sums)
    steps = np.unique(np.round(denom / zstep).astype(np.int64))
    steps = steps[steps > 0]
    mu = steps * zstep
    # best of alpha*t - t^2/mu per distinct denominator mu
    best_t = np.max(d.alpha * t[None, :] - t[None, :] ** 2 / mu[:, None], axis=1)
    lookup = np.full(int(steps.max()) + 1, -np.inf)
    lookup[steps] = best_t
    idx = np.round(denom / zstep).astype(np.int64)
    vals = np.where(
        sums > 0.0,
        lookup[idx] - d.beta1 * zg[:, None] - d.beta2 * zg[None, :],
        0.0,  # z = 0 forces t = 0, leaving no dual contribution
    )
    return float(max(vals.max(), 0.0))
