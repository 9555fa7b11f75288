"""Numerical kernels: shortest-path labeling, tridiagonal solves, support
enumeration.

Each kernel exists twice: a numba-compiled scalar version (used when numba
imports cleanly) and a pure numpy version with identical semantics. The
label recurrences initialize the running pivot to +inf so that the first
elimination step of every row needs no special case (x/inf == 0 in IEEE
arithmetic); fastmath stays off to keep that exact.
"""

from __future__ import annotations

import numpy as np

PIVOT_TOL = 1e-12


def _labels_py(a, c, diag, off):
    """Column-major label sweep; returns (labels, preds, fail_col)."""
    m = a.shape[0]
    labels = np.full(m + 2, np.inf)
    labels[0] = 0.0
    preds = np.full(m + 2, -1, dtype=np.int64)
    cbar = np.empty(m + 1)
    qbar = np.empty(m + 1)
    wbar = np.empty(m + 1)
    for j in range(1, m + 2):
        if j >= 2:
            # row i = j-2 starts its segment at this column
            cbar[j - 2] = 0.0
            qbar[j - 2] = np.inf
            wbar[j - 2] = 0.0
            o = off[j - 3] if j >= 3 else 0.0
            s = slice(0, j - 1)
            cbar[s] = c[j - 2] - o * cbar[s] / qbar[s]
            qbar[s] = diag[j - 2] - o * o / qbar[s]
            if np.any(qbar[s] <= PIVOT_TOL):
                return labels, preds, j
            wbar[s] += a[j - 2] - 0.5 * cbar[s] * cbar[s] / qbar[s]
            cands = labels[: j - 1] + wbar[s]
            besti = int(np.argmin(cands))
            best = cands[besti]
        else:
            besti, best = -1, np.inf
        # the zero-weight skip arc (j-1, j) is considered last; ties keep
        # the smaller predecessor
        if best <= labels[j - 1]:
            labels[j] = best
            preds[j] = besti
        else:
            labels[j] = labels[j - 1]
            preds[j] = j - 1
    return labels, preds, -1


def _thomas_py(diag, off, rhs):
    """Solve the tridiagonal system T x = rhs; returns (x, fail_row)."""
    m = diag.shape[0]
    piv = np.empty(m)
    r = np.empty(m)
    piv[0] = diag[0]
    r[0] = rhs[0]
    if piv[0] <= PIVOT_TOL:
        return r, 0
    for t in range(1, m):
        l = off[t - 1] / piv[t - 1]
        piv[t] = diag[t] - l * off[t - 1]
        if piv[t] <= PIVOT_TOL:
            return r, t
        r[t] = rhs[t] - l * r[t - 1]
    x = np.empty(m)
    x[m - 1] = r[m - 1] / piv[m - 1]
    for t in range(m - 2, -1, -1):
        x[t] = (r[t] - off[t] * x[t + 1]) / piv[t]
    return x, -1


def _enumerate_py(a, c, q):
    """Minimize over all supports; returns (value, mask, skipped)."""
    n = a.shape[0]
    best_val = 0.0
    best_mask = 0
    skipped = 0
    scratch = np.empty((n, n + 1))
    for mask in range(1, 1 << n):
        idx = [i for i in range(n) if mask & (1 << (n - 1 - i))]
        k = len(idx)
        g = scratch[:k, : k + 1]
        for p in range(k):
            for t in range(k):
                g[p, t] = q[idx[p], idx[t]]
            g[p, k] = -c[idx[p]]
        ok = True
        for p in range(k):
            if g[p, p] <= PIVOT_TOL:
                ok = False
                break
            for t in range(p + 1, k):
                f = g[t, p] / g[p, p]
                g[t, p : k + 1] -= f * g[p, p : k + 1]
        if not ok:
            skipped += 1
            continue
        x = np.empty(k)
        for p in range(k - 1, -1, -1):
            x[p] = (g[p, k] - g[p, p + 1 : k] @ x[p + 1 : k]) / g[p, p]
        # at a stationary point Q_S x = -c_S, so the objective collapses to
        # sum(a_S) + (1/2) c_S . x
        val = 0.0
        for p in range(k):
            val += a[idx[p]] + 0.5 * c[idx[p]] * x[p]
        if val < best_val:
            best_val = val
            best_mask = mask
    return best_val, best_mask, skipped


try:
    from numba import njit

    @njit(cache=True, nogil=True)
    def _labels_numba(a, c, diag, off):  # pragma: no cover - timed via tests
        m = a.shape[0]
        labels = np.full(m + 2, np.inf)
        labels[0] = 0.0
        preds = np.full(m + 2, -1, dtype=np.int64)
        for i in range(m + 1):
            if labels[i] < labels[i + 1]:
                labels[i + 1] = labels[i]
                preds[i + 1] = i
            cbar = 0.0
            qbar = np.inf
            wbar = 0.0
            li = labels[i]
            for j in range(i + 2, m + 2):
                o = off[j - 3] if j >= 3 else 0.0
                cbar = c[j - 2] - o * cbar / qbar
                qbar = diag[j - 2] - o * o / qbar
                if qbar <= PIVOT_TOL:
                    return labels, preds, j
                wbar = wbar + a[j - 2] - 0.5 * cbar * cbar / qbar
                cand = li + wbar
                if cand < labels[j]:
                    labels[j] = cand
                    preds[j] = i
        return labels, preds, -1

    @njit(cache=True, nogil=True)
    def _thomas_numba(diag, off, rhs):  # pragma: no cover
        m = diag.shape[0]
        piv = np.empty(m)
        r = np.empty(m)
        piv[0] = diag[0]
        r[0] = rhs[0]
        if piv[0] <= PIVOT_TOL:
            return r, 0
        for t in range(1, m):
            l = off[t - 1] / piv[t - 1]
            piv[t] = diag[t] - l * off[t - 1]
            if piv[t] <= PIVOT_TOL:
                return r, t
            r[t] = rhs[t] - l * r[t - 1]
        x = np.empty(m)
        x[m - 1] = r[m - 1] / piv[m - 1]
        for t in range(m - 2, -1, -1):
            x[t] = (r[t] - off[t] * x[t + 1]) / piv[t]
        return x, -1

    @njit(cache=True, nogil=True)
    def _enumerate_numba(a, c, q):  # pragma: no cover
        n = a.shape[0]
        best_val = 0.0
        best_mask = 0
        skipped = 0
        scratch = np.empty((n, n + 1))
        idx = np.empty(n, dtype=np.int64)
        x = np.empty(n)
        for mask in range(1, 1 << n):
            k = 0
            for i in range(n):
                if mask & (1 << (n - 1 - i)):
                    idx[k] = i
                    k += 1
            for p in range(k):
                for t in range(k):
                    scratch[p, t] = q[idx[p], idx[t]]
                scratch[p, k] = -c[idx[p]]
            ok = True
            for p in range(k):
                if scratch[p, p] <= PIVOT_TOL:
                    ok = False
                    break
                for t in range(p + 1, k):
                    f = scratch[t, p] / scratch[p, p]
                    for u in range(p, k + 1):
                        scratch[t, u] -= f * scratch[p, u]
            if not ok:
                skipped += 1
                continue
            for p in range(k - 1, -1, -1):
                acc = scratch[p, k]
                for t in range(p + 1, k):
                    acc -= scratch[p, t] * x[t]
                x[p] = acc / scratch[p, p]
            val = 0.0
            for p in range(k):
                val += a[idx[p]] + 0.5 * c[idx[p]] * x[p]
            if val < best_val:
                best_val = val
                best_mask = mask
        return best_val, best_mask, skipped

    HAVE_NUMBA = True
    labels_kernel = _labels_numba
    thomas_kernel = _thomas_numba
    enumerate_kernel = _enumerate_numba
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False
    labels_kernel = _labels_py
    thomas_kernel = _thomas_py
    enumerate_kernel = _enumerate_py
