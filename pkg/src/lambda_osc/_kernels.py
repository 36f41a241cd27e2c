"""Hot loops with a numba path and a pure-numpy path.

``LAMBDA_OSC_NUMBA=0`` in the environment forces the numpy path; it is
also used when numba is not importable. Both paths must produce identical
triplets (tests compare them).
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("LAMBDA_OSC_NUMBA", "1").strip().lower() not in ("0", "false", "no")


def fill_triplets_numpy(tgt, src, off, a, b, nf):
    """COO triplets of ``dP[tgt, n] += (a + b n) P[src, n + off]`` for each term.

    Source indices outside ``[0, nf)`` are dropped (hard truncation).
    """
    n = np.arange(nf)
    rows, cols, vals = [], [], []
    for t in range(tgt.shape[0]):
        m = n + off[t]
        ok = (m >= 0) & (m < nf)
        nn = n[ok]
        v = a[t] + b[t] * nn
        keep = v != 0.0
        rows.append(tgt[t] * nf + nn[keep])
        cols.append(src[t] * nf + m[ok][keep])
        vals.append(v[keep])
    if not rows:
        return np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0)
    return (np.concatenate(rows).astype(np.int64), np.concatenate(cols).astype(np.int64),
            np.concatenate(vals))


def _fill_triplets_loop(tgt, src, off, a, b, nf):
    nt = tgt.shape[0]
    cap = nt * nf
    rows = np.empty(cap, np.int64)
    cols = np.empty(cap, np.int64)
    vals = np.empty(cap, np.float64)
    k = 0
    for t in range(nt):
        for n in range(nf):
            m = n + off[t]
            if m < 0 or m >= nf:
                continue
            v = a[t] + b[t] * n
            if v == 0.0:
                continue
            rows[k] = tgt[t] * nf + n
            cols[k] = src[t] * nf + m
            vals[k] = v
            k += 1
    return rows[:k], cols[:k], vals[:k]


def _moments_loop(p0):
    s0 = 0.0
    s1 = 0.0
    s2 = 0.0
    for n in range(p0.shape[0]):
        x = p0[n]
        s0 += x
        s1 += n * x
        s2 += n * (n - 1.0) * x
    return s0, s1, s2


def moments_numpy(p0):
    n = np.arange(p0.shape[0], dtype=float)
    return float(p0.sum()), float(n @ p0), float((n * (n - 1.0)) @ p0)


if HAVE_NUMBA:
    fill_triplets_numba = numba.njit(cache=True)(_fill_triplets_loop)
    moments_numba = numba.njit(cache=True)(_moments_loop)
else:  # pragma: no cover
    fill_triplets_numba = None
    moments_numba = None


def fill_triplets(tgt, src, off, a, b, nf):
    if USE_NUMBA:
        return fill_triplets_numba(tgt, src, off, a, b, nf)
    return fill_triplets_numpy(tgt, src, off, a, b, nf)


def moments(p0):
    """(sum P, sum n P, sum n(n-1) P) of a Fock distribution."""
    if USE_NUMBA:
        return moments_numba(np.ascontiguousarray(p0, dtype=np.float64))
    return moments_numpy(p0)
