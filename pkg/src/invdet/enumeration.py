"""Fincke-Pohst enumeration of integer vectors in a Gram-matrix ellipsoid.

Enumeration runs breadth-first over coordinate levels with the frontier
expanded in numpy, then descends depth-first in bounded chunks so memory
stays flat.  Points come out in lexicographic order of their coordinates.
"""

from __future__ import annotations

import math
from collections.abc import Iterator

import numpy as np

# Relative slack on the squared radius; points within it count as inside.
RADIUS_RTOL = 1e-9

_CHUNK = 1 << 16


def ball_volume(dim: int, radius: float) -> float:
    """Volume of the Euclidean ball of the given radius in R^dim."""
    return math.pi ** (dim / 2) / math.gamma(dim / 2 + 1) * radius**dim


def predicted_count(gram: np.ndarray, radius: float) -> float:
    """Gaussian heuristic for the number of lattice points in a ball."""
    k = gram.shape[0]
    vol = math.sqrt(abs(np.linalg.det(gram)))
    return ball_volume(k, radius) / vol


def _mu_form(gram: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (q, mu) with x^T G x = sum_i q_i (x_i + sum_{j>i} mu_ij x_j)^2."""
    r = np.linalg.cholesky(gram).T  # upper triangular, G = R^T R
    q = np.diag(r) ** 2
    mu = r / np.diag(r)[:, None]
    return q, mu


def _top_range(q0: float, r2: float) -> tuple[int, int]:
    h = math.sqrt(r2 / q0)
    return math.ceil(-h), math.floor(h)


def short_vectors(
    gram: np.ndarray,
    radius_sq: float,
    *,
    include_zero: bool = False,
    partition: tuple[int, int] | None = None,
    chunk: int = _CHUNK,
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield ``(coords, norm_sq)`` chunks of all x with x^T G x <= radius_sq.

    ``partition=(j, parts)`` restricts to the j-th of ``parts`` contiguous
    slices of the first coordinate's range, so partitions are disjoint and
    their concatenation in order reproduces the unpartitioned stream.
    """
    gram = np.asarray(gram, dtype=float)
    k = gram.shape[0]
    if k == 0:
        return
    r2 = float(radius_sq) * (1.0 + 2 * RADIUS_RTOL)
    if r2 < 0:
        return
    # Reverse so that coordinate 0 is the outermost enumeration level.
    rev = gram[::-1, ::-1]
    q, mu = _mu_form(rev)
    top = k - 1
    lo, hi = _top_range(q[top], r2)
    if partition is not None:
        j, parts = partition
        vals = np.arange(lo, hi + 1)
        pieces = np.array_split(vals, parts)
        vals = pieces[j]
        if vals.size == 0:
            return
        lo, hi = int(vals[0]), int(vals[-1])

    y_top = np.arange(lo, hi + 1, dtype=np.int64)
    ys = np.zeros((y_top.size, k), dtype=np.int64)
    ys[:, top] = y_top
    s = q[top] * y_top.astype(float) ** 2
    keep = s <= r2
    ys, s = ys[keep], s[keep]
    for start in range(0, ys.shape[0], chunk):
        yield from _descend(
            ys[start : start + chunk], s[start : start + chunk], top - 1, q, mu, r2,
            include_zero, chunk,
        )


def _descend(ys, s, level, q, mu, r2, include_zero, chunk):
    if level < 0:
        coords = ys[:, ::-1]
        if not include_zero:
            nz = coords.any(axis=1)
            coords, s = coords[nz], s[nz]
        if coords.shape[0]:
            yield np.ascontiguousarray(coords), s
        return
    center = -(ys[:, level + 1 :].astype(float) @ mu[level, level + 1 :])
    rem = np.maximum(r2 - s, 0.0)
    h = np.sqrt(rem / q[level])
    lo = np.ceil(center - h).astype(np.int64)
    hi = np.floor(center + h).astype(np.int64)
    counts = np.maximum(hi - lo + 1, 0)
    total = int(counts.sum())
    if total == 0:
        return
    parent = np.repeat(np.arange(ys.shape[0]), counts)
    starts = np.cumsum(counts) - counts
    offs = np.arange(total, dtype=np.int64) - np.repeat(starts, counts)
    vals = lo[parent] + offs
    child = ys[parent].copy()
    child[:, level] = vals
    cs = s[parent] + q[level] * (vals - center[parent]) ** 2
    ok = cs <= r2
    child, cs = child[ok], cs[ok]
    if level == 0:
        yield from _descend(child, cs, -1, q, mu, r2, include_zero, chunk)
        return
    for start in range(0, child.shape[0], chunk):
        yield from _descend(
            child[start : start + chunk], cs[start : start + chunk], level - 1, q, mu, r2,
            include_zero, chunk,
        )


def lll_reduce(gram: np.ndarray, delta: float = 0.99) -> np.ndarray:
    """LLL-reduce a basis given by its Gram matrix.

    Returns the unimodular integer matrix U whose rows express the reduced
    basis in the original one (new Gram = U G U^T).
    """
    g = np.array(gram, dtype=float)
    n = g.shape[0]
    u = np.eye(n, dtype=np.int64)

    def gso(g):
        mu = np.zeros((n, n))
        bstar = np.zeros(n)
        for i in range(n):
            for j in range(i):
                mu[i, j] = (g[i, j] - sum(mu[j, l] * mu[i, l] * bstar[l] for l in range(j))) / bstar[j]
            bstar[i] = g[i, i] - sum(mu[i, l] ** 2 * bstar[l] for l in range(i))
        return mu, bstar

    def apply(t):
        nonlocal g, u
        g = t @ g @ t.T
        u = t @ u

    mu, bstar = gso(g)
    kk = 1
    while kk < n:
        for j in range(kk - 1, -1, -1):
            r = round(mu[kk, j])
            if r:
                t = np.eye(n, dtype=np.int64)
                t[kk, j] = -r
                apply(t)
                mu, bstar = gso(g)
        if bstar[kk] >= (delta - mu[kk, kk - 1] ** 2) * bstar[kk - 1]:
            kk += 1
        else:
            t = np.eye(n, dtype=np.int64)
            t[[kk, kk - 1]] = t[[kk - 1, kk]]
            apply(t)
            mu, bstar = gso(g)
            kk = max(kk - 1, 1)
    return u
