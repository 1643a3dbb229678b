"""Independent brute-force oracles shared by the tests.

Nothing here goes through the Fincke-Pohst enumerator, the exact
determinant tags or the histogram summation used by the library.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def box_scan(L, M):
    """All nonzero points of the ball by scanning a coordinate box.

    Returns a dict coords -> (frobenius_norm, |det|) with det from LAPACK.
    """
    g = np.real(np.einsum("aij,bij->ab", L.basis, L.basis.conj()))
    ginv = np.linalg.inv(g)
    bound = [int(math.floor(M * math.sqrt(ginv[i, i]) + 1e-9)) for i in range(len(g))]
    grid = np.array(list(itertools.product(*[range(-b, b + 1) for b in bound])), dtype=float)
    mats = np.einsum("na,aij->nij", grid, L.basis)
    norms = np.linalg.norm(mats.reshape(len(grid), -1), axis=1)
    keep = (norms <= M * (1 + 1e-9)) & np.any(grid != 0, axis=1)
    dets = np.abs(np.linalg.det(mats[keep]))
    return {tuple(int(v) for v in c): (float(n), float(d)) for c, n, d in zip(grid[keep], norms[keep], dets)}


def box_scan_sum(L, M, m):
    pts = box_scan(L, M)
    return math.fsum(d ** -m for _, d in pts.values()), len(pts)


def gaussian_r2(n: int) -> int:
    """Number of (a, b) with a^2 + b^2 = n."""
    r = math.isqrt(n)
    return sum(1 for a in range(-r, r + 1) for b in range(-r, r + 1) if a * a + b * b == n)


def hnf(rows):
    """Row-style Hermite normal form of a full-rank integer matrix (lower-left zero)."""
    a = [list(map(int, r)) for r in rows]
    n = len(a[0])
    out = []
    col = 0
    while a and col < n:
        a = [r for r in a if any(r)]
        piv = [r for r in a if r[col] != 0]
        if not piv:
            col += 1
            continue
        while len([r for r in a if r[col] != 0]) > 1:
            nz = sorted((r for r in a if r[col] != 0), key=lambda r: abs(r[col]))
            p = nz[0]
            for r in nz[1:]:
                q = r[col] // p[col]
                for j in range(n):
                    r[j] -= q * p[j]
        p = next(r for r in a if r[col] != 0)
        if p[col] < 0:
            p[:] = [-v for v in p]
        out.append(p)
        a = [r for r in a if r is not p]
        col += 1
    for i in range(len(out)):
        c = next(j for j in range(n) if out[i][j])
        for k in range(i):
            q = out[k][c] // out[i][c]
            out[k] = [x - q * y for x, y in zip(out[k], out[i])]
    return tuple(tuple(r) for r in out)


def principal_ideal_norm_counts(K, limit, box):
    """Counts of principal ideals by norm, by deduplicating generators via HNF.

    Valid as a full ideal count only for class number one.
    """
    d = K.degree
    seen = {}
    for c in itertools.product(range(-box, box + 1), repeat=d):
        if not any(c):
            continue
        x = K.element(c)
        nrm = abs(int(x.norm()))
        if nrm > limit:
            continue
        gens = [(x * K.element([int(i == j) for j in range(d)])).int_coords() for i in range(d)]
        seen.setdefault(hnf(gens), nrm)
    counts = [0] * (limit + 1)
    for nrm in seen.values():
        counts[nrm] += 1
    return counts
