"""Inverse determinant sums over Frobenius balls.

Sums are accumulated as an exact histogram {D: count} of the integer
determinant data of tagged lattices and only then turned into a float with
``math.fsum`` over sorted keys, so results do not depend on enumeration
order, partitioning or thread count.

Two evaluation methods exist.  ``direct`` enumerates the whole ball.
``orbit`` uses the free group of central units: it enumerates one
representative (the Frobenius-minimal element) of every unit orbit whose
|det| is at most a cap D, and counts each orbit's translates inside the ball
in exponent space.  The result equals the ball sum restricted to
|det| <= D, which is the full sum once D exceeds the largest determinant
possible in the ball.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from . import enumeration
from .curves import Sample, SumCurve
from .errors import ScopeError
from .lattice import MatrixLattice, ball_chunks, check_budget, normalization_factor
from .units import count_translates, translates_in_ball

AUTO_DIRECT_LIMIT = 4e6
ORBIT_POINTS = 2e6
_TIE = 1e-9


# ---------------------------------------------------------------------------
# histogram helpers


def _merge(hist: Counter, dets: np.ndarray, weights: np.ndarray | None = None) -> None:
    if dets.dtype == object:
        w = np.ones(len(dets), dtype=np.int64) if weights is None else weights
        for d, c in zip(dets.tolist(), w.tolist()):
            hist[d] += c
        return
    if weights is None:
        keys, counts = np.unique(dets, return_counts=True)
    else:
        keys, inv = np.unique(dets, return_inverse=True)
        counts = np.bincount(inv, weights=weights).astype(np.int64)
    for k, c in zip(keys.tolist(), counts.tolist()):
        if c:
            hist[k] += c


def _hist_sum(hist: Counter, exponent: float, m: float) -> float:
    return math.fsum(c * float(d) ** (-exponent * m) for d, c in sorted(hist.items()) if c)


def _hist_stats(hist: Counter, exponent: float, m: float) -> tuple[float, int, float | None]:
    count = sum(hist.values())
    positive = [d for d, c in hist.items() if c]
    mind = float(min(positive)) ** exponent if positive else None
    return _hist_sum(hist, exponent, m), count, mind


@dataclass(frozen=True)
class DetSum:
    value: float
    point_count: int
    min_abs_det: float | None
    M: float
    m: float
    method: str = "direct"
    det_cap: float | None = None  # orbit method: only |det| <= det_cap counted
    exact: bool = True  # False when the cap may exclude points of the ball
    truncation_delta: float | None = None  # value minus value at det_cap / 2


# ---------------------------------------------------------------------------
# direct enumeration


def _direct_histograms(
    L: MatrixLattice,
    radii: Sequence[float],
    *,
    budget: float | None,
    threads: int,
) -> tuple[list[Counter], float, list[list[float]]]:
    """Per-radius-shell histograms of |det| data over the ball of the largest radius.

    Untagged lattices keep raw |det| values per shell instead (exponent 1).
    """
    radii = sorted(float(r) for r in radii)
    r2 = np.array(radii) ** 2 * (1 + 2 * enumeration.RADIUS_RTOL)
    check_budget(L, radii[-1], budget)
    parts = max(1, int(threads))
    exponent = L.tag.exponent if L.tag is not None else 1.0

    def work(j):
        hists = [Counter() for _ in radii]
        raw = [[] for _ in radii]
        for coords, _ in ball_chunks(L, radii[-1], budget=math.inf, partition=(j, parts)):
            s = L.norms_sq(coords)
            shell = np.searchsorted(r2, s, side="left")
            dets, _ = L.abs_dets(coords)
            for b in np.unique(shell).tolist():
                sel = shell == b
                if L.tag is not None:
                    _merge(hists[b], dets[sel])
                else:
                    raw[b].append(np.asarray(dets[sel], dtype=float))
        return hists, raw

    if parts == 1:
        results = [work(0)]
    else:
        with ThreadPoolExecutor(max_workers=parts) as ex:
            results = list(ex.map(work, range(parts)))
    hists = [Counter() for _ in radii]
    raws: list[list[float]] = [[] for _ in radii]
    for h, raw in results:  # fixed partition order
        for b in range(len(radii)):
            hists[b].update(h[b])
            for arr in raw[b]:
                raws[b].extend(arr.tolist())
    return hists, exponent, raws


def _direct_curve(L, radii, m, budget, threads) -> list[DetSum]:
    hists, e, raws = _direct_histograms(L, radii, budget=budget, threads=threads)
    out = []
    acc, acc_raw = Counter(), []
    for M, h, raw in zip(sorted(radii), hists, raws):
        acc.update(h)
        if L.tag is not None:
            value, count, mind = _hist_stats(acc, e, m)
        else:
            acc_raw.extend(raw)
            value = math.fsum(d**-m for d in acc_raw)
            count = len(acc_raw)
            mind = min(acc_raw) if acc_raw else None
        out.append(DetSum(value, count, mind, float(M), float(m)))
    return out


# ---------------------------------------------------------------------------
# orbit method


def voronoi_height(log_units: np.ndarray) -> float:
    """Upper bound on max_i v_i over the Voronoi cell of the log-unit lattice.

    The lattice lives in the hyperplane sum(v) = 0.  Only the relevant-vector
    candidates c @ log_units with c in {-1, 0, 1}^r are imposed, which yields
    a superset of the cell and hence a valid upper bound.
    """
    r, p = log_units.shape
    if r == 0:
        return 0.0
    rows, rhs = [], []
    for c in itertools.product((-1, 0, 1), repeat=r):
        if any(c):
            w = np.asarray(c, dtype=float) @ log_units
            rows.append(w)
            rhs.append(0.5 * float(w @ w))
    a_ub, b_ub = np.array(rows), np.array(rhs)
    a_eq, b_eq = np.ones((1, p)), np.zeros(1)
    best = -math.inf
    for i in range(p):
        obj = np.zeros(p)
        obj[i] = -1.0
        res = linprog(obj, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=[(None, None)] * p)
        if not res.success:
            raise RuntimeError(f"Voronoi bound failed: {res.message}")
        best = max(best, -res.fun)
    return best


def representative_radius_sq(L: MatrixLattice, det_cap: float) -> float:
    """Squared norm bound for Frobenius-minimal orbit elements with |det| <= det_cap.

    For a minimal element x, sum_i e_i <= p e^rho (prod_i e_i)^(1/p) and
    e_i <= C |det_i|^(2/b), giving p C e^rho det_cap^(2/(b p)).
    """
    u = L.units
    p, b = u.blocks, u.block_size
    return p * u.energy_ratio * math.exp(voronoi_height(u.log_units)) * det_cap ** (2.0 / (b * p))


def _lex_less(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise a < b in lexicographic order."""
    diff = a - b
    nz = diff != 0
    first = np.argmax(nz, axis=1)
    has = nz.any(axis=1)
    return has & (diff[np.arange(len(a)), first] < 0)


def _act(x: np.ndarray, u, k: Sequence[int]) -> np.ndarray:
    y = x.copy()
    for j, kj in enumerate(k):
        mat = u.matrices[j] if kj > 0 else u.inverse_matrices[j]
        for _ in range(abs(kj)):
            y = y @ mat
    return y


def _canonical_mask(L: MatrixLattice, coords: np.ndarray, e: np.ndarray) -> np.ndarray:
    """True for points that are the Frobenius-minimal element of their unit orbit.

    Ties in energy are broken by the lexicographically smallest coordinates.
    """
    u = L.units
    lam = u.log_units
    r = lam.shape[0]
    f0 = e.sum(axis=1)
    if r == 0:
        return np.ones(len(coords), dtype=bool)
    if r == 1:
        keep = np.ones(len(coords), dtype=bool)
        for sgn, mat in ((1, u.matrices[0]), (-1, u.inverse_matrices[0])):
            f1 = (e * np.exp(sgn * lam[0])).sum(axis=1)
            keep &= f1 >= f0 * (1 - _TIE)
            tie = np.abs(f1 - f0) <= _TIE * f0
            if tie.any():
                idx = np.flatnonzero(tie)
                nb = coords[idx] @ mat
                keep[idx] &= _lex_less(coords[idx], nb)
        return keep
    keep = np.ones(len(coords), dtype=bool)
    for i in range(len(coords)):
        ks = translates_in_ball(e[i], lam, f0[i] * (1 + _TIE))
        for k in ks:
            if not any(k):
                continue
            fk = float(np.exp(np.asarray(k) @ lam) @ e[i])
            if fk < f0[i] * (1 - _TIE):
                keep[i] = False
                break
            nb = _act(coords[i : i + 1], u, k)
            if _lex_less(nb, coords[i : i + 1])[0]:
                keep[i] = False
                break
    return keep


@dataclass(frozen=True, eq=False)
class OrbitTable:
    """Orbit representatives of a unit-tagged lattice, reusable across radii."""

    lattice: MatrixLattice
    det_cap: float
    max_radius: float
    energies: np.ndarray = field(repr=False)  # (N, p) block energies of representatives
    dets: np.ndarray = field(repr=False)  # (N,) integer determinant data
    exponent: float = 1.0

    @classmethod
    def build(
        cls, L: MatrixLattice, det_cap: float, max_radius: float, *, budget: float | None = None
    ) -> OrbitTable:
        if L.units is None or L.tag is None:
            raise ScopeError(f"{L.label}: the orbit method needs exact determinants and a central unit action")
        r0 = min(math.sqrt(representative_radius_sq(L, det_cap)), float(max_radius))
        e_exp = L.tag.exponent
        # |det| <= cap  <=>  D <= cap^(1/exponent), D integer
        d_cap = math.floor(det_cap ** (1.0 / e_exp) * (1 + 1e-12))
        es, ds = [], []
        for coords, _ in ball_chunks(L, r0, budget=budget):
            dets, _ = L.abs_dets(coords)
            small = np.asarray(dets <= d_cap, dtype=bool)
            if not small.any():
                continue
            c = coords[small]
            en = L.units.energies(c)
            keep = _canonical_mask(L, c, en)
            es.append(en[keep])
            ds.append(np.asarray(dets[small][keep]))
        p = L.units.blocks
        energies = np.concatenate(es) if es else np.zeros((0, p))
        dets = np.concatenate(ds) if ds else np.zeros(0, dtype=np.int64)
        order = np.lexsort((energies.sum(axis=1), dets)) if len(dets) else np.zeros(0, dtype=np.int64)
        return cls(L, float(det_cap), float(max_radius), energies[order], dets[order], e_exp)

    def evaluate(self, M: float, m: float) -> DetSum:
        if M > self.max_radius * (1 + 1e-12):
            raise ValueError("radius exceeds the table's range")
        lam = self.lattice.units.log_units
        counts = count_translates(self.energies, lam, float(M) ** 2) if len(self.dets) else np.zeros(0, np.int64)
        hist, half = Counter(), Counter()
        _merge(hist, self.dets, counts)
        d_half = (self.det_cap / 2) ** (1.0 / self.exponent)
        for d, c in hist.items():
            if d <= d_half:
                half[d] = c
        value, count, mind = _hist_stats(hist, self.exponent, m)
        n = self.lattice.matrix_size
        exact = self.det_cap >= (float(M) ** 2 / n) ** (n / 2)
        delta = value - _hist_sum(half, self.exponent, m)
        return DetSum(value, count, mind, float(M), float(m), "orbit", self.det_cap, exact, delta)


def default_det_cap(L: MatrixLattice, max_radius: float, points: float = ORBIT_POINTS) -> float:
    """Largest cap whose representative ball holds about ``points`` lattice points."""
    k = L.rank
    u = L.units
    r_sq = (points * L.volume / enumeration.ball_volume(k, 1.0)) ** (2.0 / k)
    p, b = u.blocks, u.block_size
    base = p * u.energy_ratio * math.exp(voronoi_height(u.log_units))
    cap = (r_sq / base) ** (b * p / 2.0)
    n = L.matrix_size
    full = (float(max_radius) ** 2 / n) ** (n / 2)
    return max(1.0, min(cap, full))


# ---------------------------------------------------------------------------
# public sums


def _check_m(m: float) -> None:
    if not m > 0:
        raise ScopeError(f"exponent m must be positive, got {m}")


def inverse_det_sum(
    L: MatrixLattice,
    M: float,
    m: float,
    *,
    budget: float | None = None,
    threads: int = 1,
    method: str = "direct",
    det_cap: float | None = None,
) -> DetSum:
    """Sum of |det X|^(-m) over the nonzero points of the closed ball of radius M."""
    _check_m(m)
    return sum_curve(L, [M], m, budget=budget, threads=threads, method=method, det_cap=det_cap).meta["sums"][0]


def normalized_inverse_det_sum(
    L: MatrixLattice,
    M: float,
    m: float,
    *,
    legacy: bool = False,
    budget: float | None = None,
    threads: int = 1,
    method: str = "direct",
    det_cap: float | None = None,
) -> float:
    """Vol^(mn/k) * S(M * Vol^(1/k)).

    ``legacy=True`` keeps the radius at M and only applies the scale factor.
    """
    f = normalization_factor(L, m)
    radius = M if legacy else M * f.radius_factor
    s = inverse_det_sum(L, radius, m, budget=budget, threads=threads, method=method, det_cap=det_cap)
    return f.scale * s.value


def union_bound(L: MatrixLattice, M: float, n_r: int, **kw) -> float:
    """S^(2 n_r)(2M): pairwise error union bound over codeword differences."""
    if int(n_r) != n_r or n_r < 1:
        raise ScopeError("n_r must be a positive integer")
    return inverse_det_sum(L, 2 * M, 2 * int(n_r), **kw).value


def choose_method(L: MatrixLattice, max_radius: float) -> str:
    pred = enumeration.predicted_count(L.gram, max_radius)
    if pred <= AUTO_DIRECT_LIMIT or L.units is None or L.tag is None:
        return "direct"
    return "orbit"


def sum_curve(
    L: MatrixLattice,
    radii: Sequence[float],
    m: float,
    *,
    normalized: bool = False,
    legacy: bool = False,
    method: str = "auto",
    det_cap: float | None = None,
    budget: float | None = None,
    threads: int = 1,
    label: str | None = None,
) -> SumCurve:
    """Inverse determinant sums on a grid of radii.

    ``method`` is ``direct``, ``orbit`` or ``auto`` (direct when the largest
    ball holds at most a few million points).  Orbit results carry their
    determinant cap and exactness flag in ``meta``.
    """
    _check_m(m)
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing")
    if normalized:
        f = normalization_factor(L, m)
        eval_radii = radii if legacy else [r * f.radius_factor for r in radii]
        scale = f.scale
    else:
        eval_radii, scale = radii, 1.0
    if method == "auto":
        method = choose_method(L, eval_radii[-1])
    if method == "direct":
        sums = _direct_curve(L, eval_radii, m, budget, threads)
    elif method == "orbit":
        cap = det_cap if det_cap is not None else default_det_cap(L, eval_radii[-1])
        table = OrbitTable.build(L, cap, eval_radii[-1], budget=budget)
        sums = [table.evaluate(r, m) for r in eval_radii]
    else:
        raise ValueError(f"unknown method {method!r}")
    samples = tuple(Sample(M, scale * s.value, s.point_count, s.min_abs_det) for M, s in zip(radii, sums))
    meta = {
        "method": method,
        "sums": sums,
        "det_cap": sums[0].det_cap if sums else None,
        "exact": all(s.exact for s in sums),
        "matrix_size": L.matrix_size,
    }
    return SumCurve(label or L.label, float(m), samples, normalized, meta)
