"""Units of O_K inside Frobenius balls.

A unit is u = zeta * prod_j eps_j^k_j.  Its squared Frobenius norm under psi
is sum_i |sigma_i(u)|^2 = sum_i exp(sum_j k_j lambda_ji) with
lambda_ji = 2 log |sigma_i(eps_j)|, so the count reduces to integer points
of a convex region in exponent space.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from .curves import Sample, SumCurve
from .errors import CatalogIncompleteError, ScopeError
from .numberfield import FieldElement, NumberField, unit_density_constant

_TOL = 2e-9  # relative slack on the squared radius, as in the enumerator


def log_unit_matrix(K: NumberField) -> np.ndarray:
    """(rank, places) matrix of 2 log |sigma_i(eps_j)|."""
    if len(K.fundamental_units) != K.unit_rank:
        raise CatalogIncompleteError(f"{K.name}: catalog lacks {K.unit_rank} fundamental units")
    if not K.unit_rank:
        return np.zeros((0, K.signature[0] + K.signature[1]))
    vals = np.array([u.embed() for u in K.units])
    return 2.0 * np.log(np.abs(vals))


def exponent_box(energies: np.ndarray, log_units: np.ndarray, T: float) -> tuple[np.ndarray, np.ndarray]:
    """Integer box containing every k with sum_i e_i exp((k @ log_units)_i) <= T.

    Each term alone must be <= T, so v = k @ log_units lies in the simplex
    {v : sum v = 0, v_i <= log(T / e_i)}; the box spans its vertices.
    """
    r, p = log_units.shape
    b = np.log(T * (1 + _TOL) / np.asarray(energies, dtype=float))
    if b.sum() < 0:
        return np.zeros(r, dtype=np.int64), -np.ones(r, dtype=np.int64)
    verts = np.tile(b, (p, 1))
    verts[np.arange(p), np.arange(p)] = b[np.arange(p)] - b.sum()
    ks = verts[:, :r] @ np.linalg.inv(log_units[:, :r])
    lo = np.floor(ks.min(axis=0) - 1e-9).astype(np.int64)
    hi = np.ceil(ks.max(axis=0) + 1e-9).astype(np.int64)
    return lo, hi


def translates_in_ball(energies: Sequence[float], log_units: np.ndarray, T: float) -> list[tuple[int, ...]]:
    """All exponent vectors k with sum_i e_i exp((k @ log_units)_i) <= T."""
    e = np.asarray(energies, dtype=float)
    r = log_units.shape[0]
    if r == 0:
        return [()] if e.sum() <= T * (1 + _TOL) else []
    lo, hi = exponent_box(e, log_units, T)
    if np.any(hi < lo):
        return []
    grid = np.array(list(itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)])), dtype=np.int64)
    vals = np.exp(grid @ log_units) @ e
    return [tuple(int(v) for v in k) for k in grid[vals <= T * (1 + _TOL)]]


def count_translates(energies: np.ndarray, log_units: np.ndarray, T: float) -> np.ndarray:
    """Row-wise count of k with sum_i e_i exp((k @ log_units)_i) <= T.

    ``energies`` has shape (N, p).  Rank one with two places is solved in
    closed form; other ranks scan the exponent box per row.
    """
    e = np.atleast_2d(np.asarray(energies, dtype=float))
    r, p = log_units.shape
    Tt = T * (1 + _TOL)
    if r == 0:
        return (e.sum(axis=1) <= Tt).astype(np.int64)
    if r == 1 and p == 2 and abs(log_units[0, 0] + log_units[0, 1]) < 1e-9 * abs(log_units[0, 0]):
        lam = log_units[0, 0]
        # e1 y + e2 / y <= T with y = exp(k lam): quadratic in y.
        e1, e2 = e[:, 0], e[:, 1]
        disc = Tt * Tt - 4 * e1 * e2
        ok = disc >= 0
        sq = np.sqrt(np.where(ok, disc, 0.0))
        with np.errstate(divide="ignore"):
            y_lo = np.where(ok, 2 * e2 / (Tt + sq), 1.0)
            y_hi = np.where(ok, (Tt + sq) / (2 * e1), 0.0)
            a = np.where(ok, np.log(y_lo) / lam, 0.0)
            b = np.where(ok, np.log(np.where(ok, y_hi, 1.0)) / lam, 0.0)
        if lam < 0:
            a, b = b, a
        k_lo = np.ceil(a - 1e-7).astype(np.int64)
        k_hi = np.floor(b + 1e-7).astype(np.int64)

        def inside(k):
            return e1 * np.exp(k * lam) + e2 * np.exp(-k * lam) <= Tt

        k_lo = np.where(ok & ~inside(k_lo), k_lo + 1, k_lo)
        k_hi = np.where(ok & ~inside(k_hi), k_hi - 1, k_hi)
        return np.where(ok, np.maximum(k_hi - k_lo + 1, 0), 0)
    return np.array([len(translates_in_ball(row, log_units, T)) for row in e], dtype=np.int64)


def _unit_from_exponents(K: NumberField, k: Sequence[int]) -> FieldElement:
    u = K.one
    for eps, kj in zip(K.units, k):
        if kj:
            u = u * eps**kj
    return u


def enumerate_units_in_ball(K: NumberField, M: float) -> list[FieldElement]:
    """Every unit u with ||psi(u)||_F <= M, as exact elements."""
    if M < 1:
        raise ScopeError("radius must be at least 1")
    lam = log_unit_matrix(K)
    p = lam.shape[1]
    ks = translates_in_ball(np.ones(p), lam, float(M) ** 2)
    out = []
    for k in ks:
        u = _unit_from_exponents(K, k)
        out.extend(z * u for z in K.torsion)
    return out


def count_units_in_ball(K: NumberField, M: float) -> int:
    lam = log_unit_matrix(K)
    p = lam.shape[1]
    return K.roots_of_unity * int(count_translates(np.ones((1, p)), lam, float(M) ** 2)[0])


@dataclass(frozen=True)
class UnitBallCount:
    field: NumberField
    radius: float
    count: int
    predicted: float
    units: tuple[FieldElement, ...] | None = None

    @property
    def residual(self) -> float:
        return self.count - self.predicted


def unit_ball_count(K: NumberField, M: float, *, keep_units: bool = False) -> UnitBallCount:
    n = K.embedding_dimension
    pred = unit_density_constant(K, n) * math.log(M) ** (n - 1) if M > 1 else 0.0
    if keep_units:
        us = enumerate_units_in_ball(K, M)
        return UnitBallCount(K, M, len(us), pred, tuple(us))
    return UnitBallCount(K, M, count_units_in_ball(K, M), pred)


@dataclass(frozen=True)
class UnitCountCurve:
    curve: SumCurve
    predicted: tuple[float, ...]
    density_constant: float  # N_K with the catalog regulator
    fitted_slope: float | None  # d count / d (log M)^(n-1), least squares

    @property
    def residuals(self) -> np.ndarray:
        return self.curve.values - np.array(self.predicted)

    def write_csv(self, out: IO[str]) -> None:
        """Columns M, count, predicted, residual."""
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["M", "count", "predicted", "residual"])
        for s, pr in zip(self.curve.samples, self.predicted):
            w.writerow([repr(s.M), s.point_count, repr(pr), repr(s.value - pr)])


def unit_count_curve(K: NumberField, radii: Sequence[float]) -> UnitCountCurve:
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be increasing")
    if radii and radii[0] < math.e * (1 - 1e-12):
        raise ScopeError("unit count curves need M >= e")
    n = K.embedding_dimension
    nk = unit_density_constant(K, n)
    counts = [count_units_in_ball(K, M) for M in radii]
    x = np.log(radii) ** (n - 1)
    pred = tuple(float(nk * v) for v in x)
    slope = None
    if n > 1 and len(radii) >= 2:
        slope = float(np.polyfit(x, counts, 1)[0])
    curve = SumCurve(
        label=f"units({K.name})",
        exponent_m=0.0,
        samples=tuple(Sample(M, float(c), c) for M, c in zip(radii, counts)),
    )
    return UnitCountCurve(curve, pred, nk, slope)
