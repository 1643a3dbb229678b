"""Matrix lattices in M_n(C) and exact enumeration of Frobenius balls."""

from __future__ import annotations

import csv
import functools
import math
import os
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass, field
from typing import IO

import numpy as np

from . import enumeration
from .errors import (
    BudgetExceededError,
    DegenerateOrderError,
    NoPointsError,
    NVDViolationError,
)
from .numberfield import NumberField, int_det

DEFAULT_BUDGET = 1e8
BUDGET_ENV = "INVDET_BUDGET"
SUSPECT_ZERO = 1e-12
# Numeric determinant products below this are rounded to the exact integer;
# larger ones are recomputed in exact integer arithmetic.
_EXACT_ROUND_LIMIT = 2.0**36


def default_budget() -> float:
    raw = os.environ.get(BUDGET_ENV)
    return float(raw) if raw else DEFAULT_BUDGET


@dataclass(frozen=True)
class ElementTag:
    """Exact algebraic data attached to a lattice.

    For every integer coordinate vector x, ``|det X| = D(x) ** exponent``
    where ``D(x)`` is an integer: ``approx_det`` evaluates it in floating
    point for whole coordinate arrays, ``exact_det`` in exact arithmetic for
    one vector.  ``preimage`` returns the exact algebraic element and
    ``to_matrix`` rebuilds its numeric matrix.
    """

    exponent: float
    approx_det: Callable[[np.ndarray], np.ndarray]
    exact_det: Callable[[list[int]], int]
    preimage: Callable[[list[int]], object]
    to_matrix: Callable[[object], np.ndarray]


@dataclass(frozen=True)
class CentralUnitAction:
    """A free abelian group of central units acting on a block-diagonal lattice.

    The lattice matrices are block diagonal with ``p`` blocks of size
    ``block_size``.  ``block_grams[i]`` gives the energy (squared Frobenius
    norm) of block i as a quadratic form in the coordinates.  Generator j
    multiplies block i's energy by ``exp(log_units[j, i])`` and acts on
    coordinate rows by ``x -> x @ matrices[j]``.  ``energy_ratio`` is an upper
    bound C on energy / |det block|^(2/block_size) for every block.
    """

    block_grams: np.ndarray  # (p, k, k)
    log_units: np.ndarray  # (r, p)
    matrices: np.ndarray  # (r, k, k) int64
    inverse_matrices: np.ndarray  # (r, k, k) int64
    block_size: int
    energy_ratio: float

    @property
    def rank(self) -> int:
        return self.log_units.shape[0]

    @property
    def blocks(self) -> int:
        return self.block_grams.shape[0]

    def energies(self, coords: np.ndarray) -> np.ndarray:
        x = np.asarray(coords, dtype=float)
        return np.einsum("na,iab,nb->ni", x, self.block_grams, x)


@dataclass(frozen=True, eq=False)
class MatrixLattice:
    basis: np.ndarray  # (k, n, n) complex
    label: str = ""
    tag: ElementTag | None = field(default=None, repr=False)
    units: CentralUnitAction | None = field(default=None, repr=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 3 or b.shape[1] != b.shape[2]:
            raise ValueError("basis must have shape (k, n, n)")
        object.__setattr__(self, "basis", b)
        flat = b.reshape(b.shape[0], -1)
        gram = (flat.conj() @ flat.T).real
        gram = (gram + gram.T) / 2
        ev = np.linalg.eigvalsh(gram)
        if ev[0] <= 1e-12 * ev[-1]:
            raise DegenerateOrderError(f"{self.label}: basis matrices are linearly dependent")
        object.__setattr__(self, "gram", gram)
        if self.tag is not None:
            for i in range(self.rank):
                e = [0] * self.rank
                e[i] = 1
                m = self.tag.to_matrix(self.tag.preimage(e))
                if np.linalg.norm(m - b[i]) > 1e-9:
                    raise ValueError(f"{self.label}: element tag disagrees with basis vector {i}")

    @property
    def rank(self) -> int:
        return self.basis.shape[0]

    @property
    def matrix_size(self) -> int:
        return self.basis.shape[1]

    @functools.cached_property
    def reduction(self) -> np.ndarray:
        """Unimodular U such that U @ gram @ U.T is LLL-reduced."""
        return enumeration.lll_reduce(self.gram)

    @property
    def volume(self) -> float:
        return math.sqrt(np.linalg.det(self.gram))

    def matrices(self, coords: np.ndarray) -> np.ndarray:
        return np.tensordot(np.asarray(coords, dtype=float), self.basis, axes=1)

    def norms_sq(self, coords: np.ndarray) -> np.ndarray:
        x = np.asarray(coords, dtype=float)
        return np.einsum("na,ab,nb->n", x, self.gram, x)

    def abs_dets(self, coords: np.ndarray) -> tuple[np.ndarray, float]:
        """Determinant data for rows of coordinates.

        Tagged lattices return exact integers D (int64, or object dtype when
        huge) with |det| = D ** exponent.  Untagged lattices return numeric
        |det| with exponent 1.  Any vanishing determinant raises
        NVDViolationError naming the point.
        """
        coords = np.asarray(coords, dtype=np.int64)
        if self.tag is None:
            d = np.abs(np.linalg.det(self.matrices(coords)))
            bad = np.flatnonzero(d < SUSPECT_ZERO)
            if bad.size:
                raise NVDViolationError(
                    f"{self.label}: suspect zero determinant {d[bad[0]]:.3e} at {coords[bad[0]].tolist()}"
                )
            return d, 1.0
        approx = np.abs(self.tag.approx_det(coords))
        d = np.rint(approx)
        safe = (approx < _EXACT_ROUND_LIMIT) & (np.abs(approx - d) < 1e-3)
        if safe.all():
            out = d.astype(np.int64)
        else:
            exact = [abs(self.tag.exact_det(c.tolist())) for c in coords[~safe]]
            if max(exact) < 2**62:
                out = d.astype(np.int64)
                out[~safe] = exact
            else:
                out = d.astype(np.int64).astype(object)
                out[~safe] = exact
        bad = np.flatnonzero(out == 0)
        if bad.size:
            raise NVDViolationError(f"{self.label}: zero determinant at nonzero point {coords[bad[0]].tolist()}")
        return out, self.tag.exponent


@dataclass(frozen=True)
class LatticePoint:
    coords: tuple[int, ...]
    matrix: np.ndarray = field(repr=False)
    frobenius_norm: float
    abs_det: float
    exact_det: int | None = None  # |det| = exact_det ** det_exponent when tagged
    det_exponent: float = 1.0


# ---------------------------------------------------------------------------
# constructors


def _field_tag(K: NumberField) -> ElementTag:
    full = K.full_embedding_matrix
    real = K.totally_real

    def approx(coords):
        vals = np.asarray(coords, dtype=float) @ full
        return np.prod(vals, axis=1).real

    def exact(c):
        return int_det(K.mult_matrix_int(c).tolist())

    def to_matrix(x):
        v = x.embed()
        return np.diag(v.real if real else v).astype(complex)

    return ElementTag(
        exponent=1.0 if real else 0.5,
        approx_det=approx,
        exact_det=exact,
        preimage=lambda c: K.element(c),
        to_matrix=to_matrix,
    )


def _field_unit_action(K: NumberField) -> CentralUnitAction:
    emb = K.embedding_matrix  # (d, p)
    p = emb.shape[1]
    grams = np.stack([np.outer(emb[:, i], emb[:, i].conj()).real for i in range(p)])
    grams = (grams + grams.transpose(0, 2, 1)) / 2
    units = K.units
    if units:
        vals = np.array([u.embed() for u in units])
        logs = 2.0 * np.log(np.abs(vals))
        mats = np.array([K.mult_matrix_int(u.int_coords()) for u in units], dtype=np.int64)
        invs = np.array([K.mult_matrix_int(u.inverse().int_coords()) for u in units], dtype=np.int64)
    else:
        d = K.degree
        logs = np.zeros((0, p))
        mats = invs = np.zeros((0, d, d), dtype=np.int64)
    return CentralUnitAction(grams, logs, mats, invs, block_size=1, energy_ratio=1.0)


def canonical_embedding_lattice(K: NumberField) -> MatrixLattice:
    """psi(O_K): diagonal matrices of embedding values of the integral basis."""
    n = K.embedding_dimension  # raises on mixed signature
    emb = K.embedding_matrix
    if K.totally_real:
        emb = emb.real
    basis = np.zeros((K.degree, n, n), dtype=complex)
    idx = np.arange(n)
    basis[:, idx, idx] = emb
    return MatrixLattice(basis, label=f"psi(O_{K.name})", tag=_field_tag(K), units=_field_unit_action(K))


def scaled(L: MatrixLattice, t: float) -> MatrixLattice:
    """The lattice tL.  Exact tags do not survive scaling and are dropped."""
    return MatrixLattice(L.basis * t, label=f"{t:g}*{L.label}")


# ---------------------------------------------------------------------------
# enumeration


def check_budget(L: MatrixLattice, M: float, budget: float | None = None) -> float:
    budget = default_budget() if budget is None else budget
    pred = enumeration.predicted_count(L.gram, M)
    if pred > budget:
        raise BudgetExceededError(
            f"{L.label}: about {pred:.3g} points predicted in the ball of radius {M:g}, budget {budget:.3g}"
        )
    return pred


def ball_chunks(
    L: MatrixLattice,
    M: float,
    *,
    budget: float | None = None,
    reduce: bool = True,
    partition: tuple[int, int] | None = None,
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield ``(coords, norm_sq)`` chunks covering the nonzero points of the ball.

    With ``reduce`` the enumeration runs on an LLL-reduced basis (faster for
    skewed Gram matrices) and coordinates are mapped back; without it points
    arrive in lexicographic order of their coordinates.
    """
    check_budget(L, M, budget)
    r2 = float(M) ** 2
    if reduce:
        u = L.reduction
        g = u @ L.gram @ u.T
        for y, s in enumeration.short_vectors(g, r2, partition=partition):
            yield y @ u, s
    else:
        yield from enumeration.short_vectors(L.gram, r2, partition=partition)


def enumerate_ball(L: MatrixLattice, M: float, *, budget: float | None = None) -> Iterator[LatticePoint]:
    """Every nonzero point with Frobenius norm <= M, in lexicographic order."""
    for coords, _ in ball_chunks(L, M, budget=budget, reduce=False):
        dets, e = L.abs_dets(coords)
        mats = L.matrices(coords)
        norms = np.linalg.norm(mats.reshape(len(coords), -1), axis=1)
        tagged = L.tag is not None
        for c, mat, nrm, d in zip(coords, mats, norms, dets):
            yield LatticePoint(
                coords=tuple(int(v) for v in c),
                matrix=mat,
                frobenius_norm=float(nrm),
                abs_det=float(d) ** e,
                exact_det=int(d) if tagged else None,
                det_exponent=e,
            )


def count_in_ball(L: MatrixLattice, M: float, *, budget: float | None = None) -> int:
    return sum(c.shape[0] for c, _ in ball_chunks(L, M, budget=budget))


@dataclass(frozen=True)
class MinDet:
    value: float
    point: LatticePoint


def min_determinant_in_ball(L: MatrixLattice, M: float, *, budget: float | None = None) -> MinDet:
    """Smallest |det| over the nonzero points of the ball, with a minimizer.

    Ties are broken by the lexicographically smallest coordinates.
    """
    best = None
    for coords, _ in ball_chunks(L, M, budget=budget, reduce=False):
        dets, e = L.abs_dets(coords)
        vals = np.asarray(dets, dtype=float)
        i = int(np.argmin(vals))
        if best is None or vals[i] < best[0]:
            best = (vals[i], coords[i], dets[i], e)
    if best is None:
        raise NoPointsError(f"{L.label}: no nonzero points with norm <= {M:g}")
    _, c, d, e = best
    mat = L.matrices(c[None])[0]
    pt = LatticePoint(
        coords=tuple(int(v) for v in c),
        matrix=mat,
        frobenius_norm=float(np.linalg.norm(mat)),
        abs_det=float(d) ** e,
        exact_det=int(d) if L.tag is not None else None,
        det_exponent=e,
    )
    return MinDet(pt.abs_det, pt)


@dataclass(frozen=True)
class NormalizationFactor:
    scale: float  # Vol^(m n / k)
    radius_factor: float  # Vol^(1 / k)


def normalization_factor(L: MatrixLattice, m: float) -> NormalizationFactor:
    k, n, vol = L.rank, L.matrix_size, L.volume
    return NormalizationFactor(vol ** (m * n / k), vol ** (1.0 / k))


def write_points_csv(points: Iterable[LatticePoint], out: IO[str]) -> int:
    """Write coords, frobenius_norm, abs_det rows; returns the row count."""
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["coords", "frobenius_norm", "abs_det"])
    n = 0
    for p in points:
        w.writerow([" ".join(map(str, p.coords)), repr(p.frobenius_norm), repr(p.abs_det)])
        n += 1
    return n
