"""Ideal counts by norm and truncated Dedekind zeta sums.

The count z(n) of integral ideals of norm n is multiplicative; at a prime
power p^a it is the coefficient of x^a in prod_j 1 / (1 - x^f_j), where the
f_j are the residue degrees of the primes above p.  A single sieve over the
primes up to the limit fills the table.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from math import comb
from typing import IO, Sequence

import numpy as np
from scipy.special import zeta as riemann_zeta

from .errors import BudgetExceededError, ScopeError
from .numberfield import NumberField, zeta_residue

MAX_LIMIT = 10**7


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve)


def local_counts(degrees: Sequence[int], amax: int) -> list[int]:
    """Coefficients of x^0..x^amax in prod_j 1/(1 - x^f_j)."""
    c = [1] + [0] * amax
    for f in degrees:
        for a in range(f, amax + 1):
            c[a] += c[a - f]
    return c


def _sieve(limit: int, local) -> np.ndarray:
    """Dense multiplicative table t[0..limit] from local factors local(p, amax)."""
    t = np.ones(limit + 1, dtype=np.int64)
    t[0] = 0
    for p in primes_up_to(limit).tolist():
        amax = 1
        while p ** (amax + 1) <= limit:
            amax += 1
        c = local(p, amax)
        if amax == 1:
            if c[1] != 1:
                t[p::p] *= c[1]
            continue
        f = np.empty(limit // p, dtype=np.int64)
        pa = p
        for a in range(1, amax + 1):
            f[pa // p - 1 :: pa // p] = c[a]
            pa *= p
        t[p::p] *= f
    return t


@dataclass(frozen=True, eq=False)
class IdealCountTable:
    field: NumberField
    limit: int
    z: np.ndarray  # z[n] for 0 <= n <= limit; z[0] = 0 by convention

    def __getitem__(self, n: int) -> int:
        return int(self.z[n])

    @property
    def counts(self) -> np.ndarray:
        """z(1), ..., z(limit)."""
        return self.z[1:]

    def cumulative(self) -> np.ndarray:
        """N(K, n) for n = 0..limit."""
        return np.cumsum(self.z)

    def partial_zeta(self, s: float = 1.0) -> np.ndarray:
        """zeta_K(s, n) for n = 0..limit, accumulated in extended precision."""
        n = np.arange(1, self.limit + 1, dtype=np.longdouble)
        terms = self.z[1:].astype(np.longdouble) / n**s
        return np.concatenate([[0.0], np.cumsum(terms).astype(float)])


def ideal_counts(K: NumberField, M: int) -> IdealCountTable:
    """Exact z(n) for 1 <= n <= M."""
    M = int(M)
    if M < 1:
        raise ValueError("limit must be positive")
    if M > MAX_LIMIT:
        raise BudgetExceededError(f"ideal count limit {M} exceeds {MAX_LIMIT}")
    z = _sieve(M, lambda p, amax: local_counts(K.residue_degrees(p), amax))
    z.setflags(write=False)
    return IdealCountTable(K, M, z)


def divisor_counts(k: int, M: int) -> np.ndarray:
    """d_k(n) for n = 0..M: the number of ordered factorizations into k parts."""
    return _sieve(M, lambda p, amax: [comb(a + k - 1, k - 1) for a in range(amax + 1)])


@dataclass(frozen=True)
class CumulativeCount:
    count: int
    main_term: float
    abs_error: float
    relative_error: float


def ideal_count_cumulative(K: NumberField, M: int, table: IdealCountTable | None = None) -> CumulativeCount:
    """N(K, M) against the main term alpha_K h_K M."""
    table = table if table is not None and table.limit >= M else ideal_counts(K, M)
    n = int(table.z[: M + 1].sum())
    main = zeta_residue(K) * M
    err = abs(n - main)
    return CumulativeCount(n, main, err, err / M)


@dataclass(frozen=True)
class TruncatedZeta:
    value: float
    s: float
    limit: int
    tail_bound: float | None  # upper bound on zeta_K(s) - value, for s > 1


def truncated_zeta(K: NumberField, s: float, M: int, table: IdealCountTable | None = None) -> TruncatedZeta:
    """Sum of z(n) / n^s over n <= M, with a tail bound when s > 1.

    The tail bound uses z(n) <= d_deg(n): the remainder is at most
    zeta(s)^deg - sum_{n <= M} d_deg(n) / n^s.
    """
    if s < 1:
        raise ScopeError(f"truncated zeta needs s >= 1, got {s}")
    table = table if table is not None and table.limit >= M else ideal_counts(K, M)
    n = np.arange(1, M + 1, dtype=float)
    value = math.fsum(table.z[1 : M + 1] / n**s)
    tail = None
    if s > 1:
        d = divisor_counts(K.degree, M)
        head = math.fsum(d[1:] / n**s)
        tail = max(float(riemann_zeta(s, 1)) ** K.degree - head, 0.0)
    return TruncatedZeta(value, s, M, tail)


@dataclass(frozen=True)
class PartialSummationSplit:
    """zeta_K(1, M) = S_term + T_term with T_term = h alpha H_M."""

    S_term: float
    T_term: float


def partial_summation_split(K: NumberField, M: int, table: IdealCountTable | None = None) -> PartialSummationSplit:
    table = table if table is not None and table.limit >= M else ideal_counts(K, M)
    ha = zeta_residue(K)
    n = np.arange(1, M + 1, dtype=float)
    s_term = math.fsum((table.z[1 : M + 1] - ha) / n)
    t_term = ha * math.fsum(1.0 / n)
    return PartialSummationSplit(s_term, t_term)


def s_term_curve(table: IdealCountTable) -> np.ndarray:
    """S_term at every n = 0..limit (index 0 holds 0)."""
    ha = zeta_residue(table.field)
    n = np.arange(1, table.limit + 1, dtype=np.longdouble)
    terms = (table.z[1:].astype(np.longdouble) - ha) / n
    return np.concatenate([[0.0], np.cumsum(terms).astype(float)])


@dataclass(frozen=True)
class ErrorExponentFit:
    """|N(K, M) - alpha h M| ~ c M^(1 - a) fitted by least squares in log-log."""

    c: float
    a: float
    radii: tuple[int, ...]


def fit_count_error(K: NumberField, radii: Sequence[int], table: IdealCountTable | None = None) -> ErrorExponentFit:
    radii = sorted(int(r) for r in radii)
    table = table if table is not None and table.limit >= radii[-1] else ideal_counts(K, radii[-1])
    cum = table.cumulative()
    main = zeta_residue(K)
    err = np.array([abs(cum[m] - main * m) for m in radii])
    x = np.log(np.array(radii, dtype=float))
    slope, intercept = np.polyfit(x, np.log(err), 1)
    return ErrorExponentFit(float(math.exp(intercept)), float(1 - slope), tuple(radii))


def write_table_csv(table: IdealCountTable, out: IO[str]) -> None:
    """Columns n, z, N (cumulative count), zeta1 (truncated zeta at s = 1)."""
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["n", "z", "N", "zeta1"])
    cum = table.cumulative()
    zeta1 = table.partial_zeta(1.0)
    for n in range(1, table.limit + 1):
        w.writerow([n, int(table.z[n]), int(cum[n]), repr(float(zeta1[n]))])
