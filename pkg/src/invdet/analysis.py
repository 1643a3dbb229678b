"""Growth fits of sum curves and finite-radius bound reports."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np

from .curves import SumCurve
from .detsum import sum_curve
from .errors import GridMismatchError, ScopeError, SpanError
from .lattice import canonical_embedding_lattice
from .numberfield import NumberField, normalized_bound_constants
from .qoalgebra import CyclicAlgebraCode, order_lattice, qo_growth_bounds
from .zeta import truncated_zeta

DEFAULT_SLACK = 0.5
PRE_ASYMPTOTIC_LOG = 4.0
PRE_ASYMPTOTIC_PER_DIM = 2.0
ZETA_LIMIT = 10**5


def pre_asymptotic(M: float, n: int) -> bool:
    """True when log M is too small for the leading (log M) power to dominate.

    Codes with n x n matrices carry n - 1 lower-order powers of log M; radii
    with log M < max(4, 2 n) are flagged.
    """
    return math.log(M) < max(PRE_ASYMPTOTIC_LOG, PRE_ASYMPTOTIC_PER_DIM * n)


@dataclass(frozen=True)
class GrowthFit:
    """value ~ prefactor * (log M)^exponent, least squares in log-log space."""

    exponent: float
    prefactor: float
    residual_rms: float
    radii_used: tuple[float, ...]


def fit_log_power(curve: SumCurve, min_span: float = 2.0) -> GrowthFit:
    """Fit log(value) = log C + p log(log M).

    Needs at least four samples with M > 1 whose log M values span a factor
    of at least ``min_span``.
    """
    used = [s for s in curve.samples if s.M > 1 and s.value > 0]
    if len(used) < 4:
        raise SpanError(f"{curve.label}: need at least 4 usable samples, got {len(used)}")
    logm = np.log([s.M for s in used])
    if logm.max() / logm.min() < min_span * (1 - 1e-12):
        raise SpanError(f"{curve.label}: log M spans a factor {logm.max() / logm.min():.3g} < {min_span}")
    x = np.log(logm)
    y = np.log([s.value for s in used])
    p, c = np.polyfit(x, y, 1)
    res = y - (p * x + c)
    return GrowthFit(float(p), float(math.exp(c)), float(np.sqrt(np.mean(res**2))), tuple(s.M for s in used))


@dataclass(frozen=True)
class GrowthComparison:
    qo_fit: GrowthFit
    nf_fit: GrowthFit
    ratio_trend: tuple[float, ...]  # nf value / qo value per radius
    pre_asymptotic: tuple[bool, ...] = ()

    @property
    def ratio_increasing(self) -> bool:
        r = self.ratio_trend
        return all(b > a for a, b in zip(r, r[1:]))


def compare_growth(qo: SumCurve, nf: SumCurve, min_span: float = 2.0) -> GrowthComparison:
    if len(qo.samples) != len(nf.samples) or np.any(
        np.abs(qo.radii - nf.radii) > 1e-12 * np.maximum(qo.radii, nf.radii)
    ):
        raise GridMismatchError("curves are sampled on different radii")
    if qo.exponent_m != nf.exponent_m:
        raise GridMismatchError(f"curves use different exponents m: {qo.exponent_m} vs {nf.exponent_m}")
    ratio = tuple(float(a / b) for a, b in zip(nf.values, qo.values))
    n = max(qo.meta.get("matrix_size", 2), nf.meta.get("matrix_size", 2))
    flags = tuple(pre_asymptotic(M, n) for M in qo.radii)
    return GrowthComparison(fit_log_power(qo, min_span), fit_log_power(nf, min_span), ratio, flags)


@dataclass(frozen=True)
class BoundRow:
    M: float
    measured: float
    lower: float
    upper: float | None
    verdict: bool
    pre_asymptotic: bool


@dataclass(frozen=True)
class BoundReport:
    label: str
    bound: str  # which bound applies, e.g. "real_m_gt_1" or "order_code"
    m: float
    slack: float
    rows: tuple[BoundRow, ...]
    notes: tuple[str, ...] = ()
    curve: SumCurve | None = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        """All radii outside the pre-asymptotic range pass."""
        return all(r.verdict for r in self.rows if not r.pre_asymptotic)

    def write_csv(self, out: IO[str]) -> None:
        """Long-format rows: label, bound, M, log_M, series, value."""
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["label", "bound", "M", "log_M", "series", "value"])
        for r in self.rows:
            for name, v in (("measured", r.measured), ("lower", r.lower), ("upper", r.upper)):
                if v is not None:
                    w.writerow([self.label, self.bound, repr(r.M), repr(math.log(r.M)), name, repr(v)])


def verdict(measured: float, lower: float, upper: float | None, slack: float) -> bool:
    """Pass when lower (1 - slack) <= measured <= upper / (1 - slack)."""
    if not 0 <= slack < 1:
        raise ValueError("slack must lie in [0, 1)")
    ok = measured >= lower * (1 - slack)
    if upper is not None:
        ok = ok and measured <= upper / (1 - slack)
    return ok


def bound_report(
    subject: NumberField | CyclicAlgebraCode,
    m: float,
    radii: Sequence[float],
    *,
    slack: float = DEFAULT_SLACK,
    method: str = "auto",
    budget: float | None = None,
    threads: int = 1,
) -> BoundReport:
    """Measured sums against the applicable main terms at each radius.

    Number fields use the normalized sum and the diagonal-code bounds; for
    totally complex fields ``m`` must equal 2 n_r.  Algebras use the raw sum
    of the order lattice with the center's unit density as lower term and an
    empirical envelope sup S / (log M)^(k-1) as upper term.
    """
    radii = [float(r) for r in radii]
    if any(r <= 1 for r in radii):
        raise ScopeError("radii must exceed 1")
    notes = []
    if isinstance(subject, CyclicAlgebraCode):
        if m != int(m) or int(m) % 2 or m < 4:
            raise ScopeError("order-code bounds need m = 2 n_r with n_r >= 2")
        L = order_lattice(subject)
        curve = sum_curve(L, radii, m, method=method, budget=budget, threads=threads)
        bounds = [qo_growth_bounds(subject, M, int(m) // 2, curve) for M in radii]
        lower = [b.lower for b in bounds]
        upper = [b.empirical_prefactor * math.log(M) ** b.exponent for b, M in zip(bounds, radii)]
        label, tag = subject.name, "order_code"
        notes.append(f"upper prefactor {bounds[0].upper_prefactor} is not computed; upper column is the empirical envelope")
    else:
        K = subject
        consts = normalized_bound_constants(K, m)
        n = consts.n
        L = canonical_embedding_lattice(K)
        curve = sum_curve(L, radii, m, normalized=True, method=method, budget=budget, threads=threads)
        lower = [consts.tilde_N * math.log(M) ** (n - 1) for M in radii]
        if consts.c_K is not None:
            upper = [consts.c_K * math.log(M) ** n for M in radii]
        else:
            z = truncated_zeta(K, consts.zeta_argument, ZETA_LIMIT)
            zeta_upper = z.value + z.tail_bound
            upper = [consts.tilde_N * zeta_upper * math.log(M) ** (n - 1) for M in radii]
            notes.append(f"zeta_K({consts.zeta_argument:g}) <= {zeta_upper:.10g} (sum to {ZETA_LIMIT} plus tail bound)")
        label, tag = K.name, consts.case
        if K.totally_real:
            notes.append("roots of unity counted with omega = 2 for totally real fields")
        elif n > 1:
            notes.append(
                "with the standard regulator the measured unit density of a totally complex field "
                f"is 2^(n-1) = {2 ** (n - 1)} times N_K"
            )
    meta = curve.meta
    if meta.get("method") == "orbit":
        notes.append(f"orbit evaluation with |det| cap {meta['det_cap']:.6g}, exact={meta['exact']}")
    rows = tuple(
        BoundRow(
            M,
            float(v),
            lo,
            up,
            verdict(float(v), lo, up, slack),
            pre_asymptotic(M, L.matrix_size),
        )
        for M, v, lo, up in zip(radii, curve.values, lower, upper)
    )
    return BoundReport(label, tag, float(m), slack, rows, tuple(notes), curve)
