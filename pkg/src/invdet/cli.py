"""Command-line interface.

Exit codes: 0 success, 1 scope/precondition error, 2 budget exceeded,
64 usage error.  CSV output uses shortest round-trip floats; table output
uses four decimals.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import math
import os
import random
import sys
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import BudgetExceededError, InvdetError

EXIT_OK, EXIT_SCOPE, EXIT_BUDGET, EXIT_USAGE = 0, 1, 2, 64
FORMATS = ("table", "csv", "json")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    command: str
    field: str | None = None
    algebra: str | None = None
    radii: list[float] = dataclasses.field(default_factory=list)
    m: float | None = None
    n_r: int | None = None
    s: float = 1.0
    limit: int | None = None
    format: str = "table"
    output: str | None = None
    budget: float | None = None
    threads: int = 1
    slack: float = 0.5
    method: str = "auto"
    det_cap: float | None = None
    normalized: bool = False
    legacy: bool = False
    union_bound: bool = False
    qo: str | None = None
    nf: str | None = None
    samples: int = 200
    seed: int = 0

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> RunConfig:
        data = json.loads(text)
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def exponent(self) -> float:
        if self.m is not None and self.n_r is not None and self.m != 2 * self.n_r:
            raise UsageError("--m and --n-r disagree (need m = 2 n_r)")
        if self.m is not None:
            return float(self.m)
        if self.n_r is not None:
            return 2.0 * self.n_r
        raise UsageError(f"{self.command} needs --m or --n-r")

    def validate(self) -> None:
        if self.format not in FORMATS:
            raise UsageError(f"unknown format {self.format!r}")
        if self.field and self.algebra:
            raise UsageError("give either --field or --algebra, not both")
        if self.threads < 1:
            raise UsageError("--threads must be positive")
        if not 0 <= self.slack < 1:
            raise UsageError("--slack must lie in [0, 1)")
        if self.method not in ("auto", "direct", "orbit"):
            raise UsageError(f"unknown method {self.method!r}")
        if any(not r > 0 for r in self.radii):
            raise UsageError("radii must be positive")
        if sorted(set(self.radii)) != list(self.radii):
            raise UsageError("radii must be strictly increasing")
        need_field = {"field info", "zeta", "ideals", "units"}
        need_subject = {"lattice vol", "detsum", "report"}
        need_algebra = {"qo check", "qo detsum"}
        need_radii = {"units", "detsum", "qo detsum", "compare", "report"}
        c = self.command
        if c in need_field and not self.field:
            raise UsageError(f"{c} needs --field")
        if c in need_subject and not (self.field or self.algebra):
            raise UsageError(f"{c} needs --field or --algebra")
        if c in need_algebra and not self.algebra:
            raise UsageError(f"{c} needs --algebra")
        if c in need_radii and not self.radii:
            raise UsageError(f"{c} needs --radius, --radii or --log-grid")
        if c in ("zeta", "ideals") and not self.limit:
            raise UsageError(f"{c} needs --limit")
        if c in ("detsum", "qo detsum", "compare", "report"):
            self.exponent()
        if c == "compare" and not (self.qo and self.nf):
            raise UsageError("compare needs --qo and --nf")


def _parse_radii(ns) -> list[float]:
    radii: list[float] = []
    if getattr(ns, "radius", None) is not None:
        radii.append(float(ns.radius))
    if getattr(ns, "radii", None):
        try:
            radii.extend(float(x) for x in ns.radii.split(","))
        except ValueError as exc:
            raise UsageError(f"bad --radii: {ns.radii}") from exc
    if getattr(ns, "log_grid", None):
        try:
            t0, t1, step = (float(x) for x in ns.log_grid.split(":"))
        except ValueError as exc:
            raise UsageError("--log-grid needs start:stop:step") from exc
        if step <= 0 or t1 < t0:
            raise UsageError("--log-grid needs start <= stop and step > 0")
        count = int(math.floor((t1 - t0) / step + 1e-9)) + 1
        radii.extend(math.exp(t0 + i * step) for i in range(count))
    return radii


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="invdet", description="Inverse determinant sums of space-time lattice codes.")
    p.add_argument("--config", help="load a saved RunConfig JSON (other flags are ignored)")
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)

    def common(sp, radii=False, m=False):
        sp.add_argument("--format", choices=FORMATS, default="table")
        sp.add_argument("--output", help="write output to this path instead of stdout")
        sp.add_argument("--save-config", help="also write the parsed RunConfig JSON here")
        sp.add_argument("--budget", type=float, help="max predicted lattice points (default 1e8 or $INVDET_BUDGET)")
        sp.add_argument("--threads", type=int, default=1)
        if radii:
            sp.add_argument("--radius", type=float)
            sp.add_argument("--radii", help="comma-separated radii")
            sp.add_argument("--log-grid", help="start:stop:step, radii M = e^t")
        if m:
            sp.add_argument("--m", type=float, help="exponent m")
            sp.add_argument("--n-r", type=int, dest="n_r", help="receive antennas; m = 2 n_r")
            sp.add_argument("--method", choices=("auto", "direct", "orbit"), default="auto")
            sp.add_argument("--det-cap", type=float, help="orbit method |det| cap")

    fld = sub.add_parser("field", help="number field data").add_subparsers(dest="sub", parser_class=_Parser)
    sp = fld.add_parser("info", help="catalog invariants and derived constants (columns: key, value)")
    sp.add_argument("--field", required=True)
    common(sp)

    lat = sub.add_parser("lattice", help="lattice data").add_subparsers(dest="sub", parser_class=_Parser)
    sp = lat.add_parser("vol", help="rank, matrix size and volume (columns: key, value)")
    sp.add_argument("--field")
    sp.add_argument("--algebra")
    common(sp)

    sp = sub.add_parser("zeta", help="truncated Dedekind zeta; CSV columns n, z, N, zeta1")
    sp.add_argument("--field", required=True)
    sp.add_argument("--s", type=float, default=1.0)
    sp.add_argument("--limit", type=int, required=True)
    common(sp)

    sp = sub.add_parser("ideals", help="ideal counts; columns M, N, main_term, abs_error, relative_error")
    sp.add_argument("--field", required=True)
    sp.add_argument("--limit", type=int, required=True)
    sp.add_argument("--radii", help="comma-separated M values (default: the limit)")
    common(sp)

    sp = sub.add_parser("units", help="units in balls; columns M, count, predicted, residual")
    sp.add_argument("--field", required=True)
    common(sp, radii=True)

    sp = sub.add_parser("detsum", help="inverse determinant sums; columns M, m, value, point_count, min_abs_det")
    sp.add_argument("--field")
    sp.add_argument("--algebra")
    sp.add_argument("--normalized", action="store_true")
    sp.add_argument("--legacy", action="store_true", help="normalized form without the radius factor")
    sp.add_argument("--union-bound", action="store_true", help="evaluate S^(2 n_r)(2M)")
    common(sp, radii=True, m=True)

    qo = sub.add_parser("qo", help="quaternion order codes").add_subparsers(dest="sub", parser_class=_Parser)
    sp = qo.add_parser("check", help="algebra identities; columns check, value, passed")
    sp.add_argument("--algebra", required=True)
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    common(sp)
    sp = qo.add_parser("detsum", help="order-code sums; columns M, m, value, point_count, min_abs_det, lower")
    sp.add_argument("--algebra", required=True)
    common(sp, radii=True, m=True)

    sp = sub.add_parser("compare", help="growth comparison; columns M, qo_value, nf_value, ratio")
    sp.add_argument("--qo", required=True, help="algebra name")
    sp.add_argument("--nf", required=True, help="field name")
    sp.add_argument("--min-span", type=float, default=2.0)
    common(sp, radii=True, m=True)

    sp = sub.add_parser(
        "report", help="bound report; CSV long format: label, bound, M, log_M, series, value"
    )
    sp.add_argument("--field")
    sp.add_argument("--algebra")
    sp.add_argument("--slack", type=float, default=0.5)
    common(sp, radii=True, m=True)
    return p


def config_from_args(argv: Sequence[str]) -> tuple[RunConfig, argparse.Namespace]:
    parser = build_parser()
    ns = parser.parse_args(list(argv))
    if ns.config:
        with open(ns.config, encoding="utf-8") as fh:
            return RunConfig.from_json(fh.read()), ns
    if not ns.cmd:
        raise UsageError(parser.format_usage().strip())
    cmd = ns.cmd if not getattr(ns, "sub", None) else f"{ns.cmd} {ns.sub}"
    if ns.cmd in ("field", "lattice", "qo") and not getattr(ns, "sub", None):
        raise UsageError(f"{ns.cmd} needs a subcommand")
    radii = _parse_radii(ns)
    if ns.cmd == "ideals" and not radii and ns.limit:
        radii = [float(ns.limit)]
    cfg = RunConfig(
        command=cmd,
        field=getattr(ns, "field", None),
        algebra=getattr(ns, "algebra", None),
        radii=radii,
        m=getattr(ns, "m", None),
        n_r=getattr(ns, "n_r", None),
        s=getattr(ns, "s", 1.0),
        limit=getattr(ns, "limit", None),
        format=ns.format,
        output=ns.output,
        budget=ns.budget,
        threads=ns.threads,
        slack=getattr(ns, "slack", 0.5),
        method=getattr(ns, "method", "auto"),
        det_cap=getattr(ns, "det_cap", None),
        normalized=getattr(ns, "normalized", False),
        legacy=getattr(ns, "legacy", False),
        union_bound=getattr(ns, "union_bound", False),
        qo=getattr(ns, "qo", None),
        nf=getattr(ns, "nf", None),
        samples=getattr(ns, "samples", 200),
        seed=getattr(ns, "seed", 0),
    )
    cfg.validate()
    if getattr(ns, "save_config", None):
        with open(ns.save_config, "w", encoding="utf-8") as fh:
            fh.write(cfg.to_json() + "\n")
    return cfg, ns


# ---------------------------------------------------------------------------
# rendering


@dataclass
class Output:
    columns: list[str]
    rows: list[list[Any]]
    preamble: list[str] = field(default_factory=list)  # table-format lines before the table
    meta: dict = field(default_factory=dict)


def _cell_csv(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float | np.floating):
        return repr(float(v))
    return str(v)


def _cell_table(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float | np.floating):
        return f"{float(v):.4f}"
    return str(v)


def render(out: Output, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        import csv

        w = csv.writer(buf, lineterminator="\n")
        w.writerow(out.columns)
        for r in out.rows:
            w.writerow([_cell_csv(v) for v in r])
        return buf.getvalue()
    if fmt == "json":
        def conv(v):
            if isinstance(v, np.floating):
                return float(v)
            if isinstance(v, np.integer):
                return int(v)
            return v

        rows = [{c: conv(v) for c, v in zip(out.columns, r)} for r in out.rows]
        return json.dumps({"rows": rows, "meta": out.meta}, indent=2, default=str) + "\n"
    cells = [[_cell_table(v) for v in r] for r in out.rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(out.columns)]
    lines = list(out.preamble)
    lines.append("  ".join(c.rjust(w) for c, w in zip(out.columns, widths)))
    lines.extend("  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in cells)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands


def _subject(cfg: RunConfig):
    from .numberfield import catalog_lookup
    from .qoalgebra import algebra_lookup

    if cfg.algebra:
        return algebra_lookup(cfg.algebra)
    return catalog_lookup(cfg.field)


def cmd_field_info(cfg: RunConfig) -> Output:
    from .numberfield import catalog_lookup, residue_constant, unit_density_constant

    K = catalog_lookup(cfg.field)
    rows = [
        ["name", K.name],
        ["degree", K.degree],
        ["signature", f"{K.signature[0]},{K.signature[1]}"],
        ["discriminant", K.discriminant],
        ["class_number", K.class_number],
        ["regulator", K.regulator],
        ["roots_of_unity", K.roots_of_unity],
        ["fundamental_units", ";".join(" ".join(str(c) for c in u) for u in K.fundamental_units)],
        ["residue_constant", residue_constant(K)],
        ["residue_times_class_number", residue_constant(K) * K.class_number],
    ]
    try:
        rows.append(["unit_density_constant", unit_density_constant(K, K.embedding_dimension)])
    except InvdetError:
        pass
    notes = []
    if K.totally_real:
        notes.append("omega = 2 is used for totally real fields; unit counts include the sign")
    return Output(["key", "value"], rows, meta={"notes": notes}, preamble=[f"note: {n}" for n in notes])


def cmd_lattice_vol(cfg: RunConfig) -> Output:
    from .lattice import canonical_embedding_lattice
    from .qoalgebra import CyclicAlgebraCode, order_lattice

    s = _subject(cfg)
    L = order_lattice(s) if isinstance(s, CyclicAlgebraCode) else canonical_embedding_lattice(s)
    rows = [
        ["label", L.label],
        ["rank", L.rank],
        ["matrix_size", L.matrix_size],
        ["volume", L.volume],
        ["gram_determinant", float(np.linalg.det(L.gram))],
    ]
    return Output(["key", "value"], rows)


def cmd_zeta(cfg: RunConfig) -> Output:
    from .numberfield import catalog_lookup
    from .zeta import ideal_counts, truncated_zeta

    K = catalog_lookup(cfg.field)
    table = ideal_counts(K, cfg.limit)
    z = truncated_zeta(K, cfg.s, cfg.limit, table)
    cum = table.cumulative()
    zeta1 = table.partial_zeta(1.0)
    rows = [[n, int(table.z[n]), int(cum[n]), float(zeta1[n])] for n in range(1, cfg.limit + 1)]
    pre = [f"{z.value:.4f}"]
    if z.tail_bound is not None:
        pre.append(f"tail bound {z.tail_bound:.4e}")
    buf = io.StringIO()
    import csv

    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "z", "N", "zeta1"])
    for r in rows:
        w.writerow([_cell_csv(v) for v in r])
    out = Output(["n", "z", "N", "zeta1"], rows, meta={"value": z.value, "s": cfg.s, "tail_bound": z.tail_bound})
    out.preamble = pre
    out.meta["csv"] = buf.getvalue()
    return out


def cmd_ideals(cfg: RunConfig) -> Output:
    from .numberfield import catalog_lookup
    from .zeta import ideal_count_cumulative, ideal_counts

    K = catalog_lookup(cfg.field)
    table = ideal_counts(K, cfg.limit)
    rows = []
    for M in cfg.radii:
        if int(M) > cfg.limit:
            raise InvdetError(f"M = {M:g} exceeds --limit {cfg.limit}")
        c = ideal_count_cumulative(K, int(M), table)
        rows.append([int(M), c.count, c.main_term, c.abs_error, c.relative_error])
    return Output(["M", "N", "main_term", "abs_error", "relative_error"], rows)


def cmd_units(cfg: RunConfig) -> Output:
    from .numberfield import catalog_lookup
    from .units import unit_ball_count

    K = catalog_lookup(cfg.field)
    rows = []
    for M in cfg.radii:
        u = unit_ball_count(K, M)
        rows.append([M, u.count, u.predicted, u.residual])
    return Output(["M", "count", "predicted", "residual"], rows)


def _sum_rows(curve, m):
    return [[s.M, m, s.value, s.point_count, s.min_abs_det] for s in curve.samples]


def cmd_detsum(cfg: RunConfig) -> Output:
    from .detsum import sum_curve
    from .lattice import canonical_embedding_lattice
    from .qoalgebra import CyclicAlgebraCode, order_lattice

    s = _subject(cfg)
    L = order_lattice(s) if isinstance(s, CyclicAlgebraCode) else canonical_embedding_lattice(s)
    m = cfg.exponent()
    radii = cfg.radii
    if cfg.union_bound:
        if cfg.n_r is None and m / 2 != int(m / 2):
            raise UsageError("--union-bound needs an integer n_r")
        radii = [2 * r for r in radii]
    curve = sum_curve(
        L, radii, m, normalized=cfg.normalized, legacy=cfg.legacy, method=cfg.method,
        det_cap=cfg.det_cap, budget=cfg.budget, threads=cfg.threads,
    )
    rows = _sum_rows(curve, m)
    if cfg.union_bound:
        for r, M in zip(rows, cfg.radii):
            r[0] = M
    meta = {"method": curve.meta["method"], "exact": curve.meta["exact"], "det_cap": curve.meta["det_cap"]}
    return Output(["M", "m", "value", "point_count", "min_abs_det"], rows, meta=meta)


def cmd_qo_check(cfg: RunConfig) -> Output:
    from .qoalgebra import (
        algebra_lookup,
        division_certificate,
        multiblock_psi,
        orthogonality_check,
        principal_ideal_index,
    )

    A = algebra_lookup(cfg.algebra)
    rng = random.Random(cfg.seed)
    n = len(A.order_basis)
    d = A.E.degree

    def rand_el(b):
        return A.from_coords([rng.randint(-b, b) for _ in range(n)])

    hom = 0.0
    for _ in range(cfg.samples):
        x, y = rand_el(3), rand_el(3)
        px, py = multiblock_psi(x), multiblock_psi(y)
        hom = max(hom, float(np.abs(multiblock_psi(x * y) - px @ py).max()), float(np.abs(multiblock_psi(x + y) - px - py).max()))
    orth = 0.0
    for _ in range(cfg.samples):
        x = A.E.element([rng.randint(-10, 10) for _ in range(d)])
        y = A.E.element([rng.randint(-10, 10) for _ in range(d)])
        r = orthogonality_check(A, x, y)
        orth = max(orth, r.defect / r.rhs if r.rhs else r.defect)
    mism = 0
    for _ in range(cfg.samples):
        x = rand_el(3)
        if x.is_zero:
            continue
        idx = principal_ideal_index(A, x)
        if round(abs(np.linalg.det(multiblock_psi(x))) ** 2) != idx:
            mism += 1
    one_u = A.one + A.u
    cert = division_certificate(A)
    rows = [
        ["homomorphism_max_error", hom, hom <= 1e-9],
        ["orthogonality_max_relative_defect", orth, orth <= 1e-12],
        ["index_identity_mismatches", mism, mism == 0],
        ["index(1+u)", principal_ideal_index(A, one_u), True],
        ["abs_det_psi(1+u)", float(abs(np.linalg.det(multiblock_psi(one_u)))), True],
        ["ramified_at_all_real_places", cert.ramified_at_all_real_places, cert.holds],
    ]
    return Output(["check", "value", "passed"], rows, meta={"samples": cfg.samples, "seed": cfg.seed})


def cmd_qo_detsum(cfg: RunConfig) -> Output:
    from .detsum import sum_curve
    from .qoalgebra import algebra_lookup, order_lattice, qo_growth_bounds

    A = algebra_lookup(cfg.algebra)
    m = cfg.exponent()
    curve = sum_curve(order_lattice(A), cfg.radii, m, method=cfg.method, det_cap=cfg.det_cap,
                      budget=cfg.budget, threads=cfg.threads)
    rows = _sum_rows(curve, m)
    for r, M in zip(rows, cfg.radii):
        r.append(qo_growth_bounds(A, M, int(m // 2)).lower if M >= math.e and m >= 4 else None)
    return Output(["M", "m", "value", "point_count", "min_abs_det", "lower"], rows,
                  meta={"method": curve.meta["method"], "exact": curve.meta["exact"]})


def cmd_compare(cfg: RunConfig, min_span: float) -> Output:
    from .analysis import compare_growth
    from .detsum import sum_curve
    from .lattice import canonical_embedding_lattice
    from .numberfield import catalog_lookup
    from .qoalgebra import algebra_lookup, order_lattice

    m = cfg.exponent()
    kw = dict(method=cfg.method, budget=cfg.budget, threads=cfg.threads)
    qo = sum_curve(order_lattice(algebra_lookup(cfg.qo)), cfg.radii, m, **kw)
    nf = sum_curve(canonical_embedding_lattice(catalog_lookup(cfg.nf)), cfg.radii, m, **kw)
    c = compare_growth(qo, nf, min_span)
    rows = [[M, a, b, r] for M, a, b, r in zip(cfg.radii, qo.values, nf.values, c.ratio_trend)]
    pre = [
        f"qo exponent {c.qo_fit.exponent:.4f} (rms {c.qo_fit.residual_rms:.2e})",
        f"nf exponent {c.nf_fit.exponent:.4f} (rms {c.nf_fit.residual_rms:.2e})",
        f"ratio increasing: {c.ratio_increasing}",
    ]
    meta = {
        "qo_exponent": c.qo_fit.exponent,
        "nf_exponent": c.nf_fit.exponent,
        "ratio_increasing": c.ratio_increasing,
    }
    return Output(["M", "qo_value", "nf_value", "ratio"], rows, pre, meta)


def cmd_report(cfg: RunConfig) -> Output:
    from .analysis import bound_report

    rep = bound_report(_subject(cfg), cfg.exponent(), cfg.radii, slack=cfg.slack, method=cfg.method,
                       budget=cfg.budget, threads=cfg.threads)
    rows = []
    for r in rep.rows:
        rows.append([rep.label, rep.bound, r.M, math.log(r.M), r.measured, r.lower, r.upper, "pass" if r.verdict else "fail", r.pre_asymptotic])
    pre = [f"{rep.label}: {rep.bound}, m = {rep.m:g}, slack = {rep.slack:g}"] + [f"note: {n}" for n in rep.notes]
    buf = io.StringIO()
    rep.write_csv(buf)
    return Output(
        ["label", "bound", "M", "log_M", "measured", "lower", "upper", "verdict", "pre_asymptotic"],
        rows, pre, {"notes": list(rep.notes), "passed": rep.passed, "long_csv": buf.getvalue()},
    )


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg, ns = config_from_args(argv)
    except UsageError as exc:
        print(str(exc), file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        c = cfg.command
        if c == "field info":
            out = cmd_field_info(cfg)
        elif c == "lattice vol":
            out = cmd_lattice_vol(cfg)
        elif c == "zeta":
            out = cmd_zeta(cfg)
        elif c == "ideals":
            out = cmd_ideals(cfg)
        elif c == "units":
            out = cmd_units(cfg)
        elif c == "detsum":
            out = cmd_detsum(cfg)
        elif c == "qo check":
            out = cmd_qo_check(cfg)
        elif c == "qo detsum":
            out = cmd_qo_detsum(cfg)
        elif c == "compare":
            out = cmd_compare(cfg, getattr(ns, "min_span", 2.0))
        elif c == "report":
            out = cmd_report(cfg)
        else:
            raise UsageError(f"unknown command {c!r}")
    except UsageError as exc:
        print(str(exc), file=stderr)
        return EXIT_USAGE
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=stderr)
        return EXIT_BUDGET
    except InvdetError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_SCOPE
    if cfg.command == "zeta" and cfg.format == "table":
        text = "\n".join(out.preamble) + "\n" + out.meta.pop("csv")
    elif cfg.command == "report" and cfg.format == "csv":
        text = out.meta["long_csv"]
    else:
        out.meta.pop("csv", None)
        out.meta.pop("long_csv", None)
        text = render(out, cfg.format)
    if cfg.output:
        os.makedirs(os.path.dirname(os.path.abspath(cfg.output)), exist_ok=True)
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
