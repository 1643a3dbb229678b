"""Sampled growth curves shared by the detsum, units and analysis modules."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import IO

import numpy as np


@dataclass(frozen=True)
class Sample:
    M: float
    value: float
    point_count: int
    min_abs_det: float | None = None


@dataclass(frozen=True)
class SumCurve:
    """Values of a sum (or count) on an increasing grid of radii."""

    label: str
    exponent_m: float
    samples: tuple[Sample, ...]
    normalized: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        rs = [s.M for s in self.samples]
        if any(b <= a for a, b in zip(rs, rs[1:])):
            raise ValueError("radii must be strictly increasing")
        vs = [s.value for s in self.samples]
        if any(b < a * (1 - 1e-12) for a, b in zip(vs, vs[1:])):
            raise ValueError(f"{self.label}: values must be nondecreasing in M")
        cs = [s.point_count for s in self.samples]
        if any(b < a for a, b in zip(cs, cs[1:])):
            raise ValueError(f"{self.label}: point counts must be nondecreasing in M")

    @property
    def radii(self) -> np.ndarray:
        return np.array([s.M for s in self.samples])

    @property
    def values(self) -> np.ndarray:
        return np.array([s.value for s in self.samples])

    @property
    def counts(self) -> np.ndarray:
        return np.array([s.point_count for s in self.samples])

    def write_csv(self, out: IO[str]) -> None:
        """Columns M, m, value, point_count, min_abs_det."""
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["M", "m", "value", "point_count", "min_abs_det"])
        for s in self.samples:
            md = "" if s.min_abs_det is None else repr(s.min_abs_det)
            w.writerow([repr(s.M), repr(self.exponent_m), repr(s.value), s.point_count, md])
