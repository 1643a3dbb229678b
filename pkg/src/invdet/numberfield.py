"""Catalog number fields with exact arithmetic and numeric embeddings.

Elements are stored as rational coordinate vectors over a fixed integral
basis, so ring operations are exact.  Embedding values are complex128 and
only used where a norm or a log is needed.

Embedding convention: real embeddings first, in decreasing order of the
image of the defining root; then one embedding per complex-conjugate pair,
namely the one sending the defining root to a value with positive imaginary
part, in decreasing order of real part.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Sequence

import numpy as np

from .enumeration import short_vectors
from .errors import (
    CatalogIncompleteError,
    CatalogMissError,
    CorruptedCatalogError,
    DimensionMismatchError,
    UnsupportedSignatureError,
)

REL_TOL = 1e-9


# ---------------------------------------------------------------------------
# small exact helpers


def _frac_det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    a = [list(map(Fraction, r)) for r in rows]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        inv = 1 / a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] * inv
            if f:
                for j in range(c, n):
                    a[r][j] -= f * a[c][j]
    return det


def _frac_inverse(rows: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    n = len(rows)
    a = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        piv = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [v * inv for v in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [v - f * w for v, w in zip(a[r], a[c])]
    return [row[n:] for row in a]


def int_det(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix (Bareiss)."""
    a = [list(map(int, r)) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            sw = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if sw is None:
                return 0
            a[k], a[sw] = a[sw], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _poly_discriminant(f: Sequence[int]) -> int:
    """Discriminant of a monic integer polynomial (coefficients low -> high)."""
    d = len(f) - 1
    if d == 1:
        return 1
    df = [i * f[i] for i in range(1, d + 1)]
    # Sylvester matrix of f (degree d) and f' (degree d-1), high -> low.
    fh, gh = list(reversed(f)), list(reversed(df))
    size = 2 * d - 1
    rows = []
    for i in range(d - 1):
        rows.append([0] * i + fh + [0] * (size - d - 1 - i))
    for i in range(d):
        rows.append([0] * i + gh + [0] * (size - d - i))
    res = int_det(rows)
    return (-1) ** (d * (d - 1) // 2) * res


def _pmod_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod_rem(a, b, p):
    a = a[:]
    inv = pow(b[-1], -1, p)
    while len(a) >= len(b):
        c = a[-1] * inv % p
        sh = len(a) - len(b)
        for i, bv in enumerate(b):
            a[sh + i] = (a[sh + i] - c * bv) % p
        _pmod_trim(a)
    return a


def _pmod_mul(a, b, m, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, av in enumerate(a):
        if av:
            for j, bv in enumerate(b):
                out[i + j] = (out[i + j] + av * bv) % p
    return _pmod_rem(_pmod_trim(out), m, p)


def _pmod_pow_x(e, m, p):
    result, base = [1], _pmod_rem([0, 1], m, p)
    while e:
        if e & 1:
            result = _pmod_mul(result, base, m, p)
        base = _pmod_mul(base, base, m, p)
        e >>= 1
    return result


def _pmod_gcd(a, b, p):
    a, b = _pmod_trim(a[:]), _pmod_trim(b[:])
    while b:
        a, b = b, _pmod_rem(a, b, p)
    return a


def distinct_factor_degrees(f: Sequence[int], p: int) -> list[int]:
    """Degrees of the distinct monic irreducible factors of f modulo p.

    Uses deg gcd(x^(p^i) - x, f) = sum over j | i of j * (number of distinct
    irreducible factors of degree j), which needs no square-free split.
    """
    g = _pmod_trim([c % p for c in f])
    d = len(g) - 1
    counts: dict[int, int] = {}
    xp = [0, 1]
    for i in range(1, d + 1):
        xp = _pmod_pow_x(p, g, p) if i == 1 else _pmod_compose_frobenius(xp, g, p)
        h = xp[:] + [0] * max(0, 2 - len(xp))
        h[1] = (h[1] - 1) % p
        deg = len(_pmod_gcd(g, _pmod_trim(h), p)) - 1
        known = sum(j * counts[j] for j in counts if i % j == 0)
        n_i = (deg - known) // i
        if n_i:
            counts[i] = n_i
    return sorted(j for j, c in counts.items() for _ in range(c))


def _pmod_compose_frobenius(xp, g, p):
    # x^(p^(i+1)) = (x^(p^i))^p mod g
    result, base, e = [1], xp, p
    while e:
        if e & 1:
            result = _pmod_mul(result, base, g, p)
        base = _pmod_mul(base, base, g, p)
        e >>= 1
    return result


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % q for q in range(2, math.isqrt(n) + 1))


def _prime_factors(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# fields and elements


@dataclass(frozen=True, eq=False)
class NumberField:
    name: str
    polynomial: tuple[int, ...]
    integral_basis: tuple[tuple[Fraction, ...], ...]
    discriminant: int
    class_number: int
    regulator: float
    roots_of_unity: int
    fundamental_units: tuple[tuple[int, ...], ...]
    conductor: int = 1
    special_primes: dict[int, tuple[int, ...]] = field(default_factory=dict)
    basis_names: tuple[str, ...] | None = None

    def __post_init__(self):
        d = len(self.polynomial) - 1
        if d < 1 or self.polynomial[-1] != 1:
            raise CorruptedCatalogError(f"{self.name}: defining polynomial must be monic")
        if len(self.integral_basis) != d or any(len(r) != d for r in self.integral_basis):
            raise CorruptedCatalogError(f"{self.name}: integral basis has wrong shape")
        roots = self._polished_roots()
        real = sorted((r.real for r in roots if abs(r.imag) < 1e-9), reverse=True)
        cplx = sorted((r for r in roots if r.imag > 1e-9), key=lambda z: (-z.real, z.imag))
        r1, r2 = len(real), len(cplx)
        if r1 + 2 * r2 != d:
            raise CorruptedCatalogError(f"{self.name}: root count mismatch")
        reps = np.array([complex(r) for r in real] + list(cplx), dtype=complex)
        full = np.concatenate([reps, np.conj(reps[r1:])])
        power = np.array([[float(c) for c in row] for row in self.integral_basis])
        set_ = lambda k, v: object.__setattr__(self, k, v)
        set_("degree", d)
        set_("signature", (r1, r2))
        set_("places", reps)
        set_("embedding_matrix", power @ np.vander(reps, d, increasing=True).T)
        set_("full_embedding_matrix", power @ np.vander(full, d, increasing=True).T)
        set_("_basis_inverse", _frac_inverse(self.integral_basis))
        set_("mult_table", self._build_mult_table())

    # -- construction helpers
    def _polished_roots(self) -> np.ndarray:
        f = np.array(self.polynomial[::-1], dtype=float)
        roots = np.roots(f) if len(f) > 1 else np.array([])
        df = np.polyder(f)
        for _ in range(4):
            roots = roots - np.polyval(f, roots) / np.polyval(df, roots)
        return roots.astype(complex)

    def _to_power(self, coords: Sequence[Fraction]) -> list[Fraction]:
        d = self.degree
        return [sum((coords[i] * self.integral_basis[i][j] for i in range(d)), Fraction(0)) for j in range(d)]

    def _from_power(self, pc: Sequence[Fraction]) -> tuple[Fraction, ...]:
        d = self.degree
        inv = self._basis_inverse
        return tuple(sum((pc[j] * inv[j][i] for j in range(d)), Fraction(0)) for i in range(d))

    def _power_mulmod(self, a, b):
        d = self.degree
        prod = [Fraction(0)] * (2 * d - 1)
        for i, av in enumerate(a):
            if av:
                for j, bv in enumerate(b):
                    prod[i + j] += av * bv
        f = self.polynomial
        for k in range(2 * d - 2, d - 1, -1):
            c = prod[k]
            if c:
                for j in range(d + 1):
                    prod[k - d + j] -= c * f[j]
        return prod[:d]

    def _build_mult_table(self) -> np.ndarray:
        d = self.degree
        tab = np.zeros((d, d, d), dtype=np.int64)
        for i in range(d):
            for j in range(i, d):
                c = self._from_power(self._power_mulmod(self.integral_basis[i], self.integral_basis[j]))
                if any(v.denominator != 1 for v in c):
                    raise CorruptedCatalogError(f"{self.name}: integral basis is not closed under products")
                tab[i, j] = tab[j, i] = [int(v) for v in c]
        return tab

    # -- basic properties
    @property
    def totally_real(self) -> bool:
        return self.signature[1] == 0

    @property
    def totally_complex(self) -> bool:
        return self.signature[0] == 0

    @property
    def unit_rank(self) -> int:
        r1, r2 = self.signature
        return r1 + r2 - 1

    @functools.cached_property
    def index(self) -> int:
        """[O_K : Z[theta]] for the defining root theta."""
        det = _frac_det(self.integral_basis)
        idx = 1 / abs(det)
        if idx.denominator != 1:
            raise CorruptedCatalogError(f"{self.name}: integral basis does not contain Z[theta]")
        return int(idx)

    @property
    def embedding_dimension(self) -> int:
        """Size n of the diagonal matrices psi(x)."""
        r1, r2 = self.signature
        if r1 and r2:
            raise UnsupportedSignatureError(f"{self.name} has mixed signature {self.signature}")
        return r1 + r2

    def element(self, coords: Sequence) -> FieldElement:
        if len(coords) != self.degree:
            raise DimensionMismatchError(f"{self.name} expects {self.degree} coordinates")
        return FieldElement(tuple(Fraction(c) for c in coords), self)

    @property
    def one(self) -> FieldElement:
        return self._from_power_element([1] + [0] * (self.degree - 1))

    def _from_power_element(self, pc) -> FieldElement:
        return FieldElement(self._from_power([Fraction(c) for c in pc]), self)

    @property
    def units(self) -> list[FieldElement]:
        return [self.element(u) for u in self.fundamental_units]

    def embed(self, coords: np.ndarray) -> np.ndarray:
        """Representative embedding values for rows of coordinates."""
        return np.asarray(coords, dtype=float) @ self.embedding_matrix

    def log_embedding(self, values: np.ndarray) -> np.ndarray:
        """Rows of log |sigma_s|, doubled at complex places."""
        r1 = self.signature[0]
        w = np.ones(values.shape[-1])
        w[r1:] = 2.0
        return w * np.log(np.abs(values))

    def mult_matrix(self, coords: Sequence) -> list[list[Fraction]]:
        """Matrix of y -> x*y on coordinate row vectors (y_new = y @ M)."""
        d = self.degree
        c = [Fraction(v) for v in coords]
        return [
            [sum((c[i] * int(self.mult_table[i, j, k]) for i in range(d) if c[i]), Fraction(0)) for k in range(d)]
            for j in range(d)
        ]

    def mult_matrix_int(self, coords: Sequence[int]) -> np.ndarray:
        c = np.asarray(coords, dtype=np.int64)
        return np.einsum("i,ijk->jk", c, self.mult_table)

    def t2_gram(self) -> np.ndarray:
        v = self.full_embedding_matrix
        return (v @ v.conj().T).real

    @functools.cached_property
    def torsion(self) -> list[FieldElement]:
        """All roots of unity, found by exhaustive short-vector search."""
        d = self.degree
        found = []
        for coords, _ in short_vectors(self.t2_gram(), float(d)):
            vals = coords @ self.full_embedding_matrix
            ok = np.all(np.abs(np.abs(vals) - 1.0) < 1e-7, axis=1)
            found.extend(self.element(c.tolist()) for c in coords[ok])
        return sorted(found, key=lambda e: e.coords)

    @functools.cached_property
    def conjugation_matrix(self) -> np.ndarray:
        """Integer matrix of complex conjugation on coordinates (row convention)."""
        if not self.totally_complex:
            raise UnsupportedSignatureError(f"{self.name} is not totally complex")
        v = self.full_embedding_matrix  # basis x embeddings
        sol = np.linalg.solve(v.T, np.conj(v).T).T
        c = np.rint(sol.real).astype(np.int64)
        if np.abs(sol - c).max() > 1e-7:
            raise CorruptedCatalogError(f"{self.name}: complex conjugation is not an automorphism")
        # ring automorphism check: conj(w_i w_j) == conj(w_i) conj(w_j)
        t = self.mult_table
        lhs = np.einsum("ijk,kl->ijl", t, c)
        rhs = np.einsum("ia,jb,abl->ijl", c, c, t)
        if not np.array_equal(lhs, rhs):
            raise CorruptedCatalogError(f"{self.name}: conjugation fails multiplicativity")
        return c

    # -- splitting of rational primes
    def residue_degrees(self, p: int) -> tuple[int, ...]:
        """Residue degrees of the prime ideals above p."""
        if self.degree == 1:
            return (1,)
        if self.index % p == 0:
            if p not in self.special_primes:
                raise CatalogIncompleteError(f"{self.name}: no splitting data for index prime {p}")
            return tuple(self.special_primes[p])
        if self.conductor % p == 0 or self.conductor == 1:
            return tuple(distinct_factor_degrees(self.polynomial, p))
        return self._class_degrees[p % self.conductor]

    @functools.cached_property
    def _class_degrees(self) -> dict[int, tuple[int, ...]]:
        n = self.conductor
        out = {}
        bad = n * self.index
        for r in range(1, n):
            if math.gcd(r, n) != 1:
                continue
            q = r
            while not (_is_prime(q) and bad % q != 0):
                q += n
            out[r] = tuple(distinct_factor_degrees(self.polynomial, q))
        return out

    # -- verification
    def verify(self) -> None:
        """Re-derive every shipped invariant; raise CorruptedCatalogError on mismatch."""
        name = self.name
        r1, r2 = self.signature
        if (self.discriminant < 0) != (r2 % 2 == 1):
            raise CorruptedCatalogError(f"{name}: discriminant sign disagrees with signature")
        det_b = _frac_det(self.integral_basis)
        exact_disc = _poly_discriminant(self.polynomial) * det_b**2
        if exact_disc != self.discriminant:
            raise CorruptedCatalogError(f"{name}: discriminant {self.discriminant} != {exact_disc}")
        gram_det = abs(np.linalg.det(self.full_embedding_matrix)) ** 2
        if abs(gram_det - abs(self.discriminant)) > REL_TOL * abs(self.discriminant):
            raise CorruptedCatalogError(f"{name}: Minkowski Gram determinant {gram_det} != |d|")
        if len(self.fundamental_units) != self.unit_rank:
            raise CorruptedCatalogError(f"{name}: expected {self.unit_rank} fundamental units")
        for u in self.units:
            if not u.is_integral or abs(u.norm()) != 1:
                raise CorruptedCatalogError(f"{name}: {u.coords} is not a unit")
        reg = self.computed_regulator()
        if abs(reg - self.regulator) > REL_TOL * self.regulator:
            raise CorruptedCatalogError(f"{name}: regulator {self.regulator} != {reg}")
        if len(self.torsion) != self.roots_of_unity:
            raise CorruptedCatalogError(
                f"{name}: found {len(self.torsion)} roots of unity, catalog says {self.roots_of_unity}"
            )
        if self.totally_real and self.degree == 2:
            self._check_unit_minimal()
        for p, degs in self.special_primes.items():
            if sum(degs) > self.degree:
                raise CorruptedCatalogError(f"{name}: residue degrees at {p} exceed the degree")
            if self.conductor % p and self.conductor > 1:
                if tuple(sorted(degs)) != self._class_degrees[p % self.conductor]:
                    raise CorruptedCatalogError(f"{name}: splitting data at {p} disagrees with its class")
        for p in _prime_factors(self.index):
            if p not in self.special_primes:
                raise CorruptedCatalogError(f"{name}: index prime {p} lacks splitting data")
        if self.conductor > 1:
            for q in range(2, 200):
                if _is_prime(q) and self.conductor % q and self.index % q:
                    if tuple(distinct_factor_degrees(self.polynomial, q)) != self._class_degrees[q % self.conductor]:
                        raise CorruptedCatalogError(f"{name}: splitting of {q} not determined by conductor")

    def computed_regulator(self) -> float:
        r = self.unit_rank
        if r == 0:
            return 1.0
        vals = self.embed(np.array(self.fundamental_units, dtype=float))
        logs = self.log_embedding(vals)
        return abs(float(np.linalg.det(logs[:, :r])))

    def _check_unit_minimal(self) -> None:
        eps = self.units[0]
        big = float(np.max(np.abs(eps.embed())))
        bound = max(abs(int(c)) for c in eps.coords)
        rng = range(-bound, bound + 1)
        for a in rng:
            for b in rng:
                x = self.element([a, b])
                if (a, b) == (0, 0) or abs(x.norm()) != 1:
                    continue
                m = float(np.max(np.abs(x.embed())))
                if 1 + 1e-12 < m < big - 1e-12:
                    raise CorruptedCatalogError(f"{self.name}: unit {x.coords} is smaller than the fundamental unit")

    def __repr__(self) -> str:
        return f"NumberField({self.name!r}, degree={self.degree}, signature={self.signature})"


@dataclass(frozen=True)
class FieldElement:
    coords: tuple[Fraction, ...]
    field: NumberField = field(repr=False, compare=False)

    def _check(self, other):
        if isinstance(other, int | Fraction):
            return self.field.one * other
        if other.field is not self.field:
            raise DimensionMismatchError("elements belong to different fields")
        return other

    def __add__(self, other):
        other = self._check(other)
        return FieldElement(tuple(a + b for a, b in zip(self.coords, other.coords)), self.field)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(tuple(-a for a in self.coords), self.field)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int | Fraction):
            return FieldElement(tuple(a * other for a in self.coords), self.field)
        other = self._check(other)
        t = self.field.mult_table
        d = self.field.degree
        out = [Fraction(0)] * d
        for i, a in enumerate(self.coords):
            if not a:
                continue
            for j, b in enumerate(other.coords):
                if b:
                    ab = a * b
                    for k in range(d):
                        if t[i, j, k]:
                            out[k] += ab * int(t[i, j, k])
        return FieldElement(tuple(out), self.field)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.field.one, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> FieldElement:
        m = self.field.mult_matrix(self.coords)
        inv = _frac_inverse(m)
        # 1 * x^{-1}: row vector of one times inv
        one = self.field.one.coords
        d = self.field.degree
        return FieldElement(tuple(sum((one[j] * inv[j][k] for j in range(d)), Fraction(0)) for k in range(d)), self.field)

    def norm(self) -> Fraction:
        v = _frac_det(self.field.mult_matrix(self.coords))
        return Fraction(v)

    def trace(self) -> Fraction:
        m = self.field.mult_matrix(self.coords)
        return sum((m[i][i] for i in range(self.field.degree)), Fraction(0))

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)

    def int_coords(self) -> list[int]:
        if not self.is_integral:
            raise ValueError("element is not integral")
        return [int(c) for c in self.coords]

    def embed(self) -> np.ndarray:
        return np.array([float(c) for c in self.coords]) @ self.field.embedding_matrix

    def full_embed(self) -> np.ndarray:
        return np.array([float(c) for c in self.coords]) @ self.field.full_embedding_matrix

    def conj(self) -> FieldElement:
        c = self.field.conjugation_matrix
        d = self.field.degree
        return FieldElement(
            tuple(sum((self.coords[i] * int(c[i, k]) for i in range(d)), Fraction(0)) for k in range(d)),
            self.field,
        )

    def __eq__(self, other):
        if isinstance(other, int | Fraction):
            other = self.field.one * other
        return isinstance(other, FieldElement) and other.field is self.field and other.coords == self.coords

    def __hash__(self):
        return hash((self.field.name, self.coords))


# ---------------------------------------------------------------------------
# catalog


def _parse_record(rec: dict) -> NumberField:
    try:
        return NumberField(
            name=rec["name"],
            polynomial=tuple(int(c) for c in rec["polynomial"]),
            integral_basis=tuple(tuple(Fraction(c) for c in row) for row in rec["integral_basis"]),
            discriminant=int(rec["discriminant"]),
            class_number=int(rec["class_number"]),
            regulator=float(rec["regulator"]),
            roots_of_unity=int(rec["roots_of_unity"]),
            fundamental_units=tuple(tuple(int(c) for c in u) for u in rec["fundamental_units"]),
            conductor=int(rec.get("conductor", 1)),
            special_primes={int(p): tuple(v) for p, v in rec.get("special_primes", {}).items()},
            basis_names=tuple(rec["basis_names"]) if "basis_names" in rec else None,
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise CorruptedCatalogError(f"malformed catalog record {rec.get('name')!r}: {exc}") from exc


@functools.lru_cache(maxsize=None)
def _catalog_records() -> dict[str, dict]:
    text = resources.files("invdet").joinpath("data/fields.json").read_text(encoding="utf-8")
    return {r["name"]: r for r in json.loads(text)["fields"]}


def catalog_names() -> list[str]:
    return list(_catalog_records())


@functools.lru_cache(maxsize=None)
def catalog_lookup(name: str) -> NumberField:
    """Load a catalog field and re-verify all of its invariants."""
    recs = _catalog_records()
    if name not in recs:
        raise CatalogMissError(f"unknown field {name!r}; catalog has {', '.join(recs)}")
    field_ = _parse_record(recs[name])
    field_.verify()
    return field_


def field_from_record(rec: dict, verify: bool = True) -> NumberField:
    """Build a field from a catalog-format record (used for custom data)."""
    f = _parse_record(rec)
    if verify:
        f.verify()
    return f


# ---------------------------------------------------------------------------
# constants entering the growth bounds


def residue_constant(K: NumberField) -> float:
    """alpha_K = 2^r1 (2 pi)^r2 R / (omega sqrt|d|)."""
    r1, r2 = K.signature
    return 2**r1 * (2 * math.pi) ** r2 * K.regulator / (K.roots_of_unity * math.sqrt(abs(K.discriminant)))


def zeta_residue(K: NumberField) -> float:
    """Residue of the Dedekind zeta function at 1, alpha_K * h_K."""
    return residue_constant(K) * K.class_number


def unit_density_constant(K: NumberField, n: int) -> float:
    """Leading coefficient omega n^(n-1) / (R (n-1)!) of the unit count in a ball."""
    if n != K.embedding_dimension:
        raise DimensionMismatchError(
            f"{K.name}: unit density needs n = {K.embedding_dimension}, got {n}"
        )
    return K.roots_of_unity * n ** (n - 1) / (K.regulator * math.factorial(n - 1))


@dataclass(frozen=True)
class BoundConstants:
    """Constants of the normalized inverse determinant sum bounds.

    ``case`` names the applicable bound:
    ``real_m_gt_1``, ``real_m_eq_1``, ``complex_nr_gt_1``, ``complex_nr_eq_1``.
    ``c_K`` is None where only the zeta-weighted upper bound applies.
    """

    tilde_N: float
    c_K: float | None
    case: str
    n: int
    zeta_argument: float | None


def normalized_bound_constants(K: NumberField, m: float) -> BoundConstants:
    """Constants for S~^m of psi(O_K).

    For totally real K the exponent is m itself; for totally complex K,
    m = 2 n_r and the constants are stated in terms of n_r.
    """
    from .errors import ScopeError

    r1, r2 = K.signature
    if r1 and r2:
        raise UnsupportedSignatureError(f"{K.name} has mixed signature {K.signature}")
    n = K.embedding_dimension
    nk = unit_density_constant(K, n)
    sqrt_d = math.sqrt(abs(K.discriminant))
    if K.totally_real:
        if m > 1:
            return BoundConstants(nk * sqrt_d**m, None, "real_m_gt_1", n, float(m))
        if m == 1:
            c = K.class_number * 2**n * n**n / math.factorial(n - 1)
            return BoundConstants(nk * sqrt_d, c, "real_m_eq_1", n, None)
        raise ScopeError(f"no bound stated for totally real fields with m = {m} < 1")
    n_r = m / 2
    if n_r != int(n_r) or n_r < 1:
        raise ScopeError(f"totally complex bounds need m = 2 n_r with integer n_r >= 1, got m = {m}")
    n_r = int(n_r)
    vol = 2.0**-n * sqrt_d
    if n_r > 1:
        return BoundConstants(nk * vol**n_r, None, "complex_nr_gt_1", n, float(n_r))
    c = K.class_number * math.pi**n * 2 * n**n / (K.regulator * math.factorial(n - 1))
    return BoundConstants(nk * vol, c, "complex_nr_eq_1", n, None)
