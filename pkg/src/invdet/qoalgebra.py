"""Quaternion cyclic division algebras D = E + E u over a totally real center.

E = KF is a CM field: K totally real of degree k, F imaginary quadratic, and
sigma is complex conjugation on E (it fixes K).  Elements are stored as
pairs (x1, x2) meaning x1 + x2 u, with u x = x* u and u^2 = gamma.  In this
reading the 2x2 map

    phi(x1 + x2 u) = [[x1, x2], [gamma x2*, x1*]]

is a ring homomorphism; the block-diagonal map psi stacks the conjugates of
phi under the k places of E that restrict to distinct places of K.
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

from .curves import SumCurve
from .errors import (
    CatalogMissError,
    CorruptedCatalogError,
    DegenerateOrderError,
    NotInOrderError,
    ScopeError,
    ZeroElementError,
)
from .lattice import CentralUnitAction, ElementTag, MatrixLattice
from .numberfield import (
    FieldElement,
    NumberField,
    _frac_inverse,
    catalog_lookup,
    int_det,
    unit_density_constant,
)
from .units import count_translates, count_units_in_ball, log_unit_matrix


@dataclass(frozen=True, eq=False)
class CyclicAlgebraCode:
    name: str
    F: NumberField
    K: NumberField
    E: NumberField
    gamma: tuple[int, ...]  # coordinates over K's integral basis
    K_in_E: tuple[tuple[int, ...], ...]  # images of K's basis in E coordinates
    F_in_E: tuple[tuple[int, ...], ...]
    order_basis: tuple[tuple[Fraction, ...], ...] | None = None  # rows in natural coordinates

    def __post_init__(self):
        K, E, F = self.K, self.E, self.F
        k = K.degree
        if not K.totally_real:
            raise CorruptedCatalogError(f"{self.name}: center must be totally real")
        if not (F.degree == 2 and F.totally_complex):
            raise CorruptedCatalogError(f"{self.name}: F must be imaginary quadratic")
        if E.degree != 2 * k or not E.totally_complex:
            raise CorruptedCatalogError(f"{self.name}: E must be a CM field of degree 2k")
        if not any(self.gamma):
            raise CorruptedCatalogError(f"{self.name}: gamma must be nonzero")
        # embeddings of K into E respect the place order
        kimg = np.array([[float(c) for c in row] for row in self.K_in_E]) @ E.embedding_matrix
        kvals = K.embedding_matrix
        if np.abs(kimg - kvals).max() > 1e-9:
            raise CorruptedCatalogError(f"{self.name}: E's places do not restrict to K's places in order")
        self._check_hom(K, self.K_in_E)
        self._check_hom(F, self.F_in_E)
        conj = E.conjugation_matrix
        kint = np.array(self.K_in_E, dtype=np.int64)
        if not np.array_equal(kint @ conj, kint):
            raise CorruptedCatalogError(f"{self.name}: sigma does not fix K")
        # sigma commutes with every tau_i (complex conjugation on values)
        vals = E.embedding_matrix
        if np.abs((conj @ vals) - np.conj(vals)).max() > 1e-9:
            raise CorruptedCatalogError(f"{self.name}: sigma does not commute with the places")
        basis = self.order_basis
        if basis is None:
            d = 2 * E.degree
            basis = tuple(tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d))
            object.__setattr__(self, "order_basis", basis)
        object.__setattr__(self, "_basis_inv", _frac_inverse(basis))
        self.check_ring_closure()

    def _check_hom(self, sub: NumberField, images):
        E = self.E
        imgs = [E.element(r) for r in images]
        for i in range(sub.degree):
            for j in range(sub.degree):
                prod = sub.element([int(t == i) for t in range(sub.degree)]) * sub.element(
                    [int(t == j) for t in range(sub.degree)]
                )
                lhs = sum((c * imgs[t] for t, c in enumerate(prod.coords)), E.element([0] * E.degree))
                if lhs != imgs[i] * imgs[j]:
                    raise CorruptedCatalogError(f"{self.name}: {sub.name} -> E map is not multiplicative")

    # -- embeddings of K, gamma
    @property
    def k(self) -> int:
        return self.K.degree

    def k_to_e(self, x: FieldElement) -> FieldElement:
        imgs = [self.E.element(r) for r in self.K_in_E]
        return sum((c * imgs[t] for t, c in enumerate(x.coords)), self.E.element([0] * self.E.degree))

    @functools.cached_property
    def gamma_E(self) -> FieldElement:
        return self.k_to_e(self.K.element(self.gamma))

    @functools.cached_property
    def gamma_values(self) -> np.ndarray:
        """tau_i(gamma), real, one per block."""
        return self.K.element(self.gamma).embed().real

    # -- elements
    def element(self, x1: Sequence, x2: Sequence) -> AlgebraElement:
        return AlgebraElement(self.E.element(x1), self.E.element(x2), self)

    def from_coords(self, coords: Sequence) -> AlgebraElement:
        """Element with the given coordinates over the order basis."""
        d = self.E.degree
        c = [Fraction(v) for v in coords]
        nat = [sum((c[i] * self.order_basis[i][j] for i in range(len(c))), Fraction(0)) for j in range(2 * d)]
        return AlgebraElement(self.E.element(nat[:d]), self.E.element(nat[d:]), self)

    def order_coords(self, a: AlgebraElement) -> tuple[Fraction, ...]:
        nat = list(a.x1.coords) + list(a.x2.coords)
        n = len(nat)
        return tuple(sum((nat[j] * self._basis_inv[j][i] for j in range(n)), Fraction(0)) for i in range(n))

    @property
    def one(self) -> AlgebraElement:
        E = self.E
        return AlgebraElement(E.one, E.element([0] * E.degree), self)

    @property
    def u(self) -> AlgebraElement:
        E = self.E
        return AlgebraElement(E.element([0] * E.degree), E.one, self)

    def basis_elements(self) -> list[AlgebraElement]:
        n = len(self.order_basis)
        return [self.from_coords([int(i == j) for j in range(n)]) for i in range(n)]

    @functools.cached_property
    def structure_constants(self) -> list[list[list[int]]]:
        """t[i][j] = order coordinates of b_i b_j (integers for a closed basis)."""
        b = self.basis_elements()
        return [[[int(v) for v in self.order_coords(x * y)] for y in b] for x in b]

    def check_ring_closure(self) -> None:
        b = self.basis_elements()
        for x in b:
            for y in b:
                if any(c.denominator != 1 for c in self.order_coords(x * y)):
                    raise DegenerateOrderError(f"{self.name}: order basis is not closed under multiplication")

    # -- matrices
    def phi_values(self, x1v: np.ndarray, x2v: np.ndarray) -> np.ndarray:
        """Blocks [[x1, x2], [g x2*, x1*]] from place values (..., k) -> (..., k, 2, 2)."""
        g = self.gamma_values
        out = np.empty(x1v.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = x1v
        out[..., 0, 1] = x2v
        out[..., 1, 0] = g * np.conj(x2v)
        out[..., 1, 1] = np.conj(x1v)
        return out

    def natural_values(self, coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Place values of x1, x2 for rows of order-basis coordinates."""
        d = self.E.degree
        b = np.array([[float(c) for c in row] for row in self.order_basis])
        nat = np.asarray(coords, dtype=float) @ b
        emb = self.E.embedding_matrix
        return nat[..., :d] @ emb, nat[..., d:] @ emb

    def __repr__(self) -> str:
        return f"CyclicAlgebraCode({self.name!r}, K={self.K.name}, E={self.E.name}, gamma={self.gamma})"


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    x1: FieldElement
    x2: FieldElement
    parent: CyclicAlgebraCode = field(repr=False)

    def __add__(self, other: AlgebraElement) -> AlgebraElement:
        return AlgebraElement(self.x1 + other.x1, self.x2 + other.x2, self.parent)

    def __sub__(self, other: AlgebraElement) -> AlgebraElement:
        return AlgebraElement(self.x1 - other.x1, self.x2 - other.x2, self.parent)

    def __neg__(self) -> AlgebraElement:
        return AlgebraElement(-self.x1, -self.x2, self.parent)

    def __mul__(self, other):
        if isinstance(other, int | Fraction):
            return AlgebraElement(self.x1 * other, self.x2 * other, self.parent)
        g = self.parent.gamma_E
        # (x1 + x2 u)(y1 + y2 u) = (x1 y1 + g x2 y2*) + (x1 y2 + x2 y1*) u
        y1, y2 = other.x1, other.x2
        return AlgebraElement(
            self.x1 * y1 + g * self.x2 * y2.conj(),
            self.x1 * y2 + self.x2 * y1.conj(),
            self.parent,
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, AlgebraElement) and self.x1 == other.x1 and self.x2 == other.x2

    def __hash__(self):
        return hash((self.x1, self.x2))

    @property
    def is_zero(self) -> bool:
        return self.x1.is_zero and self.x2.is_zero

    def reduced_norm(self) -> FieldElement:
        """nrd = x1 x1* - gamma x2 x2*, an element of K (in E coordinates)."""
        g = self.parent.gamma_E
        return self.x1 * self.x1.conj() - g * self.x2 * self.x2.conj()

    def order_coords(self) -> tuple[Fraction, ...]:
        return self.parent.order_coords(self)

    def in_order(self) -> bool:
        return all(c.denominator == 1 for c in self.order_coords())


def phi(a: AlgebraElement) -> np.ndarray:
    """The 2x2 matrix of a under the first place of E."""
    x1v, x2v = a.x1.embed()[0], a.x2.embed()[0]
    A = a.parent
    g = A.gamma_values[0]
    return np.array([[x1v, x2v], [g * np.conj(x2v), np.conj(x1v)]], dtype=complex)


def multiblock_psi(a: AlgebraElement) -> np.ndarray:
    """Block-diagonal 2k x 2k matrix diag(tau_1(phi(a)), ..., tau_k(phi(a)))."""
    A = a.parent
    blocks = A.phi_values(a.x1.embed(), a.x2.embed())
    k = A.k
    out = np.zeros((2 * k, 2 * k), dtype=complex)
    for i in range(k):
        out[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = blocks[i]
    return out


def _block_diag(blocks: np.ndarray) -> np.ndarray:
    """(..., k, 2, 2) -> (..., 2k, 2k)."""
    k = blocks.shape[-3]
    out = np.zeros(blocks.shape[:-3] + (2 * k, 2 * k), dtype=complex)
    for i in range(k):
        out[..., 2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = blocks[..., i, :, :]
    return out


def _order_tag(A: CyclicAlgebraCode) -> ElementTag:
    g = A.gamma_values

    def approx(coords):
        v1, v2 = A.natural_values(coords)
        return np.prod(np.abs(v1) ** 2 - g * np.abs(v2) ** 2, axis=-1)

    def exact(c):
        nrd = A.from_coords(c).reduced_norm()
        n_e = abs(nrd.norm())  # = N_{K/Q}(nrd)^2
        r = math.isqrt(int(n_e))
        if r * r != n_e:
            raise ArithmeticError("reduced norm is not in the center")
        return r

    return ElementTag(
        exponent=1.0,
        approx_det=approx,
        exact_det=exact,
        preimage=lambda c: A.from_coords(c),
        to_matrix=multiblock_psi,
    )


def _central_action(A: CyclicAlgebraCode) -> CentralUnitAction | None:
    g = A.gamma_values
    if np.any(g >= 0):
        return None  # energy/det ratio unbounded without a totally negative gamma
    K, E = A.K, A.E
    d = E.degree
    n = len(A.order_basis)
    b = np.array([[float(c) for c in row] for row in A.order_basis])
    emb = E.embedding_matrix
    grams = []
    for i in range(A.k):
        e = emb[:, i]
        base = np.outer(e, e.conj()).real
        nat = np.zeros((2 * d, 2 * d))
        nat[:d, :d] = 2 * base
        nat[d:, d:] = (1 + g[i] ** 2) * base
        grams.append(b @ nat @ b.T)
    grams = np.array(grams)
    ratio = float(max(max(2.0, (1 + gi**2) / abs(gi)) for gi in g))
    lam = log_unit_matrix(K)
    mats, invs = [], []
    for eps in K.units:
        for unit in (eps, eps.inverse()):
            ue = A.k_to_e(unit)
            el = AlgebraElement(ue, E.element([0] * d), A)
            rows = [[int(c) for c in A.order_coords(el * be)] for be in A.basis_elements()]
            (mats if unit is eps else invs).append(rows)
    mats = np.array(mats, dtype=np.int64).reshape(len(K.units), n, n)
    invs = np.array(invs, dtype=np.int64).reshape(len(K.units), n, n)
    return CentralUnitAction(grams, lam, mats, invs, block_size=2, energy_ratio=ratio)


def order_lattice(A: CyclicAlgebraCode) -> MatrixLattice:
    """psi(Lambda) for the order spanned by ``A.order_basis``."""
    basis = np.array([multiblock_psi(b) for b in A.basis_elements()])
    return MatrixLattice(basis, label=f"psi(Lambda_{A.name})", tag=_order_tag(A), units=_central_action(A))


def _left_mult_matrix(A: CyclicAlgebraCode, x: AlgebraElement) -> list[list[int]]:
    """Row j holds the order coordinates of x b_j."""
    c = [int(v) for v in x.order_coords()]
    t = A.structure_constants
    n = len(c)
    return [[sum(c[i] * t[i][j][l] for i in range(n) if c[i]) for l in range(n)] for j in range(n)]


def principal_ideal_index(A: CyclicAlgebraCode, x: AlgebraElement) -> int:
    """[Lambda : x Lambda] as |det| of the integer matrix of y -> x y.

    Checks |det psi(x)|^2 = index within relative 1e-9.
    """
    if x.is_zero:
        raise ZeroElementError("the zero element generates no finite-index ideal")
    if not x.in_order():
        raise NotInOrderError("element is not in the order")
    idx = abs(int_det(_left_mult_matrix(A, x)))
    d = abs(np.linalg.det(multiblock_psi(x)))
    if abs(d * d - idx) > 1e-9 * idx:
        raise ArithmeticError(f"|det psi(x)|^2 = {d * d} disagrees with index {idx}")
    return idx


@dataclass(frozen=True)
class OrthogonalityCheck:
    lhs: float
    rhs: float
    defect: float


def orthogonality_check(A: CyclicAlgebraCode, x: FieldElement, y: FieldElement) -> OrthogonalityCheck:
    """||psi(x) + psi(u y)||^2 against ||psi(x)||^2 + ||psi(u y)||^2."""
    E = A.E
    zero = E.element([0] * E.degree)
    px = multiblock_psi(AlgebraElement(x, zero, A))
    puy = multiblock_psi(A.u * AlgebraElement(y, zero, A))
    lhs = float(np.linalg.norm(px + puy) ** 2)
    rhs = float(np.linalg.norm(px) ** 2 + np.linalg.norm(puy) ** 2)
    return OrthogonalityCheck(lhs, rhs, abs(lhs - rhs))


@dataclass(frozen=True)
class QOGrowthBounds:
    lower: float  # N_K (log M)^(k-1) with the center's invariants
    exponent: int  # k - 1
    upper_prefactor: str  # symbolic; not computed
    empirical_prefactor: float | None  # sup S(M) / (log M)^(k-1) over a measured curve


def qo_growth_bounds(A: CyclicAlgebraCode, M: float, n_r: int, curve: SumCurve | None = None) -> QOGrowthBounds:
    if n_r < 2:
        raise ScopeError("the order-code bounds need n_r >= 2")
    if M < math.e:
        raise ScopeError("radius must be at least e")
    k = A.k
    lower = unit_density_constant(A.K, k) * math.log(M) ** (k - 1)
    emp = None
    if curve is not None:
        emp = float(max(s.value / math.log(s.M) ** (k - 1) for s in curve.samples if s.M > 1))
    return QOGrowthBounds(lower, k - 1, f"zeta_Lambda({n_r}) * [Lambda^* : O_K^*]", emp)


def central_unit_count(A: CyclicAlgebraCode, M: float) -> int:
    """|psi(O_K^*) inside B(M)| with each central unit placed as tau_i(eps) I_2 blocks."""
    return count_units_in_ball(A.K, M / math.sqrt(2.0))


def unit_translate_count(A: CyclicAlgebraCode, L: MatrixLattice, x: AlgebraElement, M: float) -> int:
    """|psi(x) psi(O_K^*) inside B(M)|: central unit multiples of x in the ball."""
    coords = np.array([[int(c) for c in x.order_coords()]])
    e = L.units.energies(coords)
    return A.K.roots_of_unity * int(count_translates(e, L.units.log_units, float(M) ** 2)[0])


def coset_constant(A: CyclicAlgebraCode, L: MatrixLattice, x: AlgebraElement, M: float) -> float:
    """Smallest c with |x O_K^* in B(M)| <= |O_K^* in B(c M)|, by bisection."""
    target = unit_translate_count(A, L, x, M)
    if target == 0:
        return 0.0
    lo, hi = 0.0, 1.0
    while central_unit_count(A, hi * M) < target:
        hi *= 2
    for _ in range(60):
        mid = (lo + hi) / 2
        if central_unit_count(A, mid * M) >= target:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class DivisionCertificate:
    gamma_values: tuple[float, ...]
    ramified_at_all_real_places: bool
    probe_radius: float | None = None
    probe_min_abs_det: float | None = None

    @property
    def holds(self) -> bool:
        ok = self.ramified_at_all_real_places
        if self.probe_min_abs_det is not None:
            ok = ok and self.probe_min_abs_det >= 1 - 1e-9
        return ok


def division_certificate(A: CyclicAlgebraCode, probe_radius: float | None = None) -> DivisionCertificate:
    """Non-splitting check.

    With E = K(sqrt(-1)) the algebra is the quaternion algebra (-1, gamma)_K,
    which is ramified at every real place where gamma < 0; a quaternion
    algebra ramified somewhere is a division algebra.  An optional probe
    enumerates the order lattice and records the minimal |det|.
    """
    from .lattice import min_determinant_in_ball

    i_sq = A.F.element([0, 1]) * A.F.element([0, 1]) if A.F.degree == 2 else None
    minus_one = i_sq is not None and i_sq == -1
    g = tuple(float(v) for v in A.gamma_values)
    ram = bool(minus_one and all(v < 0 for v in g))
    md = None
    if probe_radius is not None:
        md = min_determinant_in_ball(order_lattice(A), probe_radius).value
    return DivisionCertificate(g, ram, probe_radius, md)


# ---------------------------------------------------------------------------
# catalog


@functools.lru_cache(maxsize=None)
def _algebra_records() -> dict[str, dict]:
    text = resources.files("invdet").joinpath("data/algebras.json").read_text(encoding="utf-8")
    return {r["name"]: r for r in json.loads(text)["algebras"]}


def algebra_names() -> list[str]:
    return list(_algebra_records())


def algebra_from_record(rec: dict) -> CyclicAlgebraCode:
    try:
        basis = rec.get("order_basis")
        return CyclicAlgebraCode(
            name=rec["name"],
            F=catalog_lookup(rec["F"]),
            K=catalog_lookup(rec["K"]),
            E=catalog_lookup(rec["E"]),
            gamma=tuple(int(c) for c in rec["gamma"]),
            K_in_E=tuple(tuple(int(c) for c in r) for r in rec["K_in_E"]),
            F_in_E=tuple(tuple(int(c) for c in r) for r in rec["F_in_E"]),
            order_basis=None if basis is None else tuple(tuple(Fraction(c) for c in r) for r in basis),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptedCatalogError(f"malformed algebra record {rec.get('name')!r}: {exc}") from exc


@functools.lru_cache(maxsize=None)
def algebra_lookup(name: str) -> CyclicAlgebraCode:
    recs = _algebra_records()
    if name not in recs:
        raise CatalogMissError(f"unknown algebra {name!r}; catalog has {', '.join(recs)}")
    return algebra_from_record(recs[name])
