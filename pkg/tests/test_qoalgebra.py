import copy
import json
from fractions import Fraction
from importlib import resources

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invdet.detsum import inverse_det_sum
from invdet.errors import CatalogMissError, CorruptedCatalogError, DegenerateOrderError, NotInOrderError, ScopeError, ZeroElementError
from invdet.numberfield import int_det
from invdet.qoalgebra import (
    algebra_from_record,
    algebra_lookup,
    algebra_names,
    central_unit_count,
    coset_constant,
    division_certificate,
    multiblock_psi,
    order_lattice,
    orthogonality_check,
    phi,
    principal_ideal_index,
    qo_growth_bounds,
)

coords8 = st.lists(st.integers(-3, 3), min_size=8, max_size=8)
coords4 = st.lists(st.integers(-3, 3), min_size=4, max_size=4)


def _records():
    text = resources.files("invdet").joinpath("data/algebras.json").read_text()
    return {r["name"]: r for r in json.loads(text)["algebras"]}


def test_catalog():
    assert algebra_names() == ["HAMILTON_SQRT5", "ALAMOUTI"]
    with pytest.raises(CatalogMissError):
        algebra_lookup("NOPE")


def test_worked_element(hamilton):
    x = hamilton.one + hamilton.u
    np.testing.assert_allclose(phi(x), [[1, 1], [-1, 1]], atol=1e-12)
    assert abs(np.linalg.det(multiblock_psi(x))) == pytest.approx(4.0)
    assert principal_ideal_index(hamilton, x) == 16
    assert principal_ideal_index(hamilton, hamilton.one * 2) == 256


def test_generator_relations(hamilton):
    A = hamilton
    u = A.u
    assert u * u == A.one * -1
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = A.E.element(rng.integers(-4, 5, 4).tolist())
        zero = A.E.element([0] * 4)
        ex = type(u)(x, zero, A)
        assert u * ex == type(u)(x.conj(), zero, A) * u


@given(coords8, coords8, coords8)
@settings(max_examples=60, deadline=None)
def test_ring_axioms(a, b, c):
    A = algebra_lookup("HAMILTON_SQRT5")
    x, y, z = A.from_coords(a), A.from_coords(b), A.from_coords(c)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z


@given(coords8, coords8)
@settings(max_examples=200, deadline=None)
def test_psi_is_homomorphism(a, b):
    A = algebra_lookup("HAMILTON_SQRT5")
    x, y = A.from_coords(a), A.from_coords(b)
    px, py = multiblock_psi(x), multiblock_psi(y)
    np.testing.assert_allclose(multiblock_psi(x * y), px @ py, atol=1e-9)
    np.testing.assert_allclose(multiblock_psi(x + y), px + py, atol=1e-12)


@given(coords4, coords4)
@settings(max_examples=100, deadline=None)
def test_alamouti_homomorphism(a, b):
    A = algebra_lookup("ALAMOUTI")
    x, y = A.from_coords(a), A.from_coords(b)
    np.testing.assert_allclose(multiblock_psi(x * y), multiblock_psi(x) @ multiblock_psi(y), atol=1e-9)


@given(coords8)
@settings(max_examples=60, deadline=None)
def test_reduced_norm_is_block_determinant(a):
    A = algebra_lookup("HAMILTON_SQRT5")
    x = A.from_coords(a)
    n = x.reduced_norm()
    assert n.conj() == n  # lies in the center
    psi = multiblock_psi(x)
    vals = n.embed()
    for i in range(A.k):
        blk = psi[2 * i : 2 * i + 2, 2 * i : 2 * i + 2]
        assert np.linalg.det(blk) == pytest.approx(vals[i], abs=1e-9)


def _right_mult_index(A, x):
    rows = [[int(c) for c in A.order_coords(b * x)] for b in A.basis_elements()]
    return abs(int_det(rows))


@given(coords8)
@settings(max_examples=100, deadline=None)
def test_index_identity(a):
    A = algebra_lookup("HAMILTON_SQRT5")
    x = A.from_coords(a)
    if x.is_zero:
        return
    idx = principal_ideal_index(A, x)
    assert round(abs(np.linalg.det(multiblock_psi(x))) ** 2) == idx
    assert _right_mult_index(A, x) == idx


def test_index_errors(hamilton):
    with pytest.raises(ZeroElementError):
        principal_ideal_index(hamilton, hamilton.one * 0)
    with pytest.raises(NotInOrderError):
        principal_ideal_index(hamilton, hamilton.one * Fraction(1, 2))


@given(coords4, coords4)
@settings(max_examples=100, deadline=None)
def test_orthogonality(a, b):
    A = algebra_lookup("HAMILTON_SQRT5")
    r = orthogonality_check(A, A.E.element(a), A.E.element(b))
    assert r.defect <= 1e-12 * max(r.rhs, 1.0)


def test_min_det_is_one(hamilton):
    s = inverse_det_sum(order_lattice(hamilton), 6.0, 4)
    assert s.min_abs_det == 1.0


def test_central_unit_floor(hamilton):
    L = order_lattice(hamilton)
    for M in (3.0, 5.0, 7.0):
        assert inverse_det_sum(L, M, 4).value >= central_unit_count(hamilton, M)
    assert central_unit_count(hamilton, 2.0) == 2  # +-1 only: ||psi(1)|| = 2


def test_coset_constant_stable(hamilton):
    L = order_lattice(hamilton)
    x = hamilton.one + hamilton.u
    cs = [coset_constant(hamilton, L, x, M) for M in (10.0, 100.0, 1e3, 1e4, 1e5)]
    assert 0 < min(cs) and max(cs) / min(cs) < 3


def test_growth_bounds_scope(hamilton):
    with pytest.raises(ScopeError):
        qo_growth_bounds(hamilton, 10.0, 1)
    with pytest.raises(ScopeError):
        qo_growth_bounds(hamilton, 2.0, 2)
    b = qo_growth_bounds(hamilton, 100.0, 2)
    assert b.exponent == 1 and b.lower > 0


def test_division_certificate(hamilton, alamouti):
    for A in (hamilton, alamouti):
        c = division_certificate(A)
        assert c.ramified_at_all_real_places and c.holds
    probe = division_certificate(alamouti, probe_radius=6.0)
    assert probe.probe_min_abs_det == 1.0 and probe.holds


def test_lattice_volumes(hamilton, alamouti):
    assert order_lattice(hamilton).volume == pytest.approx(400.0, rel=1e-9)
    assert order_lattice(alamouti).volume == pytest.approx(4.0, rel=1e-9)


def test_corrupted_records():
    rec = copy.deepcopy(_records()["HAMILTON_SQRT5"])
    bad = dict(rec, gamma=[0, 0])
    with pytest.raises(CorruptedCatalogError):
        algebra_from_record(bad)
    bad = dict(rec, K_in_E=[[1, 0, 0, 0], [0, 1, 0, 0]])
    with pytest.raises(CorruptedCatalogError):
        algebra_from_record(bad)
    basis = [[Fraction(int(i == j)) for j in range(8)] for i in range(8)]
    basis[1] = [Fraction(0), Fraction(1, 2)] + [Fraction(0)] * 6
    with pytest.raises(DegenerateOrderError):
        algebra_from_record(dict(rec, order_basis=[[str(c) for c in r] for r in basis]))
    with pytest.raises(CorruptedCatalogError):
        algebra_from_record({"name": "broken"})
