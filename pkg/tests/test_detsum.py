import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import box_scan, box_scan_sum

from invdet.curves import Sample, SumCurve
from invdet.detsum import (
    OrbitTable,
    choose_method,
    default_det_cap,
    inverse_det_sum,
    normalized_inverse_det_sum,
    sum_curve,
    union_bound,
    voronoi_height,
)
from invdet.errors import BudgetExceededError, ScopeError
from invdet.lattice import canonical_embedding_lattice, normalization_factor, scaled
from invdet.numberfield import catalog_lookup
from invdet.qoalgebra import algebra_lookup, order_lattice


@pytest.fixture(scope="module")
def zi():
    return canonical_embedding_lattice(catalog_lookup("GAUSSIAN"))


@pytest.fixture(scope="module")
def q5():
    return canonical_embedding_lattice(catalog_lookup("REAL_QUADRATIC_5"))


@pytest.fixture(scope="module")
def z5():
    return canonical_embedding_lattice(catalog_lookup("CYCLOTOMIC_5"))


def test_gaussian_small_ball(zi):
    assert inverse_det_sum(zi, 2, 2).value == 7.0
    assert inverse_det_sum(zi, 2, 4).value == 5.25
    s = inverse_det_sum(zi, 2, 2)
    assert s.point_count == 12 and s.min_abs_det == 1.0


@pytest.mark.parametrize("name", ["GAUSSIAN", "REAL_QUADRATIC_5", "CYCLOTOMIC_5"])
@pytest.mark.parametrize("m", [1.0, 2.0, 3.5])
def test_direct_matches_box_scan(name, m):
    L = canonical_embedding_lattice(catalog_lookup(name))
    for M in (2.0, 4.0, 6.0):
        value, count = box_scan_sum(L, M, m)
        s = inverse_det_sum(L, M, m)
        assert s.point_count == count
        assert s.value == pytest.approx(value, rel=1e-9)


def test_algebra_direct_matches_box_scan(alamouti, hamilton):
    for A, M in ((alamouti, 6.0), (hamilton, 3.0)):
        L = order_lattice(A)
        value, count = box_scan_sum(L, M, 4)
        s = inverse_det_sum(L, M, 4)
        assert s.point_count == count
        assert s.value == pytest.approx(value, rel=1e-9)


def test_untagged_lattice_uses_numeric_dets(q5):
    L = scaled(q5, 1.0)
    assert L.tag is None
    assert inverse_det_sum(L, 8, 2).value == pytest.approx(inverse_det_sum(q5, 8, 2).value, rel=1e-9)


def test_thread_and_partition_invariance(z5):
    a = inverse_det_sum(z5, 12, 2, threads=1)
    for t in (2, 3, 7):
        b = inverse_det_sum(z5, 12, 2, threads=t)
        assert b.value == a.value  # bit-identical
        assert b.point_count == a.point_count


def test_curve_equals_single_radius_sums(z5):
    radii = [3.0, 5.0, 8.0]
    c = sum_curve(z5, radii, 2, method="direct")
    for M, v in zip(radii, c.values):
        assert v == inverse_det_sum(z5, M, 2).value


@given(st.lists(st.floats(1.0, 10.0), min_size=2, max_size=5, unique=True))
@settings(max_examples=20, deadline=None)
def test_curve_monotone(radii):
    L = canonical_embedding_lattice(catalog_lookup("REAL_QUADRATIC_5"))
    radii = sorted(radii)
    if any(b - a < 1e-6 for a, b in zip(radii, radii[1:])):
        return
    c = sum_curve(L, radii, 2, method="direct")
    assert np.all(np.diff(c.values) >= 0)
    assert np.all(np.diff(c.counts) >= 0)


def test_normalized_sum(q5):
    f = normalization_factor(q5, 2)
    want = f.scale * inverse_det_sum(q5, 10 * f.radius_factor, 2).value
    assert normalized_inverse_det_sum(q5, 10, 2) == pytest.approx(want, rel=1e-12)
    legacy = normalized_inverse_det_sum(q5, 10, 2, legacy=True)
    assert legacy == pytest.approx(f.scale * inverse_det_sum(q5, 10, 2).value, rel=1e-12)


def test_normalized_sum_is_scale_invariant(z5):
    # S~ of tL equals S~ of L: both reduce to the same covolume-one lattice
    t = 1.7
    a = normalized_inverse_det_sum(z5, 6, 2)
    b = normalized_inverse_det_sum(scaled(z5, t), 6, 2)
    assert b == pytest.approx(a, rel=1e-9)


def test_union_bound(zi):
    assert union_bound(zi, 1, 1) == inverse_det_sum(zi, 2, 2).value
    assert union_bound(zi, 1, 2) == 5.25
    with pytest.raises(ScopeError):
        union_bound(zi, 1, 0)


def test_scope_and_budget(zi):
    with pytest.raises(ScopeError):
        inverse_det_sum(zi, 2, 0)
    with pytest.raises(BudgetExceededError):
        inverse_det_sum(zi, 1e6, 2)
    with pytest.raises(ValueError):
        sum_curve(zi, [3.0, 2.0], 2)


def _filtered_oracle(L, M, m, cap):
    pts = box_scan(L, M)
    dets = [d for _, d in pts.values() if d <= cap * (1 + 1e-9)]
    return math.fsum(d**-m for d in dets), len(dets)


@pytest.mark.parametrize(
    "maker,M,cap",
    [
        (lambda: canonical_embedding_lattice(catalog_lookup("REAL_QUADRATIC_5")), 12.0, 30.0),
        (lambda: canonical_embedding_lattice(catalog_lookup("CYCLOTOMIC_5")), 7.0, 50.0),
        (lambda: order_lattice(algebra_lookup("ALAMOUTI")), 8.0, 20.0),
    ],
)
def test_orbit_matches_filtered_box_scan(maker, M, cap):
    L = maker()
    table = OrbitTable.build(L, cap, M)
    s = table.evaluate(M, 2)
    value, count = _filtered_oracle(L, M, 2, cap)
    assert s.point_count == count
    assert s.value == pytest.approx(value, rel=1e-9)


@pytest.mark.parametrize(
    "maker,M",
    [
        (lambda: canonical_embedding_lattice(catalog_lookup("CYCLOTOMIC_5")), 10.0),
        (lambda: order_lattice(algebra_lookup("HAMILTON_SQRT5")), 4.0),
    ],
)
def test_orbit_equals_direct_when_exact(maker, M):
    L = maker()
    n = L.matrix_size
    cap = (M * M / n) ** (n / 2)
    o = inverse_det_sum(L, M, 4, method="orbit", det_cap=cap)
    d = inverse_det_sum(L, M, 4, method="direct")
    assert o.exact
    assert o.value == d.value
    assert o.point_count == d.point_count


def test_orbit_truncation_flags(z5):
    s = inverse_det_sum(z5, 200.0, 2, method="orbit", det_cap=100.0)
    assert not s.exact and s.det_cap == 100.0
    assert 0 <= s.truncation_delta < s.value


def test_orbit_needs_tag(q5):
    with pytest.raises(ScopeError):
        OrbitTable.build(scaled(q5, 1.0), 10.0, 10.0)


def test_voronoi_height():
    lam = 2 * np.log(np.array([[(1 + 5**0.5) / 2, (5**0.5 - 1) / 2]]))
    # one-dimensional cell: v = (t, -t) with |t| <= lambda / 2
    assert voronoi_height(lam) == pytest.approx(lam[0, 0] / 2, rel=1e-9)


def test_method_choice(zi, z5):
    assert choose_method(zi, 1000.0) == "direct"
    assert choose_method(z5, 10.0) == "direct"
    assert choose_method(z5, math.exp(8)) == "orbit"
    assert default_det_cap(z5, 10.0) == pytest.approx((100 / 2) ** 1, rel=1e-12)


def test_curve_validation_and_csv():
    with pytest.raises(ValueError):
        SumCurve("x", 2, (Sample(2.0, 1.0, 1), Sample(1.0, 2.0, 2)))
    with pytest.raises(ValueError):
        SumCurve("x", 2, (Sample(1.0, 2.0, 1), Sample(2.0, 1.0, 2)))
    c = SumCurve("x", 2.0, (Sample(1.0, 0.5, 1, 1.0),))
    buf = io.StringIO()
    c.write_csv(buf)
    assert buf.getvalue() == "M,m,value,point_count,min_abs_det\n1.0,2.0,0.5,1,1.0\n"
