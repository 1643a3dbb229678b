import io
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invdet.errors import ScopeError
from invdet.numberfield import catalog_lookup
from invdet.units import (
    count_translates,
    count_units_in_ball,
    enumerate_units_in_ball,
    log_unit_matrix,
    translates_in_ball,
    unit_ball_count,
    unit_count_curve,
)


def _power_scan(K, M, kmax):
    """Units w * prod eps_j^k_j in the ball, by direct products of embeddings."""
    vals = np.array([u.embed() for u in K.units])
    n = 0
    for k in itertools.product(range(-kmax, kmax + 1), repeat=K.unit_rank):
        v = np.prod(vals ** np.array(k)[:, None], axis=0) if K.unit_rank else np.ones(vals.shape[1] if len(vals) else 1)
        if np.sum(np.abs(v) ** 2) <= M * M * (1 + 1e-9):
            n += 1
    return n * K.roots_of_unity


def test_golden_ratio_closed_form(qsqrt5):
    phi = (1 + math.sqrt(5)) / 2
    for M in (10, 100, 1000, 10**4):
        want = 2 * sum(1 for k in range(-60, 61) if phi ** (2 * k) + phi ** (-2 * k) <= M * M)
        assert count_units_in_ball(qsqrt5, M) == want
    assert count_units_in_ball(qsqrt5, 10) == 18


@pytest.mark.parametrize("name,M,kmax", [("CYCLOTOMIC_5", 50.0, 40), ("BIQUADRATIC", 30.0, 40), ("CYCLOTOMIC_20", 12.0, 8)])
def test_count_matches_power_scan(name, M, kmax):
    K = catalog_lookup(name)
    assert count_units_in_ball(K, M) == _power_scan(K, M, kmax)


def test_enumerated_units_exact(zeta5):
    us = enumerate_units_in_ball(zeta5, 20.0)
    assert len(us) == len(set(us)) == count_units_in_ball(zeta5, 20.0)
    for u in us:
        assert abs(u.norm()) == 1
        assert np.sum(np.abs(u.embed()) ** 2) <= 400 * (1 + 1e-9)


def test_rank_zero_field(gaussian):
    assert count_units_in_ball(gaussian, 1.0) == 4
    assert count_units_in_ball(gaussian, 100.0) == 4


def test_scope(qsqrt5):
    with pytest.raises(ScopeError):
        enumerate_units_in_ball(qsqrt5, 0.5)
    with pytest.raises(ScopeError):
        unit_count_curve(qsqrt5, [2.0, 10.0])


@given(st.floats(1.0, 1e4), st.floats(0.0, 1e4))
@settings(max_examples=50, deadline=None)
def test_count_monotone(M, dM):
    K = catalog_lookup("CYCLOTOMIC_5")
    assert count_units_in_ball(K, M) <= count_units_in_ball(K, M + dM)


@given(st.lists(st.floats(0.01, 50.0), min_size=2, max_size=2), st.floats(0.1, 1e5))
@settings(max_examples=200, deadline=None)
def test_closed_form_matches_scan(e, T):
    lam = log_unit_matrix(catalog_lookup("REAL_QUADRATIC_5"))
    assert count_translates(np.array([e]), lam, T)[0] == len(translates_in_ball(e, lam, T))


def test_curve_slope(qsqrt5):
    c = unit_count_curve(qsqrt5, [10, 100, 1000, 10**4])
    assert c.curve.counts.tolist()[0] == 18
    assert abs(c.fitted_slope - c.density_constant) <= 0.1 * c.density_constant
    assert np.all(np.abs(c.residuals) <= 6)
    buf = io.StringIO()
    c.write_csv(buf)
    assert buf.getvalue().splitlines()[0] == "M,count,predicted,residual"


def test_unit_ball_count_keep(qsqrt5):
    r = unit_ball_count(qsqrt5, 10.0, keep_units=True)
    assert r.count == 18 and len(r.units) == 18
    assert r.residual == pytest.approx(18 - r.predicted)
