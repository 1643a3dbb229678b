import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invdet.analysis import bound_report, compare_growth, fit_log_power, verdict
from invdet.curves import Sample, SumCurve
from invdet.errors import GridMismatchError, ScopeError, SpanError
from invdet.numberfield import catalog_lookup


def _curve(p, c=2.0, ts=(2.0, 3.0, 4.0, 5.0, 6.0), m=2.0, label="synthetic"):
    return SumCurve(label, m, tuple(Sample(math.exp(t), c * t**p, i + 1) for i, t in enumerate(ts)))


@given(st.floats(0.0, 4.0), st.floats(0.1, 100.0))
@settings(max_examples=50, deadline=None)
def test_fit_recovers_exact_power(p, c):
    fit = fit_log_power(_curve(p, c))
    assert fit.exponent == pytest.approx(p, abs=1e-9)
    assert fit.prefactor == pytest.approx(c, rel=1e-9)
    assert fit.residual_rms < 1e-9


def test_fit_span_errors():
    with pytest.raises(SpanError):
        fit_log_power(_curve(1.0, ts=(2.0, 3.0, 4.0)))
    with pytest.raises(SpanError):
        fit_log_power(_curve(1.0, ts=(3.0, 3.5, 4.0, 4.5)))
    assert fit_log_power(_curve(1.0, ts=(3.0, 3.5, 4.0, 4.5)), min_span=1.5).exponent == pytest.approx(1.0)


@given(st.floats(0.0, 3.0), st.floats(0.0, 3.0))
@settings(max_examples=30, deadline=None)
def test_compare_antisymmetric(p, q):
    a, b = _curve(p, 1.0), _curve(q, 3.0)
    ab, ba = compare_growth(a, b), compare_growth(b, a)
    assert ab.qo_fit.exponent == pytest.approx(ba.nf_fit.exponent)
    np.testing.assert_allclose(np.array(ab.ratio_trend) * np.array(ba.ratio_trend), 1.0, rtol=1e-12)
    if q > p + 1e-6:
        assert ab.ratio_increasing and not ba.ratio_increasing


def test_compare_grid_mismatch():
    with pytest.raises(GridMismatchError):
        compare_growth(_curve(1.0), _curve(1.0, ts=(2.0, 3.0, 4.0, 5.0, 6.5)))
    with pytest.raises(GridMismatchError):
        compare_growth(_curve(1.0), _curve(1.0, m=4.0))


@given(st.floats(0.1, 10.0), st.floats(0.1, 10.0), st.floats(0.1, 10.0), st.floats(0.0, 0.9), st.floats(0.0, 0.09))
@settings(max_examples=100, deadline=None)
def test_verdict_slack_monotone(meas, lo, width, s, ds):
    up = lo + width
    if verdict(meas, lo, up, s):
        assert verdict(meas, lo, up, s + ds)


def test_verdict_window():
    assert verdict(0.5, 1.0, 2.0, 0.5) and not verdict(0.49, 1.0, 2.0, 0.5)
    assert verdict(4.0, 1.0, 2.0, 0.5) and not verdict(4.01, 1.0, 2.0, 0.5)
    assert verdict(100.0, 1.0, None, 0.0)
    with pytest.raises(ValueError):
        verdict(1.0, 1.0, 1.0, 1.0)


def test_bound_report_gaussian():
    rep = bound_report(catalog_lookup("GAUSSIAN"), 4, [math.exp(4), math.exp(5)])
    assert rep.bound == "complex_nr_gt_1" and rep.passed
    for r in rep.rows:
        assert r.lower <= r.measured <= r.upper
    buf = io.StringIO()
    rep.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "label,bound,M,log_M,series,value"
    assert len(lines) == 1 + 3 * 2


def test_bound_report_scope(hamilton):
    with pytest.raises(ScopeError):
        bound_report(catalog_lookup("REAL_QUADRATIC_5"), 0.5, [100.0])
    with pytest.raises(ScopeError):
        bound_report(hamilton, 2, [100.0])
    with pytest.raises(ScopeError):
        bound_report(catalog_lookup("GAUSSIAN"), 4, [1.0])


def test_pre_asymptotic_flag():
    rep = bound_report(catalog_lookup("REAL_QUADRATIC_5"), 2, [math.exp(3), math.exp(4)])
    assert [r.pre_asymptotic for r in rep.rows] == [True, False]


def test_pre_asymptotic_threshold_scales_with_size():
    from invdet.analysis import pre_asymptotic

    assert pre_asymptotic(math.exp(3.9), 1) and not pre_asymptotic(math.exp(4.0), 1)
    assert pre_asymptotic(math.exp(3.9), 2) and not pre_asymptotic(math.exp(4.0), 2)
    assert pre_asymptotic(math.exp(7.9), 4) and not pre_asymptotic(math.exp(8.0), 4)
