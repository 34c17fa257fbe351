import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynavoid.extrapolation import EmptySeries, SampleSeries, extrapolate, first_crossing_time


def test_cubic_exact():
    s = SampleSeries.from_pairs([(0, 0), (1, 1), (2, 8), (3, 27)])
    assert extrapolate(s, 4) == pytest.approx(64.0, abs=1e-12)


def test_constant_series():
    s = SampleSeries.from_pairs([(0, 5), (1, 5), (2, 5), (3, 5)])
    assert extrapolate(s, 10) == pytest.approx(5.0, abs=1e-12)


def test_linear_fallback_two_samples():
    s = SampleSeries.from_pairs([(0, 0), (1, 2)])
    assert extrapolate(s, 3) == pytest.approx(6.0, abs=1e-12)


def test_single_sample_is_constant():
    assert extrapolate(SampleSeries((2.0,), (7.0,)), 9.0) == 7.0


def test_empty_series():
    with pytest.raises(EmptySeries):
        extrapolate(SampleSeries((), ()), 1.0)
    with pytest.raises(EmptySeries):
        SampleSeries((), ()).t_last


@pytest.mark.parametrize("times", [(0, 0, 1), (1, 0), (0, 1, 2, 3, 4)])
def test_bad_series_rejected(times):
    with pytest.raises(ValueError):
        SampleSeries(tuple(map(float, times)), tuple(0.0 for _ in times))


def test_array_query():
    s = SampleSeries.from_pairs([(0, 0), (1, 1), (2, 8), (3, 27)])
    t = np.array([3.5, 4.0, 5.0])
    np.testing.assert_allclose(extrapolate(s, t), t ** 3, rtol=1e-12)


@given(
    st.lists(st.floats(-10, 10), min_size=4, max_size=4),
    st.floats(0.0, 100.0),
    st.floats(0.05, 0.5),
    st.floats(0.0, 5.0),
)
def test_random_cubic_exact(coeffs, t0, dt, ahead):
    times = tuple(t0 + k * dt for k in range(4))
    poly = np.polynomial.Polynomial(coeffs, domain=[t0, t0 + 1], window=[0, 1])
    s = SampleSeries(times, tuple(float(poly(t)) for t in times))
    tq = times[-1] + ahead
    want = float(poly(tq))
    got = float(extrapolate(s, tq))
    assert abs(got - want) <= 1e-9 * max(1.0, abs(want)) + 1e-9 * max(1.0, max(map(abs, coeffs))) * 1e3


@given(st.integers(1, 4), st.floats(-5, 5), st.floats(-5, 5))
def test_degree_follows_sample_count(n, c0, c1):
    # a line through any 1..4 samples is reproduced exactly by degree n - 1 >= 1,
    # and a single sample gives the constant
    times = tuple(0.1 * k for k in range(n))
    s = SampleSeries(times, tuple(c0 + c1 * t for t in times))
    want = c0 if n == 1 else c0 + c1 * 2.0
    assert extrapolate(s, 2.0) == pytest.approx(want, abs=1e-9)


def test_crossing_linear_example():
    times = (0.0, 0.1, 0.2, 0.3)
    s = SampleSeries(times, tuple(10 - 2 * t for t in times))
    t = first_crossing_time(s, 0.55, 10.0)
    assert t == pytest.approx(4.725, abs=1e-6)


def test_crossing_never():
    times = (0.0, 0.1, 0.2, 0.3)
    s = SampleSeries(times, tuple(1 + t for t in times))
    assert first_crossing_time(s, 0.5, 5.0) is None


def test_crossing_already_below():
    s = SampleSeries((0.0, 0.1, 0.2, 0.3), (0.4, 0.4, 0.4, 0.4))
    assert first_crossing_time(s, 0.55, 5.0) == 0.3


def test_crossing_beyond_horizon():
    times = (0.0, 0.1, 0.2, 0.3)
    s = SampleSeries(times, tuple(10 - 2 * t for t in times))
    assert first_crossing_time(s, 0.55, 4.0) is None


def test_crossing_bad_horizon():
    with pytest.raises(ValueError):
        first_crossing_time(SampleSeries((0.0,), (1.0,)), 0.5, 0.0)


@given(st.floats(0.5, 20.0), st.floats(0.1, 3.0), st.floats(0.0, 0.4))
def test_crossing_matches_closed_form(d0, speed, threshold):
    times = (0.0, 0.1, 0.2, 0.3)
    s = SampleSeries(times, tuple(d0 - speed * t for t in times))
    t = first_crossing_time(s, threshold, 5.0)
    exact = (d0 - threshold) / speed
    if exact <= 0.3:
        assert t == 0.3
    elif exact > 0.3 + 5.0 + 1e-6:
        assert t is None
    elif t is not None:
        assert t == pytest.approx(exact, abs=2e-6)


@given(st.lists(st.floats(-5, 5), min_size=4, max_size=4), st.floats(-3, 3))
def test_crossing_is_first(values, threshold):
    s = SampleSeries((0.0, 0.1, 0.2, 0.3), tuple(values))
    t = first_crossing_time(s, threshold, 5.0)
    grid = 0.3 + np.arange(0, 501) * 0.01
    v = extrapolate(s, grid)
    if t is None:
        assert np.all(v > threshold)
        return
    # at the crossing the value is at or below threshold (up to the bisection width)
    assert extrapolate(s, t) <= threshold + 1e-3 * max(1.0, float(np.max(np.abs(v))))
    # and no earlier grid point was below
    assert np.all(v[grid < t - 1e-6] > threshold)
