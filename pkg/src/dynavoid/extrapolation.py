"""Polynomial extrapolation over short sample windows and first-crossing search.

At most four timestamped samples are kept per quantity, so the interpolating
polynomial is at most cubic. Evaluation uses Neville's scheme in time
coordinates shifted to the latest sample, which keeps the arithmetic well
conditioned for the few-second horizons the planner asks about.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

MAX_SAMPLES = 4
BISECTION_TOL = 1e-6


class EmptySeries(ValueError):
    pass


@dataclass(frozen=True)
class SampleSeries:
    times: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValueError("times and values differ in length")
        if len(self.times) > MAX_SAMPLES:
            raise ValueError(f"at most {MAX_SAMPLES} samples, got {len(self.times)}")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("sample times must be strictly increasing")

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]]) -> SampleSeries:
        pairs = list(pairs)
        return cls(tuple(float(t) for t, _ in pairs), tuple(float(v) for _, v in pairs))

    def __len__(self):
        return len(self.times)

    @property
    def t_last(self) -> float:
        if not self.times:
            raise EmptySeries("series has no samples")
        return self.times[-1]


def _neville(times, values, t_query):
    # works elementwise for scalar or ndarray queries
    t0 = times[-1]
    ts = [t - t0 for t in times]
    x = t_query - t0
    p = list(values)
    n = len(ts)
    for level in range(1, n):
        for i in range(n - level):
            j = i + level
            p[i] = ((x - ts[j]) * p[i] + (ts[i] - x) * p[i + 1]) / (ts[i] - ts[j])
    return p[0]


def extrapolate(series: SampleSeries, t_query):
    """Value at ``t_query`` of the interpolating polynomial through ``series``.

    The degree is ``len(series) - 1``, so four samples give a cubic and a
    single sample a constant. ``t_query`` may be a float or a numpy array.
    """
    if len(series) == 0:
        raise EmptySeries("cannot extrapolate an empty series")
    return _neville(series.times, series.values, t_query)


def first_crossing_time(
    series: SampleSeries,
    threshold: float,
    horizon: float,
    step: float = 0.01,
) -> Optional[float]:
    """Earliest time the extrapolated series drops to ``threshold`` or below.

    Looks no further than ``horizon`` seconds past the latest sample. The
    window is scanned at ``step`` spacing and the first crossing refined by
    bisection to 1e-6 s. Returns the latest sample time itself when the
    series is already at or below the threshold, and None when no scanned
    point crosses.
    """
    if len(series) == 0:
        raise EmptySeries("cannot search an empty series")
    if horizon <= 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    t_last = series.t_last
    if _neville(series.times, series.values, t_last) <= threshold:
        return t_last

    n_steps = max(1, int(np.ceil(horizon / step - 1e-9)))
    grid = t_last + np.minimum(np.arange(1, n_steps + 1) * step, horizon)
    below = np.nonzero(_neville(series.times, series.values, grid) <= threshold)[0]
    if below.size == 0:
        return None
    k = int(below[0])
    hi = float(grid[k])
    lo = float(grid[k - 1]) if k > 0 else t_last
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if _neville(series.times, series.values, mid) <= threshold:
            hi = mid
        else:
            lo = mid
    return hi
