"""Randomly moving circular obstacles on a bounded rectangular map.

Each obstacle follows a chain of quadratic segments. A segment ends when the
obstacle would leave the map, when its speed would exceed the cap, or after a
fixed re-draw cadence; the next segment starts where the previous one ended
with a fresh random acceleration. At the map boundary the obstacle is
mirrored back inside (position reflected, normal velocity negated), so the
number of obstacles on the map never changes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import Point2, distance
from .planner import ObstacleView

logger = logging.getLogger(__name__)

MAX_DRAWS = 100
BOUNDARY_TOL = 1e-9


class ZeroArea(ValueError):
    pass


@dataclass(frozen=True)
class Bounds:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self):
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError(f"degenerate bounds {self}")

    @classmethod
    def spanning(cls, a: Point2, b: Point2) -> Bounds:
        return cls(min(a.x, b.x), min(a.y, b.y), max(a.x, b.x), max(a.y, b.y))

    def contains(self, p: Point2, slack: float = 0.0) -> bool:
        return (self.xmin - slack <= p.x <= self.xmax + slack
                and self.ymin - slack <= p.y <= self.ymax + slack)

    @property
    def area(self) -> float:
        return (self.xmax - self.xmin) * (self.ymax - self.ymin)


@dataclass(frozen=True)
class EnvConfig:
    bounds: Bounds = field(default_factory=lambda: Bounds(0.0, 0.0, 10.0, 10.0))
    n: int = 0
    V: float = 2.0
    A: float = 2.0
    r_obstacle: float = 0.3
    seed: int = 0
    n_max: int = 10
    # fresh acceleration at least this often (s)
    redraw_period: float = 2.0
    # obstacles are not spawned closer than this to the robot start (m)
    spawn_clearance: float = 2.0

    def __post_init__(self):
        if not 0 <= self.n <= self.n_max:
            raise ValueError(f"obstacle count {self.n} outside [0, {self.n_max}]")
        if not (self.V > 0 and self.A > 0):
            raise ValueError("V and A must be positive")
        if not self.r_obstacle > 0:
            raise ValueError("r_obstacle must be positive")
        if not self.redraw_period > 0:
            raise ValueError("redraw_period must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class QuadraticTrajectory:
    """x(t) = a0x + a1x*s + a2x*s**2 with s = t - t_start (same for y)."""

    a0x: float
    a1x: float
    a2x: float
    a0y: float
    a1y: float
    a2y: float
    t_start: float = 0.0
    t_end: float = math.inf
    # why the segment ends: "boundary", "speed", "redraw" or "none"
    end_reason: str = "none"

    def position(self, t: float) -> Point2:
        s = t - self.t_start
        return Point2(self.a0x + (self.a1x + self.a2x * s) * s,
                      self.a0y + (self.a1y + self.a2y * s) * s)

    def velocity(self, t: float) -> Point2:
        s = t - self.t_start
        return Point2(self.a1x + 2.0 * self.a2x * s, self.a1y + 2.0 * self.a2y * s)

    @property
    def acceleration(self) -> float:
        return 2.0 * math.hypot(self.a2x, self.a2y)


@dataclass(frozen=True)
class ObstacleState:
    id: int
    trajectory: QuadraticTrajectory
    r_obstacle: float
    # scripted obstacles follow their polynomial forever: no boundary or caps
    scripted: bool = False

    def __post_init__(self):
        if not self.r_obstacle > 0:
            raise ValueError("r_obstacle must be positive")

    def position(self, t: float) -> Point2:
        return self.trajectory.position(t)


def map_area(initial: Point2, target: Point2) -> float:
    return abs(target.x - initial.x) * abs(target.y - initial.y)


def obstacle_density(n: int, area: float) -> float:
    if not area > 0:
        raise ZeroArea(f"map area must be positive, got {area}")
    return n / area


def _speed_horizon(vx, vy, ax, ay, V) -> float:
    """Time until |v + a*s| reaches V (inf when never)."""
    aa = ax * ax + ay * ay
    if aa == 0.0:
        return math.inf
    va = vx * ax + vy * ay
    c = vx * vx + vy * vy - V * V
    disc = max(va * va - aa * c, 0.0)
    return max((-va + math.sqrt(disc)) / aa, 0.0)


def _axis_exit(p0, v, a2, lo, hi) -> float:
    """Earliest s > 0 at which p0 + v*s + a2*s**2 leaves [lo, hi]."""
    # already on a wall and heading out: the segment ends immediately
    out_lo = v < 0.0 or (v == 0.0 and a2 < 0.0)
    out_hi = v > 0.0 or (v == 0.0 and a2 > 0.0)
    if (p0 <= lo + BOUNDARY_TOL and out_lo) or (p0 >= hi - BOUNDARY_TOL and out_hi):
        return 0.0
    best = math.inf
    for bound in (lo, hi):
        c = p0 - bound
        if a2 == 0.0:
            roots = (-c / v,) if v != 0.0 else ()
        else:
            disc = v * v - 4.0 * a2 * c
            if disc < 0.0:
                continue
            sq = math.sqrt(disc)
            # numerically stable pair
            q = -0.5 * (v + math.copysign(sq, v)) if v != 0.0 else -0.5 * sq
            roots = (q / a2, c / q) if q != 0.0 else (0.0,)
        for s in roots:
            if s <= 1e-12 or s >= best:
                continue
            # only count crossings that actually leave the interval
            slope = v + 2.0 * a2 * s
            if (bound == hi and slope > 0.0) or (bound == lo and slope < 0.0):
                best = s
    return best


def _segment(start, vx, vy, ax2, ay2, t_start, bounds, V, redraw_period) -> QuadraticTrajectory:
    exit_s = min(_axis_exit(start.x, vx, ax2, bounds.xmin, bounds.xmax),
                 _axis_exit(start.y, vy, ay2, bounds.ymin, bounds.ymax))
    speed_s = _speed_horizon(vx, vy, 2.0 * ax2, 2.0 * ay2, V)
    horizon, reason = min((exit_s, "boundary"), (speed_s, "speed"), (redraw_period, "redraw"))
    return QuadraticTrajectory(start.x, vx, ax2, start.y, vy, ay2,
                               t_start, t_start + horizon, reason)


def sample_trajectory(
    rng: np.random.Generator,
    bounds: Bounds,
    start: Point2,
    V: float,
    A: float,
    duration_hint: float = 2.0,
    t_start: float = 0.0,
    velocity: Optional[Point2] = None,
    dt: float = 0.1,
) -> QuadraticTrajectory:
    """Draw one quadratic segment starting at ``start``.

    Without ``velocity`` the initial speed is uniform in [0, V] with a uniform
    direction. The acceleration magnitude is uniform in [0, A] with a uniform
    direction. Draws whose speed cap would be hit within ``dt`` are rejected;
    after MAX_DRAWS rejections the segment keeps its velocity with zero
    acceleration. ``duration_hint`` caps the segment length.
    """
    if V == 0.0:
        return QuadraticTrajectory(start.x, 0.0, 0.0, start.y, 0.0, 0.0, t_start, math.inf)
    if velocity is None:
        speed = rng.uniform(0.0, V)
        heading = rng.uniform(0.0, 2.0 * math.pi)
        vx, vy = speed * math.cos(heading), speed * math.sin(heading)
    else:
        vx, vy = velocity.x, velocity.y
        speed = math.hypot(vx, vy)
        if speed > V:
            vx, vy = vx * V / speed, vy * V / speed

    for _ in range(MAX_DRAWS):
        acc = rng.uniform(0.0, A)
        heading = rng.uniform(0.0, 2.0 * math.pi)
        ax2, ay2 = 0.5 * acc * math.cos(heading), 0.5 * acc * math.sin(heading)
        if _speed_horizon(vx, vy, 2.0 * ax2, 2.0 * ay2, V) >= dt:
            return _segment(start, vx, vy, ax2, ay2, t_start, bounds, V, duration_hint)
    logger.info("no admissible acceleration after %d draws at t=%.3f; coasting", MAX_DRAWS, t_start)
    return _segment(start, vx, vy, 0.0, 0.0, t_start, bounds, V, duration_hint)


def _reflect(value, v, lo, hi):
    if value >= hi - BOUNDARY_TOL and v > 0.0:
        return min(2.0 * hi - value, hi), -v
    if value <= lo + BOUNDARY_TOL and v < 0.0:
        return max(2.0 * lo - value, lo), -v
    return min(max(value, lo), hi), v


def step_obstacle(
    state: ObstacleState,
    t: float,
    rng: np.random.Generator,
    bounds: Bounds,
    V: float,
    A: float,
    dt: float = 0.1,
    redraw_period: float = 2.0,
) -> ObstacleState:
    """Advance ``state`` so that its current segment covers time ``t``."""
    if state.scripted:
        return state
    traj = state.trajectory
    if t < traj.t_start:
        raise ValueError(f"cannot step backwards to t={t} (segment starts {traj.t_start})")
    while t >= traj.t_end:
        p = traj.position(traj.t_end)
        v = traj.velocity(traj.t_end)
        if traj.end_reason == "boundary":
            x, vx = _reflect(p.x, v.x, bounds.xmin, bounds.xmax)
            y, vy = _reflect(p.y, v.y, bounds.ymin, bounds.ymax)
            p, v = Point2(x, y), Point2(vx, vy)
        traj = sample_trajectory(rng, bounds, p, V, A, redraw_period, traj.t_end, v, dt)
    if traj is state.trajectory:
        return state
    return ObstacleState(state.id, traj, state.r_obstacle, state.scripted)


class Environment:
    """Mutable per-episode world: the obstacle set and its random stream."""

    def __init__(self, cfg: EnvConfig, dt: float = 0.1, keep_clear: Optional[Point2] = None,
                 scripted: tuple = ()):
        self.cfg = cfg
        self.dt = dt
        self.rng = np.random.default_rng(cfg.seed)
        self.obstacles: list[ObstacleState] = []
        for i in range(cfg.n):
            start = self._spawn_point(keep_clear)
            traj = sample_trajectory(self.rng, cfg.bounds, start, cfg.V, cfg.A,
                                     cfg.redraw_period, 0.0, None, dt)
            self.obstacles.append(ObstacleState(i, traj, cfg.r_obstacle))
        for j, obs in enumerate(scripted):
            self.obstacles.append(ObstacleState(cfg.n + j, obs.trajectory, obs.r_obstacle, True))
        self.t = 0.0

    def _spawn_point(self, keep_clear: Optional[Point2]) -> Point2:
        b = self.cfg.bounds
        for _ in range(MAX_DRAWS):
            p = Point2(self.rng.uniform(b.xmin, b.xmax), self.rng.uniform(b.ymin, b.ymax))
            if keep_clear is None or distance(p, keep_clear) > self.cfg.spawn_clearance:
                return p
        raise ValueError("could not place an obstacle outside the spawn clearance")

    def advance(self, t: float) -> None:
        c = self.cfg
        self.obstacles = [step_obstacle(o, t, self.rng, c.bounds, c.V, c.A, self.dt, c.redraw_period)
                          for o in self.obstacles]
        self.t = t

    def snapshot(self) -> list[ObstacleView]:
        return [ObstacleView(o.id, o.position(self.t), o.r_obstacle) for o in self.obstacles]

    @property
    def density(self) -> float:
        return obstacle_density(len(self.obstacles), self.cfg.bounds.area)
