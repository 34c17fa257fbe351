"""Per-frame decision core of the local planner.

Each frame the planner senses obstacles inside the critical area, keeps the
last four observations of each, picks the most critical obstacle and reacts
to it according to one of six cases:

1. no most critical obstacle: keep going;
2. it approaches from region II: turn perpendicular to it;
3. it sits on the path and is static: take the shorter tangent detour;
4. it sits on the path and moves: detour on the side it came from;
5. it will reach the path after the robot has passed: keep going;
6. it will reach the path first: take the longer tangent detour.

Region II is the axis-aligned quadrant opposite to the one holding the
target, in a frame translated to the robot without rotation. Everything else
is region I.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional

from .extrapolation import SampleSeries, extrapolate, first_crossing_time
from .geometry import (
    AvoidancePath,
    Circle2,
    GeometryError,
    Point2,
    Segment2,
    avoidance_corners,
    bearing,
    closest_point_on_segment,
    distance,
    segment_circle_intersects,
    wrap_angle,
)

HISTORY = 4
# Horizon for touch-time extrapolation; cubic extrapolation diverges beyond it.
CROSSING_HORIZON = 5.0


class Case(enum.IntEnum):
    CASE1 = 1
    CASE2 = 2
    CASE3 = 3
    CASE4 = 4
    CASE5 = 5
    CASE6 = 6


class Region(enum.Enum):
    I = "I"
    II = "II"


class InsufficientHistory(ValueError):
    pass


@dataclass(frozen=True)
class PlannerConfig:
    r_robot: float = 0.5
    r_ca: float = 3.0
    r_sensing_max: float = 6.0
    d_sz: float = 0.9
    delta_t: float = 0.1
    epsilon_static: float = 0.02
    epsilon_waypoint: float = 0.1

    def __post_init__(self):
        if not 0 < self.r_robot <= self.r_ca <= self.r_sensing_max:
            raise ValueError("need 0 < r_robot <= r_ca <= r_sensing_max")
        if self.d_sz < self.r_robot / 2.0:
            raise ValueError(f"d_sz={self.d_sz} must be at least r_robot/2={self.r_robot / 2.0}")
        if not self.delta_t > 0:
            raise ValueError("delta_t must be positive")
        if self.epsilon_static < 0 or self.epsilon_waypoint < 0:
            raise ValueError("tolerances must be non-negative")

    def r_osz(self, r_obstacle: float) -> float:
        """Safe-zone radius around an obstacle of radius ``r_obstacle``."""
        return r_obstacle + self.d_sz


class ObstacleView(NamedTuple):
    """Ground-truth obstacle state handed to the sensor."""

    id: int
    position: Point2
    radius: float


@dataclass(frozen=True)
class Observation:
    obstacle_id: int
    t: float
    r: float
    phi: float
    world_pos: Point2
    r_obstacle: float


@dataclass
class ObstacleTrack:
    obstacle_id: int
    history: list[Observation] = field(default_factory=list)

    def append(self, obs: Observation) -> None:
        self.history.append(obs)
        if len(self.history) > HISTORY:
            del self.history[0]

    @property
    def latest(self) -> Observation:
        return self.history[-1]


@dataclass(frozen=True)
class RobotPose:
    position: Point2
    heading: float
    speed: float


@dataclass(frozen=True)
class SteeringDecision:
    case: Case
    heading_command: float
    intermediate_target: Optional[Point2] = None
    critical_obstacle: Optional[int] = None
    # robot or target inside the safe zone: heading straight away instead
    emergency: bool = False
    # Case 6 only: the corner the case-4 side rule would have picked
    alternative_target: Optional[Point2] = None


def sense(robot: RobotPose, true_obstacles: Iterable[ObstacleView], cfg: PlannerConfig,
          t: float) -> list[Observation]:
    """Observations of the obstacles whose center is within r_ca - r_obstacle."""
    out = []
    px, py = robot.position.x, robot.position.y
    for ob in true_obstacles:
        dx = ob.position.x - px
        dy = ob.position.y - py
        r = math.hypot(dx, dy)
        if r <= cfg.r_ca - ob.radius:
            out.append(Observation(ob.id, t, r, math.atan2(dy, dx), ob.position, ob.radius))
    return out


def update_tracks(tracks: dict[int, ObstacleTrack],
                  observations: Iterable[Observation]) -> dict[int, ObstacleTrack]:
    """Tracks after this frame's observations; unseen obstacles are dropped."""
    new = {}
    for obs in observations:
        old = tracks.get(obs.obstacle_id)
        track = ObstacleTrack(obs.obstacle_id, list(old.history) if old else [])
        track.append(obs)
        new[obs.obstacle_id] = track
    return new


def classify_region(robot: Point2, target: Point2, obstacle: Point2) -> Region:
    sx = 1.0 if target.x >= robot.x else -1.0
    sy = 1.0 if target.y >= robot.y else -1.0
    dx = obstacle.x - robot.x
    dy = obstacle.y - robot.y
    if dx * sx <= 0.0 and dy * sy <= 0.0:
        return Region.II
    return Region.I


def _path_distances(track: ObstacleTrack, path: Segment2) -> list[float]:
    return [closest_point_on_segment(o.world_pos, path)[0] for o in track.history]


def select_most_critical(tracks: dict[int, ObstacleTrack], robot: RobotPose, path: Segment2,
                         cfg: PlannerConfig) -> Optional[int]:
    best_id, best_r = None, math.inf
    for oid in sorted(tracks):
        hist = tracks[oid].history
        if len(hist) < 2:
            continue
        last, prev = hist[-1], hist[-2]
        if not last.r - prev.r < 0.0:
            continue
        d_last = closest_point_on_segment(last.world_pos, path)[0]
        d_prev = closest_point_on_segment(prev.world_pos, path)[0]
        on_path = d_last <= cfg.r_osz(last.r_obstacle)
        if not (d_last < d_prev or on_path):
            continue
        if last.r < best_r:
            best_id, best_r = oid, last.r
    return best_id


def is_static(track: ObstacleTrack, cfg: PlannerConfig) -> bool:
    pts = [o.world_pos for o in track.history]
    return all(distance(a, b) < cfg.epsilon_static
               for i, a in enumerate(pts) for b in pts[i + 1:])


def estimate_collision_point(track: ObstacleTrack, path: Segment2, r_osz: float,
                             horizon: float = CROSSING_HORIZON,
                             step: float = 0.01) -> Optional[tuple[float, Point2]]:
    """Predicted time and place the obstacle's safe zone first touches ``path``.

    The distance-to-path history is extrapolated to find when it falls to
    ``r_osz``; the world x and y histories are then extrapolated to that time
    and projected onto the path.
    """
    if len(track.history) < 2:
        raise InsufficientHistory("need at least two observations")
    times = tuple(o.t for o in track.history)
    d_series = SampleSeries(times, tuple(_path_distances(track, path)))
    t_star = first_crossing_time(d_series, r_osz, horizon, step)
    if t_star is None:
        return None
    x = extrapolate(SampleSeries(times, tuple(o.world_pos.x for o in track.history)), t_star)
    y = extrapolate(SampleSeries(times, tuple(o.world_pos.y for o in track.history)), t_star)
    return t_star, closest_point_on_segment(Point2(float(x), float(y)), path)[1]


def classify_case(critical: Optional[ObstacleTrack], robot: RobotPose, target: Point2,
                  cfg: PlannerConfig) -> Case:
    if critical is None:
        return Case.CASE1
    if len(critical.history) < 2:
        raise InsufficientHistory("critical track needs at least two observations")
    last = critical.latest
    if classify_region(robot.position, target, last.world_pos) is Region.II:
        return Case.CASE2
    path = Segment2(robot.position, target)
    r_osz = cfg.r_osz(last.r_obstacle)
    if segment_circle_intersects(path, Circle2(last.world_pos, r_osz)):
        return Case.CASE3 if is_static(critical, cfg) else Case.CASE4
    est = estimate_collision_point(critical, path, r_osz, step=cfg.delta_t / 10.0)
    if est is None:
        return Case.CASE5
    t_star, point = est
    obstacle_time = t_star - last.t
    robot_time = distance(robot.position, point) / robot.speed if robot.speed > 0 else math.inf
    return Case.CASE5 if robot_time < obstacle_time else Case.CASE6


def _ccw_of(robot: Point2, a: Point2, b: Point2) -> bool:
    """True when ``a`` lies counterclockwise of ``b`` as seen from ``robot``."""
    return (b - robot).cross(a - robot) > 0.0


def _origin_side(track: ObstacleTrack, robot: Point2, paths) -> AvoidancePath:
    left, right = paths
    # both bearings taken from the robot's current position so the robot's
    # own motion does not masquerade as obstacle motion
    prev, last = track.history[-2].world_pos, track.history[-1].world_pos
    dphi = wrap_angle(bearing(robot, last) - bearing(robot, prev))
    if dphi == 0.0:
        return min(paths, key=lambda p: p.length)
    left_is_ccw = _ccw_of(robot, left.corner, right.corner)
    # phi decreasing: it came from the counterclockwise (greater-phi) side
    want_ccw = dphi < 0.0
    return left if left_is_ccw == want_ccw else right


def react(case: Case, critical: Optional[ObstacleTrack], robot: RobotPose, target: Point2,
          cfg: PlannerConfig, intermediate_target: Optional[Point2] = None) -> SteeringDecision:
    """Steering decision for an already classified frame.

    ``intermediate_target`` is the sub-goal still active from earlier frames;
    Cases 1 and 5 keep heading for it.
    """
    crit_id = critical.obstacle_id if critical is not None else None
    pos = robot.position
    if case in (Case.CASE1, Case.CASE5):
        aim = intermediate_target if intermediate_target is not None else target
        return SteeringDecision(case, bearing(pos, aim), intermediate_target, crit_id)

    obstacle = critical.latest.world_pos
    if case is Case.CASE2:
        away = pos - obstacle
        to_goal = target - pos
        ccw = Point2(-away.y, away.x)
        cw = Point2(away.y, -away.x)
        chosen = cw if to_goal.dot(cw) > to_goal.dot(ccw) else ccw
        return SteeringDecision(case, math.atan2(chosen.y, chosen.x), None, crit_id)

    circle = Circle2(obstacle, cfg.r_osz(critical.latest.r_obstacle))
    try:
        paths = avoidance_corners(pos, target, circle)
    except GeometryError:
        return SteeringDecision(case, bearing(obstacle, pos), None, crit_id, emergency=True)

    alternative = None
    if case is Case.CASE3:
        chosen = min(paths, key=lambda p: p.length)
    elif case is Case.CASE4:
        chosen = _origin_side(critical, pos, paths)
    else:
        chosen = max(paths, key=lambda p: p.length)
        alternative = _origin_side(critical, pos, paths).corner
    corner = chosen.corner
    return SteeringDecision(case, bearing(pos, corner), corner, crit_id,
                            alternative_target=alternative)


class LocalPlanner:
    """Stateful planner for one leg between two waypoints.

    Holds the obstacle tracks and the active intermediate target between
    frames. ``decide_frame`` must be called once per frame with time
    advancing by ``cfg.delta_t``.
    """

    def __init__(self, cfg: PlannerConfig):
        self.cfg = cfg
        self.tracks: dict[int, ObstacleTrack] = {}
        self.intermediate_target: Optional[Point2] = None

    def reset(self) -> None:
        self.tracks = {}
        self.intermediate_target = None

    def _safe_zone_intruder(self, robot: RobotPose) -> Optional[Point2]:
        """Nearest tracked obstacle whose safe zone contains the robot, if any."""
        inside = [track.latest for track in self.tracks.values()
                  if track.latest.r < self.cfg.r_osz(track.latest.r_obstacle)]
        if not inside:
            return None
        return min(inside, key=lambda o: (o.r, o.obstacle_id)).world_pos

    def decide_frame(self, robot: RobotPose, target: Point2,
                     true_obstacles: Iterable[ObstacleView], t: float) -> SteeringDecision:
        cfg = self.cfg
        self.tracks = update_tracks(self.tracks, sense(robot, true_obstacles, cfg, t))
        # a detour is only kept while something is still inside the critical area
        if self.intermediate_target is not None and (
                not self.tracks
                or distance(robot.position, self.intermediate_target) <= cfg.epsilon_waypoint):
            self.intermediate_target = None

        if robot.position == target:
            return SteeringDecision(Case.CASE1, robot.heading, self.intermediate_target)
        path = Segment2(robot.position, target)
        crit_id = select_most_critical(self.tracks, robot, path, cfg)
        critical = self.tracks.get(crit_id) if crit_id is not None else None
        case = classify_case(critical, robot, target, cfg)
        decision = react(case, critical, robot, target, cfg, self.intermediate_target)
        intruder = self._safe_zone_intruder(robot)
        if intruder is not None and not decision.emergency:
            decision = dataclasses.replace(decision, heading_command=bearing(intruder, robot.position),
                                           intermediate_target=None, emergency=True)
        if case is Case.CASE2 or decision.emergency:
            self.intermediate_target = None
        elif decision.intermediate_target is not None:
            self.intermediate_target = decision.intermediate_target
        return decision
