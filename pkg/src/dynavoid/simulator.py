"""Discrete-time episode engine.

One episode: the robot starts at ``start`` and visits ``waypoints`` in order
at constant speed, re-planning every frame. It ends on the first collision
(robot and obstacle discs touching at a frame boundary), on reaching the
last waypoint, or when the clock passes the timeout.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence

from .environment import EnvConfig, Environment, ObstacleState
from .geometry import Point2, distance
from .planner import Case, LocalPlanner, ObstacleView, PlannerConfig, RobotPose, SteeringDecision

SUCCESS = "success"
COLLISION = "collision"
TIMEOUT = "timeout"


class Policy(Protocol):
    def reset(self) -> None: ...

    def decide_frame(self, robot: RobotPose, target: Point2, obstacles: Sequence[ObstacleView],
                     t: float) -> SteeringDecision: ...


@dataclass(frozen=True)
class EpisodeConfig:
    env: EnvConfig = field(default_factory=EnvConfig)
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    start: Point2 = Point2(0.0, 0.0)
    waypoints: tuple[Point2, ...] = (Point2(10.0, 10.0),)
    v: float = 2.0
    goal_tolerance: float = 0.1
    # None: max(30 s, 5 x straight-line distance / v)
    timeout: Optional[float] = None
    scripted_obstacles: tuple[ObstacleState, ...] = ()

    def __post_init__(self):
        if not self.waypoints:
            raise ValueError("at least one waypoint is required")
        if not 0 < self.v <= self.env.V:
            raise ValueError(f"robot speed {self.v} outside (0, {self.env.V}]")
        if self.timeout is not None and not self.timeout > 0:
            raise ValueError("timeout must be positive")
        if not self.goal_tolerance > 0:
            raise ValueError("goal_tolerance must be positive")

    @property
    def straight_line_distance(self) -> float:
        pts = (self.start, *self.waypoints)
        return sum(distance(a, b) for a, b in zip(pts, pts[1:]))

    @property
    def effective_timeout(self) -> float:
        if self.timeout is not None:
            return self.timeout
        return max(30.0, 5.0 * self.straight_line_distance / self.v)


@dataclass(frozen=True)
class FrameRecord:
    t: float
    robot: RobotPose
    # None on the terminal frame, where no decision is taken
    case: Optional[Case]
    critical_obstacle: Optional[int]
    intermediate_target: Optional[Point2]
    obstacles: tuple[tuple[int, Point2], ...]
    emergency: bool = False

    def to_dict(self) -> dict:
        it = self.intermediate_target
        return {
            "type": "frame",
            "t": self.t,
            "x": self.robot.position.x,
            "y": self.robot.position.y,
            "heading": self.robot.heading,
            "speed": self.robot.speed,
            "case": int(self.case) if self.case is not None else None,
            "critical": self.critical_obstacle,
            "intermediate": [it.x, it.y] if it is not None else None,
            "emergency": self.emergency,
            "obstacles": [[i, p.x, p.y] for i, p in self.obstacles],
        }


@dataclass
class EpisodeResult:
    outcome: str
    frames: list[FrameRecord]
    travel_time: float
    path_length: float

    def summary(self) -> dict:
        return {
            "type": "summary",
            "outcome": self.outcome,
            "travel_time": self.travel_time,
            "path_length": self.path_length,
            "frames": len(self.frames),
        }


@dataclass
class EpisodeState:
    k: int
    robot: RobotPose
    waypoint_index: int
    env: Environment
    path_length: float = 0.0
    outcome: Optional[str] = None


def step(state: EpisodeState, decision: SteeringDecision, cfg: EpisodeConfig) -> EpisodeState:
    """Move the robot one frame along the commanded heading, then check.

    Collision is checked before waypoint arrival.
    """
    dt = cfg.planner.delta_t
    h = decision.heading_command
    p = state.robot.position
    pos = Point2(p.x + cfg.v * dt * math.cos(h), p.y + cfg.v * dt * math.sin(h))
    k = state.k + 1
    t = k * dt
    state.env.advance(t)
    new = EpisodeState(k, RobotPose(pos, h, cfg.v), state.waypoint_index, state.env,
                       state.path_length + distance(p, pos))
    reach = cfg.planner.r_robot
    if any(distance(pos, o.position) <= reach + o.radius for o in state.env.snapshot()):
        new.outcome = COLLISION
    elif distance(pos, cfg.waypoints[new.waypoint_index]) <= cfg.goal_tolerance:
        new.waypoint_index += 1
        if new.waypoint_index == len(cfg.waypoints):
            new.outcome = SUCCESS
    return new


def _frame(t: float, state: EpisodeState, decision: Optional[SteeringDecision]) -> FrameRecord:
    obstacles = tuple((o.id, o.position) for o in state.env.snapshot())
    if decision is None:
        return FrameRecord(t, state.robot, None, None, None, obstacles)
    return FrameRecord(t, state.robot, decision.case, decision.critical_obstacle,
                       decision.intermediate_target, obstacles, decision.emergency)


def run_episode(cfg: EpisodeConfig, policy: Optional[Policy] = None) -> EpisodeResult:
    """Simulate one episode; deterministic in ``cfg`` (including the seed)."""
    dt = cfg.planner.delta_t
    policy = policy if policy is not None else LocalPlanner(cfg.planner)
    policy.reset()
    env = Environment(cfg.env, dt, keep_clear=cfg.start, scripted=cfg.scripted_obstacles)
    env.advance(0.0)
    first = cfg.waypoints[0]
    heading = math.atan2(first.y - cfg.start.y, first.x - cfg.start.x)
    state = EpisodeState(0, RobotPose(cfg.start, heading, cfg.v), 0, env)
    timeout = cfg.effective_timeout
    frames: list[FrameRecord] = []

    if any(distance(cfg.start, o.position) <= cfg.planner.r_robot + o.radius for o in env.snapshot()):
        state.outcome = COLLISION
    while state.outcome is None:
        t = state.k * dt
        if t > timeout:
            state.outcome = TIMEOUT
            break
        target = cfg.waypoints[state.waypoint_index]
        decision = policy.decide_frame(state.robot, target, env.snapshot(), t)
        frames.append(_frame(t, state, decision))
        index = state.waypoint_index
        state = step(state, decision, cfg)
        if state.waypoint_index != index:
            policy.reset()
    frames.append(_frame(state.k * dt, state, None))
    return EpisodeResult(state.outcome, frames, state.k * dt, state.path_length)


def write_trajectory_log(result: EpisodeResult, path, comments: Sequence[str] = ()) -> None:
    """Line-delimited JSON: ``#`` comment lines, one record per frame, then a summary."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        for fr in result.frames:
            fh.write(json.dumps(fr.to_dict(), sort_keys=True) + "\n")
        fh.write(json.dumps(result.summary(), sort_keys=True) + "\n")


def read_trajectory_log(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip() and not line.startswith("#")]
