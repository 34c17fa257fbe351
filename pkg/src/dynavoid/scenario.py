"""JSON scenario files.

A scenario fully determines an episode. Schema (every key optional, defaults
as in the config dataclasses)::

    {
      "env": {"bounds": [xmin, ymin, xmax, ymax], "n": 4, "V": 2.0, "A": 2.0,
              "r_obstacle": 0.3, "seed": 7, "n_max": 10,
              "redraw_period": 2.0, "spawn_clearance": 2.0},
      "planner": {"r_robot": 0.5, "r_ca": 3.0, "r_sensing_max": 6.0,
                  "d_sz": 0.9, "delta_t": 0.1, "epsilon_static": 0.02,
                  "epsilon_waypoint": 0.1},
      "episode": {"start": [0, 0], "waypoints": [[10, 10]], "v": 2.0,
                  "goal_tolerance": 0.1, "timeout": null},
      "scripted_obstacles": [
        {"position": [5, 5], "velocity": [0, 0], "acceleration": [0, 0],
         "radius": 0.3}
      ]
    }

When ``env.bounds`` is absent the map is the rectangle spanned by the start
and the last waypoint. Scripted obstacles move on the given quadratic
(``acceleration`` is the second derivative) forever and ignore the map
boundary.
"""

from __future__ import annotations

import dataclasses
import json
from typing import Any

from .environment import Bounds, EnvConfig, ObstacleState, QuadraticTrajectory
from .geometry import Point2
from .planner import PlannerConfig
from .simulator import EpisodeConfig

_ENV_KEYS = {f.name for f in dataclasses.fields(EnvConfig)} - {"bounds"}
_PLANNER_KEYS = {f.name for f in dataclasses.fields(PlannerConfig)}
_EPISODE_KEYS = {"start", "waypoints", "v", "goal_tolerance", "timeout"}


class ScenarioError(ValueError):
    pass


def _point(value) -> Point2:
    try:
        x, y = value
        return Point2(float(x), float(y))
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"expected [x, y], got {value!r}") from exc


def _check_keys(section: str, data: dict, allowed: set) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ScenarioError(f"unknown keys in {section!r}: {sorted(unknown)}")


def scripted_obstacle(position: Point2, velocity: Point2 = Point2(0.0, 0.0),
                      acceleration: Point2 = Point2(0.0, 0.0), radius: float = 0.3,
                      id: int = 0) -> ObstacleState:
    traj = QuadraticTrajectory(position.x, velocity.x, 0.5 * acceleration.x,
                               position.y, velocity.y, 0.5 * acceleration.y)
    return ObstacleState(id, traj, radius, scripted=True)


def episode_from_dict(data: dict[str, Any]) -> EpisodeConfig:
    """Build and validate an EpisodeConfig; raises ScenarioError on bad input."""
    _check_keys("scenario", data, {"env", "planner", "episode", "scripted_obstacles"})
    env_d = dict(data.get("env", {}))
    planner_d = dict(data.get("planner", {}))
    episode_d = dict(data.get("episode", {}))
    _check_keys("env", env_d, _ENV_KEYS | {"bounds"})
    _check_keys("planner", planner_d, _PLANNER_KEYS)
    _check_keys("episode", episode_d, _EPISODE_KEYS)
    try:
        start = _point(episode_d.pop("start", (0.0, 0.0)))
        waypoints = tuple(_point(w) for w in episode_d.pop("waypoints", [(10.0, 10.0)]))
        if "bounds" in env_d:
            env_d["bounds"] = Bounds(*map(float, env_d["bounds"]))
        elif waypoints:
            env_d["bounds"] = Bounds.spanning(start, waypoints[-1])
        scripted = tuple(
            scripted_obstacle(_point(o["position"]), _point(o.get("velocity", (0, 0))),
                              _point(o.get("acceleration", (0, 0))), float(o.get("radius", 0.3)))
            for o in data.get("scripted_obstacles", [])
        )
        return EpisodeConfig(env=EnvConfig(**env_d), planner=PlannerConfig(**planner_d),
                             start=start, waypoints=waypoints, scripted_obstacles=scripted,
                             **episode_d)
    except ScenarioError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ScenarioError(str(exc)) from exc


def episode_to_dict(cfg: EpisodeConfig) -> dict[str, Any]:
    env = dataclasses.asdict(cfg.env)
    b = cfg.env.bounds
    env["bounds"] = [b.xmin, b.ymin, b.xmax, b.ymax]
    return {
        "env": env,
        "planner": dataclasses.asdict(cfg.planner),
        "episode": {
            "start": list(cfg.start.as_tuple()),
            "waypoints": [list(w.as_tuple()) for w in cfg.waypoints],
            "v": cfg.v,
            "goal_tolerance": cfg.goal_tolerance,
            "timeout": cfg.timeout,
        },
        "scripted_obstacles": [
            {
                "position": [o.trajectory.a0x, o.trajectory.a0y],
                "velocity": [o.trajectory.a1x, o.trajectory.a1y],
                "acceleration": [2.0 * o.trajectory.a2x, 2.0 * o.trajectory.a2y],
                "radius": o.r_obstacle,
            }
            for o in cfg.scripted_obstacles
        ],
    }


def load_scenario(path) -> EpisodeConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioError(f"{path}: top level must be an object")
    return episode_from_dict(data)


def save_scenario(cfg: EpisodeConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(episode_to_dict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")
