import dataclasses
import math

import pytest

from dynavoid.environment import EnvConfig, Environment
from dynavoid.geometry import Point2, bearing, distance
from dynavoid.planner import Case, PlannerConfig, RobotPose, SteeringDecision
from dynavoid.scenario import scripted_obstacle
from dynavoid.simulator import (
    COLLISION,
    SUCCESS,
    TIMEOUT,
    EpisodeConfig,
    EpisodeState,
    read_trajectory_log,
    run_episode,
    step,
    write_trajectory_log,
)

STRAIGHT = EpisodeConfig(waypoints=(Point2(10.0, 0.0),),
                         env=EnvConfig(bounds=EpisodeConfig().env.bounds, n=0))


class StraightLine:
    """Ignores obstacles and heads for the current waypoint."""

    def reset(self):
        pass

    def decide_frame(self, robot, target, obstacles, t):
        return SteeringDecision(Case.CASE1, bearing(robot.position, target))


def _state(cfg, pos=Point2(0, 0), scripted=()):
    env = Environment(cfg.env, cfg.planner.delta_t, scripted=scripted)
    return EpisodeState(0, RobotPose(pos, 0.0, cfg.v), 0, env)


def test_step_kinematics():
    new = step(_state(STRAIGHT), SteeringDecision(Case.CASE1, math.pi / 2), STRAIGHT)
    assert new.robot.position.x == pytest.approx(0.0, abs=1e-15)
    assert new.robot.position.y == pytest.approx(0.2)
    assert new.k == 1 and new.path_length == pytest.approx(0.2)


@pytest.mark.parametrize("gap, hit", [(0.79, True), (0.8, True), (0.81, False)])
def test_collision_threshold(gap, hit):
    # r_robot 0.5 + r_obstacle 0.3: discs touch at 0.8
    ob = scripted_obstacle(Point2(0.2 + gap, 0.0))
    cfg = dataclasses.replace(STRAIGHT, scripted_obstacles=(ob,))
    new = step(_state(cfg, scripted=(ob,)), SteeringDecision(Case.CASE1, 0.0), cfg)
    assert (new.outcome == COLLISION) is hit


def test_collision_checked_before_arrival():
    ob = scripted_obstacle(Point2(10.5, 0.0))
    cfg = dataclasses.replace(STRAIGHT, scripted_obstacles=(ob,))
    new = step(_state(cfg, pos=Point2(9.8, 0), scripted=(ob,)), SteeringDecision(Case.CASE1, 0.0), cfg)
    assert new.outcome == COLLISION


def test_waypoints_consumed_in_order():
    cfg = dataclasses.replace(STRAIGHT, waypoints=(Point2(2, 0), Point2(2, 2)))
    result = run_episode(cfg)
    assert result.outcome == SUCCESS
    assert result.travel_time == pytest.approx(2.0)
    assert result.path_length == pytest.approx(4.0)


def test_zero_obstacle_run():
    result = run_episode(STRAIGHT)
    assert result.outcome == SUCCESS
    assert 5.0 <= result.travel_time <= 5.1
    assert all(f.case is Case.CASE1 for f in result.frames[:-1])
    assert result.frames[-1].case is None


def test_obstacle_in_the_way_hits_straight_policy():
    ob = scripted_obstacle(Point2(10.0, 0.0), velocity=Point2(-1.0, 0.0))
    cfg = dataclasses.replace(STRAIGHT, scripted_obstacles=(ob,))
    result = run_episode(cfg, StraightLine())
    assert result.outcome == COLLISION
    # closing speed 3 m/s from 10 m, contact at 0.8 m
    assert result.travel_time == pytest.approx(3.1, abs=0.1 + 1e-9)


def test_planner_avoids_what_straight_policy_hits():
    ob = scripted_obstacle(Point2(5.0, 0.0))
    cfg = dataclasses.replace(STRAIGHT, scripted_obstacles=(ob,))
    assert run_episode(cfg, StraightLine()).outcome == COLLISION
    assert run_episode(cfg).outcome == SUCCESS


def test_timeout():
    cfg = dataclasses.replace(STRAIGHT, timeout=1.0)
    result = run_episode(cfg)
    assert result.outcome == TIMEOUT
    assert result.travel_time == pytest.approx(1.1)


def test_default_timeout():
    assert STRAIGHT.effective_timeout == 30.0
    far = dataclasses.replace(STRAIGHT, waypoints=(Point2(100.0, 0.0),))
    assert far.effective_timeout == pytest.approx(250.0)


def test_start_inside_obstacle_is_collision():
    ob = scripted_obstacle(Point2(0.5, 0.0))
    result = run_episode(dataclasses.replace(STRAIGHT, scripted_obstacles=(ob,)))
    assert result.outcome == COLLISION and result.travel_time == 0.0


def test_config_validation():
    with pytest.raises(ValueError):
        EpisodeConfig(waypoints=())
    with pytest.raises(ValueError):
        EpisodeConfig(v=3.0)


def test_logs_byte_identical(tmp_path):
    cfg = EpisodeConfig(env=EnvConfig(n=5, seed=11))
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    write_trajectory_log(run_episode(cfg), a, ["run"])
    write_trajectory_log(run_episode(cfg), b, ["run"])
    assert a.read_bytes() == b.read_bytes()
    records = read_trajectory_log(a)
    assert records[-1]["type"] == "summary"
    assert all(r["type"] == "frame" for r in records[:-1])


@pytest.mark.parametrize("seed", range(20))
def test_outcome_trichotomy(seed):
    cfg = EpisodeConfig(env=EnvConfig(n=8, seed=seed))
    result = run_episode(cfg)
    assert result.outcome in (SUCCESS, COLLISION, TIMEOUT)
    last = result.frames[-1]
    reached = distance(last.robot.position, cfg.waypoints[-1]) <= cfg.goal_tolerance
    touching = any(distance(last.robot.position, p) <= 0.8 for _, p in last.obstacles)
    if result.outcome == SUCCESS:
        assert reached and not touching
    elif result.outcome == COLLISION:
        assert touching
    else:
        assert result.travel_time > cfg.effective_timeout
