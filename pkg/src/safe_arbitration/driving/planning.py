"""Trajectory planners for the driving behaviors.

Every planner returns a :class:`DrivingCommand` whose fail-safe trajectory
follows the intended one for the first time step and then brakes at
``comfort_brake`` while finishing the lateral motion towards the target
lane.  Because the branch point is one step ahead, the fail-safe of the
command executed now is still executable from the state reached next step.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from ..core import BehaviorError
from .model import DrivingCommand, EnvironmentModel, Trajectory

LEFT = "left"
RIGHT = "right"


def integrate(
    s0: float,
    v0: float,
    accel: Callable[[int, float, float], float],
    n: int,
    dt: float,
    v_cap: float = math.inf,
) -> tuple[np.ndarray, np.ndarray]:
    """Exact integration with piecewise-constant acceleration per step.

    Braking never reverses: the vehicle stops inside the step and stays put.
    Acceleration is trimmed so the speed does not exceed ``v_cap``.
    """
    s = np.empty(n)
    v = np.empty(n)
    s[0], v[0] = s0, v0
    for k in range(n - 1):
        a = accel(k, s[k], v[k])
        if a > 0 and v[k] + a * dt > v_cap:
            a = max((v_cap - v[k]) / dt, 0.0)
        if a < 0 and v[k] + a * dt < 0:
            s[k + 1] = s[k] + v[k] * v[k] / (-2.0 * a)
            v[k + 1] = 0.0
        else:
            s[k + 1] = s[k] + v[k] * dt + 0.5 * a * dt * dt
            v[k + 1] = v[k] + a * dt
    return s, v


def lateral_profile(d0: float, target: float, times: np.ndarray, lane_change_time: float) -> np.ndarray:
    """Move towards ``target`` at one lane per ``lane_change_time``, then hold."""
    span = target - d0
    progress = np.minimum(np.asarray(times) / lane_change_time, abs(span))
    return d0 + math.copysign(1.0, span) * progress if span else np.full(len(times), d0)


def constant_accel(a: float) -> Callable[[int, float, float], float]:
    return lambda k, s, v: a


def branch_fail_safe(intended: Trajectory, target_d: float, env: EnvironmentModel) -> Trajectory:
    p = env.params
    n = len(intended)
    branch = 1 if n > 1 else 0
    times = intended.t
    s_tail, v_tail = integrate(
        float(intended.s[branch]), float(intended.v[branch]), constant_accel(-env.ego_params.comfort_brake), n - branch, p.dt
    )
    d_tail = lateral_profile(float(intended.d[branch]), target_d, times[branch:] - times[branch], p.lane_change_time)
    return Trajectory(
        times,
        np.concatenate([intended.s[:branch], s_tail]),
        np.concatenate([intended.d[:branch], d_tail]),
        np.concatenate([intended.v[:branch], v_tail]),
    )


def _command(env: EnvironmentModel, s: np.ndarray, v: np.ndarray, target_d: float) -> DrivingCommand:
    p = env.params
    times = p.times()[: len(s)]
    intended = Trajectory(times, s, lateral_profile(env.ego_d, target_d, times, p.lane_change_time), v)
    return DrivingCommand(intended, branch_fail_safe(intended, target_d, env))


def idm_accel(env: EnvironmentModel, lane: int) -> Callable[[int, float, float], float]:
    """Intelligent-driver-model acceleration behind the lead in ``lane``.

    The lead is assumed to keep its speed; output is clipped to the ego's
    comfortable range.
    """
    p, ego = env.params, env.ego_params
    v_desired = env.road.speed_limit
    lead = env.lead(lane)
    b = ego.a_max

    def accel(k: int, s: float, v: float) -> float:
        free = 1.0 - (v / v_desired) ** p.idm_exponent
        interaction = 0.0
        if lead is not None:
            t = k * p.dt
            s_lead = lead.state.s + lead.state.v * t
            gap = max(s_lead - s - (lead.params.length + ego.length) / 2.0, 0.1)
            desired = p.idm_min_gap + v * p.idm_time_gap + v * (v - lead.state.v) / (2.0 * math.sqrt(ego.a_max * b))
            interaction = (max(desired, 0.0) / gap) ** 2
        a = ego.a_max * (free - interaction)
        return min(max(a, -ego.comfort_brake), ego.a_max)

    return accel


def plan_follow_lane(env: EnvironmentModel) -> DrivingCommand:
    lane = env.ego.lane
    if not env.road.has_lane(lane):
        raise BehaviorError("ego is off the road")
    s, v = integrate(env.ego.s, env.ego.v, idm_accel(env, lane), env.params.samples, env.params.dt, env.road.speed_limit)
    return _command(env, s, v, float(lane))


def plan_change_lane(env: EnvironmentModel, direction: str, target_lane=None) -> DrivingCommand:
    if target_lane is None:
        target_lane = env.ego.lane + (1 if direction == LEFT else -1)
    if not env.road.has_lane(target_lane):
        raise BehaviorError(f"no lane to the {direction}")
    s, v = integrate(env.ego.s, env.ego.v, constant_accel(0.0), env.params.samples, env.params.dt)
    return _command(env, s, v, float(target_lane))


def plan_park_near_goal(env: EnvironmentModel) -> DrivingCommand:
    """Stub parking: decelerate uniformly to stand still at the goal."""
    gap = env.goal_s - env.ego.s
    brake = env.ego_params.comfort_brake
    a = brake if gap <= 0 else min(env.ego.v**2 / (2.0 * gap), brake)
    s, v = integrate(env.ego.s, env.ego.v, constant_accel(-a), env.params.samples, env.params.dt)
    return _command(env, s, v, float(env.ego.lane))


def plan_emergency_stop(env: EnvironmentModel) -> DrivingCommand:
    """Full braking, lateral position frozen."""
    p = env.params
    s, v = integrate(env.ego.s, env.ego.v, constant_accel(-env.ego_params.brake_max), p.samples, p.dt)
    times = p.times()
    traj = Trajectory(times, s, np.full(len(times), env.ego_d), v)
    return DrivingCommand(traj, traj)


def plan_fail_safe(env: EnvironmentModel) -> DrivingCommand:
    """Continue the fail-safe trajectory stored with the last executed command."""
    last = env.last_command
    if last is None:
        raise BehaviorError("no stored fail-safe trajectory")
    age = env.last_command_age
    if age < 1 or age >= len(last.fail_safe):
        raise BehaviorError("stored fail-safe trajectory is stale")
    traj = last.fail_safe.advanced(age)
    return DrivingCommand(traj, traj)


def continue_maneuver(command: DrivingCommand, age: int, env: EnvironmentModel) -> DrivingCommand:
    """Keep following an earlier intended trajectory, with a fresh fail-safe."""
    if age < 1 or age >= len(command.intended) - 1:
        raise BehaviorError("last trajectory is exhausted")
    intended = command.intended.advanced(age)
    target_d = float(command.fail_safe.d[-1])
    return DrivingCommand(intended, branch_fail_safe(intended, target_d, env))
