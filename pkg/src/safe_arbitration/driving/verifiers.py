"""Validity and safety checks for driving commands."""

from __future__ import annotations

import numpy as np

from .. import _kernels
from ..core import VerificationResult
from ..verification import Verifier, all_of
from .model import DrivingCommand, EnvironmentModel
from .occupancy import footprint_lanes, predict_all, trajectory_occupancy


def check_validity(command: DrivingCommand, env: EnvironmentModel) -> VerificationResult:
    """Kinematic, dynamic and traffic-rule constraints on the intended trajectory."""
    traj = command.intended
    p, ego, road = env.params, env.ego_params, env.road

    if abs(traj.s[0] - env.ego.s) > p.eps_kin or abs(traj.v[0] - env.ego.v) > p.eps_v or abs(traj.d[0] - env.ego_d) > 1e-6:
        return VerificationResult.failed("start-state mismatch")
    if traj.t[0] != 0.0 or (len(traj) > 1 and not np.allclose(np.diff(traj.t), p.dt, atol=1e-9)):
        return VerificationResult.failed("time grid")
    lanes = np.floor(traj.d + 0.5)
    if np.any(lanes < 0) or np.any(lanes >= road.lanes):
        return VerificationResult.failed("off-road")
    if np.any(traj.v < 0):
        return VerificationResult.failed("negative speed")
    if np.any(traj.v > road.speed_limit + p.eps_v):
        return VerificationResult.failed("speed limit")
    acc = traj.accelerations()
    if np.any(acc > ego.a_max + p.eps_a) or np.any(acc < -(ego.comfort_brake + p.eps_a)):
        return VerificationResult.failed("acceleration limit")
    if len(traj) > 1:
        expected = 0.5 * (traj.v[1:] + traj.v[:-1]) * np.diff(traj.t)
        if np.any(np.abs(np.diff(traj.s) - expected) > p.eps_kin):
            return VerificationResult.failed("kinematic inconsistency")
    return VerificationResult.ok()


def relevant_lane_masks(env: EnvironmentModel, lanes: np.ndarray) -> np.ndarray:
    """Drop occupancy the ego is not responsible for in lanes it already holds.

    A vehicle behind the ego must keep its distance there, and a vehicle
    merging from a neighbouring lane must yield to the ego.  Counting either
    worst case would forbid braking and overtaking alike.  Lanes the ego is
    about to enter keep the full occupancy of everyone.
    """
    own = np.int64(footprint_lanes(env.ego_d, env.ego_params.width, env.road))
    out = lanes.copy()
    for i, other in enumerate(env.others):
        if other.state.s < env.ego.s:
            out[i] &= ~own
        else:
            out[i] &= ~(own & ~np.int64(1 << other.state.lane))
    return out


def check_safety(command: DrivingCommand, env: EnvironmentModel) -> VerificationResult:
    """Fail-safe trajectory occupancy must stay clear of everyone's worst case."""
    traj = command.fail_safe
    if not env.others:
        return VerificationResult.ok()
    ego_occ = trajectory_occupancy(traj, env.ego_params.length, env.ego_params.width, env.road)
    lo, hi, lanes = predict_all(env.others, traj.t, env.road, env.params.lane_change_time)
    lanes = relevant_lane_masks(env, lanes)
    i, j = _kernels.first_overlap(ego_occ.lo, ego_occ.hi, ego_occ.lanes, lo, hi, lanes)
    if i < 0:
        return VerificationResult.ok()
    return VerificationResult.failed(
        f"fail-safe overlaps worst-case occupancy of {env.others[i].name} at t={traj.t[j]:.1f} s"
    )


validity_verifier = Verifier("validity", check_validity)
safety_verifier = Verifier("safety", check_safety)
driving_verifier = all_of([validity_verifier, safety_verifier], name="validity+safety")
