"""Driving behavior components and the lane-cost estimator."""

from __future__ import annotations

from typing import Optional

from ..core import Behavior
from ..verification import CommandHistory, ContinueLastCommand
from . import planning
from .model import DrivingCommand, EnvironmentModel

LANE_DONE = 1e-6


def lane_cost(env: EnvironmentModel, lane: int) -> float:
    """Relative speed loss caused by the closest lead within lookahead."""
    if not env.road.has_lane(lane):
        raise ValueError(f"lane {lane} does not exist")
    lead = env.lead(lane)
    if lead is None or lead.state.s - env.ego.s > env.params.lookahead:
        return 0.0
    limit = env.road.speed_limit
    return 1.0 - min(lead.state.v, limit) / limit


def gap_clear(env: EnvironmentModel, lane: int, threshold: Optional[float] = None) -> bool:
    """Bumper-to-bumper distance to every vehicle in ``lane`` meets the threshold."""
    threshold = env.params.gap_threshold if threshold is None else threshold
    for other in env.others:
        if other.state.lane != lane:
            continue
        gap = abs(other.state.s - env.ego.s) - (other.params.length + env.ego_params.length) / 2.0
        if gap < threshold:
            return False
    return True


class FollowLane(Behavior):
    def __init__(self, name: str = "FollowLane"):
        super().__init__(name)

    def check_invocation(self, env: EnvironmentModel) -> bool:
        return env.road.has_lane(env.ego.lane)

    def get_command(self, env: EnvironmentModel) -> DrivingCommand:
        return planning.plan_follow_lane(env)


class ChangeLane(Behavior):
    """Lane change to the left or right.

    Invocation: the neighbouring lane exists, is cheaper than the current one
    (by more than the change penalty) and passes the gap check.  Commitment
    holds until the ego reaches the target lane centre, as long as nobody is
    alongside in the target lane.  The gap threshold is a tuning knob and a
    small value makes the invocation optimistic.
    """

    def __init__(self, direction: str, name: Optional[str] = None):
        super().__init__(name or ("ChangeLaneLeft" if direction == planning.LEFT else "ChangeLaneRight"))
        self.direction = direction
        self.target_lane: Optional[int] = None

    def _neighbour(self, env: EnvironmentModel) -> int:
        return env.ego.lane + (1 if self.direction == planning.LEFT else -1)

    def check_invocation(self, env: EnvironmentModel) -> bool:
        lane = self._neighbour(env)
        if not env.road.has_lane(lane):
            return False
        if lane_cost(env, lane) + env.params.change_penalty >= lane_cost(env, env.ego.lane):
            return False
        return gap_clear(env, lane)

    def check_commitment(self, env: EnvironmentModel) -> bool:
        if self.target_lane is None:
            return False
        if abs(env.ego_d - self.target_lane) <= LANE_DONE:
            return False
        return gap_clear(env, self.target_lane, threshold=0.0)

    def get_command(self, env: EnvironmentModel) -> DrivingCommand:
        return planning.plan_change_lane(env, self.direction, self.target_lane)

    def gain_control(self, env: EnvironmentModel) -> None:
        self.target_lane = self._neighbour(env)

    def lose_control(self, env: EnvironmentModel) -> None:
        self.target_lane = None


class ParkNearGoal(Behavior):
    def __init__(self, name: str = "ParkNearGoal"):
        super().__init__(name)

    def check_invocation(self, env: EnvironmentModel) -> bool:
        return 0.0 < env.goal_s - env.ego.s <= env.params.park_distance

    def get_command(self, env: EnvironmentModel) -> DrivingCommand:
        return planning.plan_park_near_goal(env)


class ContinueLastManeuver(ContinueLastCommand):
    """Keeps following the last executed trajectory for a few steps."""

    def __init__(self, history: CommandHistory, staleness_limit: int = 1, name: str = "ContinueLastManeuver"):
        super().__init__(history, name=name, staleness_limit=staleness_limit)

    def continue_command(self, command: DrivingCommand, age: int, env: EnvironmentModel) -> DrivingCommand:
        return planning.continue_maneuver(command, age, env)


class FailSafe(Behavior):
    def __init__(self, name: str = "FailSafe"):
        super().__init__(name)

    def check_invocation(self, env: EnvironmentModel) -> bool:
        last = env.last_command
        return last is not None and 1 <= env.last_command_age < len(last.fail_safe)

    def get_command(self, env: EnvironmentModel) -> DrivingCommand:
        return planning.plan_fail_safe(env)


class EmergencyStop(Behavior):
    def __init__(self, name: str = "EmergencyStop"):
        super().__init__(name)

    def check_invocation(self, env: EnvironmentModel) -> bool:
        return True

    def get_command(self, env: EnvironmentModel) -> DrivingCommand:
        return planning.plan_emergency_stop(env)
