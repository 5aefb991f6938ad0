"""Arbitration graph for automated driving with fallback layers."""

from __future__ import annotations

from typing import Iterable, Optional

import numpy as np

from ..core import Arbitrator
from ..faults import FaultInjected, FaultSpec
from ..rng import substream
from ..strategies import CostStrategy
from ..verification import CommandHistory, always_pass
from . import behaviors as b
from . import planning
from .model import DrivingCommand, EnvironmentModel, Trajectory
from .verifiers import driving_verifier

ROOT = "AutomatedDriving"
URBAN = "UrbanDriving"


def urban_costs() -> dict:
    def change_cost(direction):
        def cost(env: EnvironmentModel) -> float:
            lane = env.ego.lane + (1 if direction == planning.LEFT else -1)
            return b.lane_cost(env, lane) + env.params.change_penalty

        return cost

    return {
        "FollowLane": lambda env: b.lane_cost(env, env.ego.lane),
        "ChangeLaneLeft": change_cost(planning.LEFT),
        "ChangeLaneRight": change_cost(planning.RIGHT),
    }


def broken_trajectory(env: EnvironmentModel, healthy: Optional[DrivingCommand]) -> DrivingCommand:
    """A planner bug: the intended trajectory jumps 5 m ahead halfway through."""
    base = healthy if healthy is not None else planning.plan_follow_lane(env)
    s = np.array(base.intended.s)
    s[len(s) // 2 :] += 5.0
    traj = Trajectory(base.intended.t, s, base.intended.d, base.intended.v)
    return DrivingCommand(traj, base.fail_safe)


def build_graph(
    history: CommandHistory,
    *,
    verify: bool = True,
    seed: int = 0,
    faults: Iterable[FaultSpec] = (),
    continue_staleness: int = 1,
) -> Arbitrator:
    """Root priority arbitrator::

        AutomatedDriving (priority)
          ParkNearGoal
          UrbanDriving (cost): FollowLane, ChangeLaneLeft, ChangeLaneRight
          ContinueLastManeuver   fallback
          FailSafe               fallback
          EmergencyStop          last resort, exempt from verification
    """
    verifier = driving_verifier if verify else always_pass
    faults = {f.target: f for f in faults}

    def wrap(behavior):
        spec = faults.pop(behavior.name, None)
        if spec is None:
            return behavior
        return FaultInjected(behavior, spec, substream(seed, f"fault/{behavior.name}"), bad_command=broken_trajectory)

    urban = Arbitrator(URBAN, strategy=CostStrategy(urban_costs()), verifier=verifier)
    urban.add_option(wrap(b.FollowLane()))
    urban.add_option(wrap(b.ChangeLane(planning.LEFT)))
    urban.add_option(wrap(b.ChangeLane(planning.RIGHT)))

    root = Arbitrator(ROOT, verifier=verifier)
    root.add_option(wrap(b.ParkNearGoal()))
    root.add_option(urban)
    root.add_option(wrap(b.ContinueLastManeuver(history, staleness_limit=continue_staleness)))
    root.add_option(wrap(b.FailSafe()))
    root.add_option(b.EmergencyStop(), verification_exempt=True)
    if faults:
        raise ValueError(f"fault target(s) not in graph: {sorted(faults)}")
    return root
