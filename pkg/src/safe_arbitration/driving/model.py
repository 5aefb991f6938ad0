"""World model of the two-lane driving demo.

Positions are arc length ``s`` along a straight road (m) and a lateral
coordinate ``d`` measured in lanes: ``d = 0.0`` is the centre of lane 0,
``d = 1.0`` the centre of lane 1 (to the left of lane 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class RoadModel:
    lanes: int = 2
    lane_width: float = 3.5
    speed_limit: float = 13.9

    def __post_init__(self):
        if self.lanes < 1:
            raise ValueError("road needs at least one lane")
        if self.lane_width <= 0 or self.speed_limit <= 0:
            raise ValueError("lane_width and speed_limit must be positive")

    def has_lane(self, lane: int) -> bool:
        return 0 <= lane < self.lanes


@dataclass(frozen=True)
class VehicleParams:
    a_max: float = 3.0
    v_max: float = 20.0
    length: float = 4.5
    width: float = 1.8

    def __post_init__(self):
        if self.a_max <= 0:
            raise ValueError("a_max must be positive")
        if self.length < 0 or self.width < 0:
            raise ValueError("vehicle dimensions must be non-negative")


@dataclass(frozen=True)
class EgoParams:
    a_max: float = 2.0  # comfortable/physical acceleration limit
    comfort_brake: float = 4.0  # fail-safe braking
    brake_max: float = 8.0  # emergency braking
    length: float = 4.5
    width: float = 1.8


@dataclass(frozen=True)
class VehicleState:
    s: float
    lane: int
    v: float
    offset: float = 0.0  # lateral offset from the lane centre, m
    a: float = 0.0

    def __post_init__(self):
        if self.v < 0:
            raise ValueError("speed must be non-negative")

    def d(self, road: RoadModel) -> float:
        return self.lane + self.offset / road.lane_width

    @classmethod
    def from_lateral(cls, s: float, d: float, v: float, a: float, road: RoadModel) -> "VehicleState":
        lane = int(math.floor(d + 0.5))
        return cls(s=s, lane=lane, v=v, offset=(d - lane) * road.lane_width, a=a)


def _frozen(x) -> np.ndarray:
    arr = np.array(x, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States sampled every ``dt`` starting at t = 0."""

    t: np.ndarray
    s: np.ndarray
    d: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        for name in ("t", "s", "d", "v"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        n = len(self.t)
        if n < 1 or any(len(getattr(self, k)) != n for k in ("s", "d", "v")):
            raise ValueError("trajectory arrays must be non-empty and of equal length")

    def __len__(self) -> int:
        return len(self.t)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trajectory):
            return NotImplemented
        return all(np.array_equal(getattr(self, k), getattr(other, k)) for k in ("t", "s", "d", "v"))

    __hash__ = None

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0]) if len(self) > 1 else 0.0

    def accelerations(self) -> np.ndarray:
        if len(self) < 2:
            return np.zeros(0)
        return np.diff(self.v) / np.diff(self.t)

    def advanced(self, k: int) -> "Trajectory":
        """Drop the first ``k`` samples and restart time at zero."""
        if not 0 <= k < len(self):
            raise ValueError(f"cannot advance a {len(self)}-sample trajectory by {k}")
        return Trajectory(self.t[k:] - self.t[k], self.s[k:], self.d[k:], self.v[k:])

    def state(self, k: int, road: RoadModel) -> VehicleState:
        a = float(self.accelerations()[k - 1]) if k > 0 else 0.0
        return VehicleState.from_lateral(float(self.s[k]), float(self.d[k]), float(self.v[k]), a, road)


@dataclass(frozen=True)
class DrivingCommand:
    intended: Trajectory
    fail_safe: Trajectory


@dataclass(frozen=True)
class OtherVehicle:
    name: str
    state: VehicleState
    params: VehicleParams


@dataclass(frozen=True)
class DrivingParams:
    dt: float = 0.1
    horizon: float = 8.0
    lane_change_time: float = 3.0
    eps_kin: float = 0.01
    eps_v: float = 0.1
    eps_a: float = 0.1
    # behavior tuning
    gap_threshold: float = 10.0  # lane-change gap check, m (bumper to bumper)
    lookahead: float = 30.0  # lead vehicles closer than this slow a lane down, m
    change_penalty: float = 0.1
    park_distance: float = 40.0
    idm_time_gap: float = 1.5
    idm_min_gap: float = 2.0
    idm_exponent: float = 4.0
    continue_staleness: int = 1

    def __post_init__(self):
        if self.dt <= 0 or self.horizon < self.dt:
            raise ValueError("need dt > 0 and horizon >= dt")
        if self.lane_change_time <= 0:
            raise ValueError("lane_change_time must be positive")

    @property
    def samples(self) -> int:
        return int(round(self.horizon / self.dt)) + 1

    def times(self) -> np.ndarray:
        return np.arange(self.samples) * self.dt


@dataclass(frozen=True)
class EnvironmentModel:
    road: RoadModel
    ego: VehicleState
    ego_params: EgoParams
    others: tuple[OtherVehicle, ...]
    params: DrivingParams
    last_command: Optional[DrivingCommand] = None
    last_command_age: int = 0  # steps since last_command was executed
    goal_s: float = math.inf
    time: float = 0.0
    step: int = 0

    @property
    def ego_d(self) -> float:
        return self.ego.d(self.road)

    def lead(self, lane: int) -> Optional[OtherVehicle]:
        """Closest vehicle ahead of the ego in ``lane``."""
        ahead = [o for o in self.others if o.state.lane == lane and o.state.s > self.ego.s]
        return min(ahead, key=lambda o: o.state.s, default=None)
