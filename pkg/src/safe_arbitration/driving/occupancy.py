"""Worst-case occupancy of traffic participants and of the ego footprint."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .. import _kernels
from .model import OtherVehicle, RoadModel, Trajectory, VehicleParams, VehicleState


@dataclass(frozen=True, eq=False)
class OccupancySet:
    """Per time sample: longitudinal interval [lo, hi] and a lane bit mask."""

    times: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    lanes: np.ndarray  # int64 bit masks, bit k = lane k

    def lane_sets(self) -> list[set[int]]:
        return [{k for k in range(63) if (int(m) >> k) & 1} for m in self.lanes]

    @property
    def width(self) -> np.ndarray:
        return self.hi - self.lo


def lane_bit(lane: int) -> int:
    return 1 << lane


def reachable_lane_masks(lane: int, road: RoadModel, times: np.ndarray, lane_change_time: float) -> np.ndarray:
    """Own lane throughout; neighbouring lanes from ``lane_change_time`` on."""
    own = lane_bit(lane)
    spread = own
    for nb in (lane - 1, lane + 1):
        if road.has_lane(nb):
            spread |= lane_bit(nb)
    return np.where(np.asarray(times) >= lane_change_time - 1e-9, spread, own).astype(np.int64)


def predict_occupancy(
    state: VehicleState,
    params: VehicleParams,
    times: np.ndarray,
    road: RoadModel,
    lane_change_time: float,
) -> OccupancySet:
    """Interval a vehicle may cover under bounded acceleration and speed.

    The front edge assumes full acceleration up to ``v_max``, the rear edge
    full braking down to standstill; both are widened by half the length.
    """
    if params.v_max < state.v:
        raise ValueError("v_max must be at least the current speed")
    times = np.asarray(times, dtype=float)
    lo, hi = _kernels.occupancy_bounds(
        [state.s], [state.v], [params.a_max], [params.v_max], [params.length / 2.0], times
    )
    lanes = reachable_lane_masks(state.lane, road, times, lane_change_time)
    return OccupancySet(times, lo[0], hi[0], lanes)


def predict_all(
    others: Sequence[OtherVehicle],
    times: np.ndarray,
    road: RoadModel,
    lane_change_time: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batched :func:`predict_occupancy`; arrays of shape (n_vehicles, n_samples)."""
    times = np.asarray(times, dtype=float)
    if not others:
        empty = np.zeros((0, len(times)))
        return empty, empty, empty.astype(np.int64)
    lo, hi = _kernels.occupancy_bounds(
        [o.state.s for o in others],
        [o.state.v for o in others],
        [o.params.a_max for o in others],
        [max(o.params.v_max, o.state.v) for o in others],
        [o.params.length / 2.0 for o in others],
        times,
    )
    lanes = np.stack([reachable_lane_masks(o.state.lane, road, times, lane_change_time) for o in others])
    return lo, hi, lanes


def footprint_lanes(d: float, width: float, road: RoadModel) -> int:
    """Bit mask of the lanes a body of ``width`` metres centred at ``d`` touches."""
    half = width / (2.0 * road.lane_width)
    x = d + 0.5  # lane k spans [k, k + 1) in x
    first = max(int(math.floor(x - half)), 0)
    last = min(int(math.ceil(x + half)) - 1, road.lanes - 1)
    mask = 0
    for k in range(first, last + 1):
        mask |= lane_bit(k)
    return mask


def trajectory_occupancy(traj: Trajectory, length: float, width: float, road: RoadModel) -> OccupancySet:
    lanes = np.array([footprint_lanes(float(d), width, road) for d in traj.d], dtype=np.int64)
    return OccupancySet(traj.t, traj.s - length / 2.0, traj.s + length / 2.0, lanes)
