"""Scenario files for the driving demo.

Example::

    road: {lanes: 2, lane_width: 3.5, speed_limit: 13.9}
    ego: {s: 0.0, lane: 0, v: 10.0}
    others:
      - name: rear
        s: -40.0
        lane: 1
        v: 18.0
        params: {a_max: 3.0, v_max: 20.0, length: 4.5}
        policy: [[0.0, 0.0]]        # (start time s, acceleration m/s^2) segments
    graph: {verification: on, gap_threshold: 10.0, seed: 0}
    params: {horizon: 8.0}          # any DrivingParams field
    goal_s: 10000.0
    steps: 150
    faults:
      - {target: FollowLane, mode: signal-failure, steps: [20]}
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from ..config import ConfigError, check_keys, join, load_yaml, number, section, switch
from ..faults import MODES, FaultSpec
from .model import DrivingParams, EgoParams, RoadModel, VehicleParams, VehicleState


@dataclass(frozen=True)
class OtherSpec:
    name: str
    state: VehicleState
    params: VehicleParams
    policy: tuple[tuple[float, float], ...] = ()  # constant speed when empty

    def accel_at(self, t: float) -> float:
        a = 0.0
        for start, value in self.policy:
            if t + 1e-9 >= start:
                a = value
        return a


@dataclass(frozen=True)
class Scenario:
    road: RoadModel
    ego: VehicleState
    ego_params: EgoParams
    others: tuple[OtherSpec, ...]
    params: DrivingParams
    goal_s: float = math.inf
    steps: int = 150
    verification: bool = True
    seed: int = 0
    faults: tuple[FaultSpec, ...] = ()


def _fields(cls) -> list[str]:
    return [f.name for f in dataclasses.fields(cls)]


def _dataclass_from(cls, doc: dict, path: str):
    check_keys(doc, _fields(cls), path)
    kwargs = {}
    for f in dataclasses.fields(cls):
        if f.name in doc:
            kwargs[f.name] = number(doc, f.name, None, path, integer=f.type in ("int", int))
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None


def _vehicle(doc: dict, path: str) -> VehicleState:
    try:
        return VehicleState(
            s=number(doc, "s", 0.0, path),
            lane=number(doc, "lane", 0, path, integer=True),
            v=number(doc, "v", 0.0, path),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(path, str(exc)) from None


def _faults(raw, path: str) -> tuple[FaultSpec, ...]:
    if raw is None:
        return ()
    if not isinstance(raw, list):
        raise ConfigError(path, "must be a list")
    out = []
    for i, item in enumerate(raw):
        p = join(path, i)
        if not isinstance(item, dict):
            raise ConfigError(p, "must be a mapping")
        check_keys(item, ("target", "mode", "probability", "steps"), p)
        if not isinstance(item.get("target"), str):
            raise ConfigError(join(p, "target"), "must be a behavior name")
        if item.get("mode") not in MODES:
            raise ConfigError(join(p, "mode"), f"must be one of {', '.join(MODES)}")
        prob = number(item, "probability", 0.0, p)
        if not 0.0 <= prob <= 1.0:
            raise ConfigError(join(p, "probability"), "must lie in [0, 1]")
        steps = item.get("steps")
        if steps is not None:
            if not isinstance(steps, list) or not all(isinstance(s, int) for s in steps):
                raise ConfigError(join(p, "steps"), "must be a list of step numbers")
            steps = frozenset(steps)
        out.append(FaultSpec(item["target"], item["mode"], prob, steps))
    return tuple(out)


def scenario_from_dict(doc: dict) -> Scenario:
    check_keys(doc, ("road", "ego", "ego_params", "others", "graph", "params", "goal_s", "steps", "faults"))
    road = _dataclass_from(RoadModel, section(doc, "road"), "road")
    ego_doc = section(doc, "ego")
    check_keys(ego_doc, ("s", "lane", "v"), "ego")
    ego = _vehicle(ego_doc, "ego")
    if not road.has_lane(ego.lane):
        raise ConfigError("ego.lane", "not a lane of the road")
    ego_params = _dataclass_from(EgoParams, section(doc, "ego_params"), "ego_params")
    params = _dataclass_from(DrivingParams, section(doc, "params"), "params")

    raw_others = doc.get("others", []) or []
    if not isinstance(raw_others, list):
        raise ConfigError("others", "must be a list")
    others = []
    for i, item in enumerate(raw_others):
        p = join("others", i)
        if not isinstance(item, dict):
            raise ConfigError(p, "must be a mapping")
        check_keys(item, ("name", "s", "lane", "v", "params", "policy"), p)
        state = _vehicle(item, p)
        if not road.has_lane(state.lane):
            raise ConfigError(join(p, "lane"), "not a lane of the road")
        vparams = _dataclass_from(VehicleParams, section(item, "params", p), join(p, "params"))
        if vparams.v_max < state.v:
            raise ConfigError(join(p, "params.v_max"), "must be at least the initial speed")
        policy = item.get("policy", []) or []
        if not isinstance(policy, list) or not all(
            isinstance(seg, list) and len(seg) == 2 and all(isinstance(x, (int, float)) for x in seg) for seg in policy
        ):
            raise ConfigError(join(p, "policy"), "must be a list of [start_time, acceleration] pairs")
        for start, accel in policy:
            if abs(accel) > vparams.a_max:
                raise ConfigError(join(p, "policy"), "acceleration exceeds params.a_max")
        name = item.get("name", f"vehicle{i}")
        if not isinstance(name, str):
            raise ConfigError(join(p, "name"), "must be a string")
        others.append(OtherSpec(name, state, vparams, tuple((float(a), float(b)) for a, b in policy)))

    graph = section(doc, "graph")
    check_keys(graph, ("verification", "gap_threshold", "seed"), "graph")
    if "gap_threshold" in graph:
        params = dataclasses.replace(params, gap_threshold=number(graph, "gap_threshold", 0.0, "graph"))
    return Scenario(
        road=road,
        ego=ego,
        ego_params=ego_params,
        others=tuple(others),
        params=params,
        goal_s=number(doc, "goal_s", math.inf, ""),
        steps=number(doc, "steps", 150, "", integer=True),
        verification=switch(graph, "verification", True, "graph"),
        seed=number(graph, "seed", 0, "graph", integer=True),
        faults=_faults(doc.get("faults"), "faults"),
    )


def load_scenario(path: Union[str, Path]) -> Scenario:
    return scenario_from_dict(load_yaml(path))
