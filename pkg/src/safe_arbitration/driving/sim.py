"""Closed-loop driving runs on a scenario."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

from ..core import execute_step
from ..introspection import GraphSnapshot, Timeline, capture
from ..verification import CommandHistory
from .graph import build_graph
from .model import DrivingCommand, EnvironmentModel, OtherVehicle
from .planning import constant_accel, integrate, plan_emergency_stop
from .scenario import Scenario
from .verifiers import check_safety

TRANSCRIPT_HEADER = "step,t,chosen,s,d,v,a"


@dataclass(frozen=True)
class Collision:
    step: int
    t: float
    other: str

    def line(self) -> str:
        return f"{self.step},{self.t:.2f},{self.other}"


@dataclass
class DrivingRun:
    transcript: list[str] = field(default_factory=lambda: [TRANSCRIPT_HEADER])
    snapshots: list[GraphSnapshot] = field(default_factory=list)
    timeline: Timeline = field(default_factory=Timeline)
    collisions: list[Collision] = field(default_factory=list)
    no_safe_option_steps: list[int] = field(default_factory=list)
    # (environment at emission, executed command, chosen leaf, exempt)
    executed: list[tuple[EnvironmentModel, DrivingCommand, str, bool]] = field(default_factory=list)
    final: Optional[EnvironmentModel] = None

    def collision_log(self) -> str:
        return "".join(line + "\n" for line in ["step,t,other"] + [c.line() for c in self.collisions])


def _advance_other(other: OtherVehicle, accel: float, dt: float) -> OtherVehicle:
    s, v = integrate(other.state.s, other.state.v, constant_accel(accel), 2, dt, other.params.v_max)
    a = (v[1] - v[0]) / dt
    state = dataclasses.replace(other.state, s=float(s[1]), v=float(v[1]), a=float(a))
    return dataclasses.replace(other, state=state)


def footprints_overlap(env: EnvironmentModel, other: OtherVehicle) -> bool:
    """Rectangle intersection of the ego and another vehicle."""
    ego, p = env.ego, env.ego_params
    ds = abs(ego.s - other.state.s)
    dy = abs(env.ego_d - other.state.d(env.road)) * env.road.lane_width
    return ds < (p.length + other.params.length) / 2.0 and dy < (p.width + other.params.width) / 2.0


def initial_environment(scenario: Scenario) -> EnvironmentModel:
    return EnvironmentModel(
        road=scenario.road,
        ego=scenario.ego,
        ego_params=scenario.ego_params,
        others=tuple(OtherVehicle(o.name, o.state, o.params) for o in scenario.others),
        params=scenario.params,
        goal_s=scenario.goal_s,
    )


def simulate(
    scenario: Scenario,
    *,
    verify: Optional[bool] = None,
    steps: Optional[int] = None,
    seed: Optional[int] = None,
    faults=None,
    stop_on_collision: bool = True,
) -> DrivingRun:
    """Step the world at ``dt``; arguments left as None come from the scenario."""
    verify = scenario.verification if verify is None else verify
    steps = scenario.steps if steps is None else steps
    seed = scenario.seed if seed is None else seed
    faults = scenario.faults if faults is None else tuple(faults)

    history = CommandHistory()
    root = build_graph(
        history, verify=verify, seed=seed, faults=faults, continue_staleness=scenario.params.continue_staleness
    )
    specs = {o.name: o for o in scenario.others}
    dt = scenario.params.dt
    env = initial_environment(scenario)
    run = DrivingRun()

    for step in range(steps):
        age = 0 if history.last_step is None else step - history.last_step
        env = dataclasses.replace(
            env, last_command=history.last, last_command_age=age, time=round(step * dt, 9), step=step
        )
        verified = execute_step(root, env, history)
        snap = capture(root, step)
        run.snapshots.append(snap)
        run.timeline.record(snap)
        chosen = snap.chosen_leaf

        if verified.passed:
            command = verified.command
            exempt = bool(chosen) and chosen == "EmergencyStop"
        else:
            # Cannot happen while EmergencyStop is in the graph; brake anyway.
            run.no_safe_option_steps.append(step)
            command = plan_emergency_stop(env)
            history.record(command)
            exempt = True
        run.executed.append((env, command, chosen, exempt))

        ego = command.intended.state(1, env.road)
        others = tuple(_advance_other(o, specs[o.name].accel_at(env.time), dt) for o in env.others)
        t_after = round((step + 1) * dt, 9)
        env = dataclasses.replace(env, ego=ego, others=others, time=t_after, step=step + 1)
        run.transcript.append(
            f"{step},{t_after:.2f},{chosen or '-'},{ego.s:.4f},{env.ego_d:.4f},{ego.v:.4f},{ego.a:.4f}"
        )
        hits = [o.name for o in env.others if footprints_overlap(env, o)]
        run.collisions.extend(Collision(step, t_after, name) for name in hits)
        if hits and stop_on_collision:
            break

    run.final = env
    return run


def unsafe_emissions(run: DrivingRun) -> list[int]:
    """Steps whose executed, non-exempt command fails the safety check on replay."""
    return [env.step for env, command, _, exempt in run.executed if not exempt and not check_safety(command, env).passed]
