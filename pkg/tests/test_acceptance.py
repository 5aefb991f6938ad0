"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the summary lines appear at
the end of the pytest report (and inline with ``-s``).
"""

import itertools
import time
from pathlib import Path

import numpy as np
import pytest

from acceptance_report import report
from helpers import Scripted
from safe_arbitration import cli
from safe_arbitration.core import Arbitrator, Status, VerificationResult
from safe_arbitration.driving import planning
from safe_arbitration.driving.model import DrivingParams, EgoParams, EnvironmentModel, RoadModel, VehicleParams, VehicleState
from safe_arbitration.driving.occupancy import predict_occupancy
from safe_arbitration.driving.scenario import load_scenario
from safe_arbitration.driving.sim import simulate as drive
from safe_arbitration.faults import FaultSpec
from safe_arbitration.introspection import serialize
from safe_arbitration.pacman.sim import reverify
from safe_arbitration.pacman.sim import simulate as play
from safe_arbitration.strategies import CostStrategy, PriorityStrategy, RandomStrategy, SequenceStrategy

GOLDEN = Path(__file__).parent / "golden" / "fallback_fixture_step_00000.ags.txt"
PRIMARY_PACMAN = ("ChaseGhosts", "AvoidGhosts", "EatClosestDot", "ChangeDotCluster")
COSTS = [2.0, 0.5, 2.0, 1.0]


class Spy:
    """Wraps a strategy and remembers the last ranking it produced."""

    def __init__(self, inner):
        self.inner = inner
        self.kind = getattr(inner, "kind", None)
        self.last = None

    def register(self, option):
        if hasattr(self.inner, "register"):
            self.inner.register(option)

    def sort(self, applicable, situation=None, context=None):
        self.last = list(self.inner.sort(applicable, situation, context))
        return self.last


def reference_order(kind, applicable, spy):
    idx = [i for i, a in enumerate(applicable) if a]
    if kind in ("priority", "sequence"):  # a fresh sequence starts at the first applicable option
        return idx
    if kind == "cost":
        return sorted(idx, key=lambda i: (COSTS[i], i))
    order = [o.index for o in spy.last or []]
    assert sorted(order) == idx
    return order


def brute_force(order, passes):
    for i in order:
        if passes[i]:
            return f"o{i}"
    return None


def make_strategy(kind, seed):
    return {
        "priority": PriorityStrategy,
        "sequence": SequenceStrategy,
        "cost": lambda: CostStrategy(lambda o, s: COSTS[o.index]),
        "random": lambda: RandomStrategy(seed=seed),
    }[kind]()


def test_criterion_1_oracle_equivalence():
    start = time.perf_counter()
    mismatches = cases = 0
    for kind in ("priority", "sequence", "cost", "random"):
        for n in range(5):
            for app in itertools.product([False, True], repeat=n):
                for passes in itertools.product([False, True], repeat=n):
                    spy = Spy(make_strategy(kind, cases))
                    accepted = {f"o{i}" for i in range(n) if passes[i]}
                    arb = Arbitrator(
                        "root",
                        strategy=spy,
                        verifier=lambda c, s: VerificationResult.ok() if c in accepted else VerificationResult.failed("x"),
                    )
                    for i in range(n):
                        arb.add_option(Scripted(f"O{i}", invocable=app[i], command=f"o{i}"))
                    got = arb.best_option(None)
                    expected = brute_force(reference_order(kind, app, spy), passes)
                    ok = (got.command == expected) and (got.result.status is Status.NO_SAFE_OPTION) == (expected is None)
                    mismatches += not ok
                    cases += 1
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 5.0
    report(1, "oracle equivalence", ok, f"{cases} cases, {mismatches} mismatches, {elapsed:.2f} s")
    assert ok


def test_criterion_2_verified_command_invariant():
    maze = cli.data_path("classic_maze.txt").read_text()
    faults = [FaultSpec(name, "bad-command", 0.3) for name in PRIMARY_PACMAN]
    start = time.perf_counter()
    walls = no_safe = replay = 0
    for seed in range(100):
        run = play(maze, steps=500, seed=seed, faults=faults, keep_states=True)
        walls += run.invalid_commands
        no_safe += run.no_safe_option_steps
        replay += reverify(run)
    elapsed = time.perf_counter() - start
    ok = walls == 0 and no_safe == 0 and replay == 0 and elapsed < 30.0
    report(2, "verified-command invariant", ok, f"walls={walls} no_safe={no_safe} reverify_failures={replay}, {elapsed:.1f} s")
    assert ok


def test_criterion_3_fallback_chain_golden():
    maze = cli.data_path("fallback_fixture.txt").read_text()
    run = play(maze, steps=1, seed=0, faults=[FaultSpec("EatClosestDot", "signal-failure", 1.0)])
    snap = run.snapshots[0]
    semantic = (
        snap.node("EatClosestDot").verification == "FAILED"
        and snap.node("MoveRandomly").verification == "FAILED"
        and snap.node("MoveRandomly").detail.endswith("wall collision")
        and snap.node("StayInPlace").verification == "exempt"
        and snap.chosen_leaf == "StayInPlace"
    )
    byte_equal = serialize(snap).encode() == GOLDEN.read_bytes()
    report(3, "fallback chain golden snapshot", semantic and byte_equal, f"semantic={semantic} bytes={byte_equal}")
    assert semantic and byte_equal


def test_criterion_4_driving_contrast():
    scenario = load_scenario(cli.data_path("benchmark.yaml"))
    start = time.perf_counter()
    off = drive(scenario, verify=False)
    on = drive(scenario, verify=True)
    elapsed = time.perf_counter() - start

    first = off.collisions[0] if off.collisions else None
    off_ok = first is not None and 3.0 <= first.t <= 8.0 and off.timeline.chosen()[-1] == "ChangeLaneLeft"

    rejected = [s for s in on.snapshots if s.node("ChangeLaneLeft").verification == "FAILED"]
    rejected_ok = bool(rejected) and all(
        s.node("ChangeLaneLeft").detail.startswith("safety:") and "rear" in s.node("ChangeLaneLeft").detail and s.chosen_leaf == "FollowLane"
        for s in rejected
    )
    changes = [s.step for s in on.snapshots if s.chosen_leaf == "ChangeLaneLeft"]
    passed_ok = False
    if changes and rejected:
        env = on.executed[changes[0]][0]
        rear = next(o for o in env.others if o.name == "rear")
        passed_ok = changes[0] > rejected[-1].step and rear.state.s > env.ego.s and abs(on.final.ego_d - 1.0) < 1e-9
    ok = off_ok and not on.collisions and rejected_ok and passed_ok and elapsed < 10.0
    detail = (
        f"off: collision at t={first.t:.1f} s with {first.other}; " if first else "off: no collision; "
    ) + f"on: {len(on.collisions)} collisions, {len(rejected)} rejections, lane change from step {changes[0] if changes else '-'}; {elapsed:.1f} s"
    report(4, "driving contrast", ok, detail)
    assert ok


def _realized(rng, v0, a_max, v_max, times, substeps=10):
    # speed is piecewise linear, so the trapezoid rule is exact per substep
    s, v, out = 0.0, v0, [0.0]
    h = (times[1] - times[0]) / substeps
    a = rng.uniform(-a_max, a_max)
    switch = rng.integers(1, 20)
    for k in range(1, len(times)):
        if k % switch == 0:
            a = rng.choice([-a_max, a_max, rng.uniform(-a_max, a_max)])
        for _ in range(substeps):
            nv = min(max(v + a * h, 0.0), v_max)
            s += 0.5 * (v + nv) * h
            v = nv
        out.append(s)
    return np.array(out)


def test_criterion_5_occupancy_soundness():
    rng = np.random.default_rng(5)
    times = DrivingParams().times()
    road = RoadModel()
    violations = 0
    for _ in range(1000):
        a_max, v_max = rng.uniform(0.5, 6.0), rng.uniform(2.0, 30.0)
        v0, length = rng.uniform(0, v_max), rng.uniform(0, 5)
        occ = predict_occupancy(VehicleState(0.0, 0, v0), VehicleParams(a_max=a_max, v_max=v_max, length=length), times, road, 3.0)
        s = _realized(rng, v0, a_max, v_max, times)
        violations += int(np.sum((s - length / 2 < occ.lo - 1e-9) | (s + length / 2 > occ.hi + 1e-9)))
    report(5, "occupancy soundness", violations == 0, f"1000 profiles, {violations} violations")
    assert violations == 0


def test_criterion_6_emergency_stop():
    a = EgoParams().brake_max
    errors = {}
    for v in (5.0, 10.0, 15.0):
        env = EnvironmentModel(RoadModel(), VehicleState(0.0, 0, v), EgoParams(), (), DrivingParams())
        traj = planning.plan_emergency_stop(env).intended
        errors[v] = abs(traj.s[-1] - v * v / (2 * a)) / (v * v / (2 * a))
    ok = all(e <= 0.01 for e in errors.values())
    report(6, "emergency stop distance", ok, ", ".join(f"v={v:g}: {e:.2%}" for v, e in errors.items()))
    assert ok


def test_criterion_7_continue_last_bridging():
    run = drive(load_scenario(cli.data_path("bridging.yaml")))
    segments = run.timeline.segments()
    ok = segments == ["FollowLane", "ContinueLastManeuver", "FollowLane"]
    report(7, "continue-last bridging", ok, " -> ".join(segments))
    assert ok


_determinism: dict = {}


def _artifacts(root: Path) -> dict:
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.mark.parametrize("demo, extra", [("pacman", ["--fault", "EatClosestDot:bad-command:0.3"]), ("driving", [])])
def test_criterion_8_determinism(tmp_path, demo, extra):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        cli.main(["--demo", demo, "--seed", "11", "--out", str(out), *extra])
        outs.append(_artifacts(out))
    ok = bool(outs[0]) and outs[0] == outs[1]
    _determinism[demo] = (ok, len(outs[0]))
    all_ok = all(v[0] for v in _determinism.values())
    report(8, "determinism", all_ok, ", ".join(f"{d}: {n} files {'identical' if o else 'DIFFER'}" for d, (o, n) in _determinism.items()))
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
