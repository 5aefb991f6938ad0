"""Command-line runner for the Pac-Man and driving demos.

Exit codes::

    0  clean completion
    2  configuration error (bad flag, unreadable or malformed file)
    3  simulated collision (driving crash, Pac-Man walking into a wall)
    4  NO_SAFE_OPTION reached at the root
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .config import ConfigError, check_keys, join, load_yaml, number, switch
from .faults import FaultSpec
from .introspection import write_snapshot

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_COLLISION = 3
EXIT_NO_SAFE_OPTION = 4

DEMOS = ("pacman", "driving")
DEFAULT_SCENARIO = {"pacman": "classic_maze.txt", "driving": "benchmark.yaml"}

logger = logging.getLogger("safe_arbitration")


def data_path(name: str) -> Path:
    """Path of a file shipped in the package data directory."""
    return Path(str(resources.files("safe_arbitration").joinpath("data", name)))


@dataclass(frozen=True)
class RunConfig:
    demo: str
    scenario: Path
    seed: int = 0
    steps: Optional[int] = None  # None: 500 for Pac-Man, the scenario's own count for driving
    verification: Optional[bool] = None  # None: on for Pac-Man, the scenario's setting for driving
    faults: tuple[FaultSpec, ...] = ()
    out: Path = Path("runs")
    repeat: int = 1

    def __post_init__(self):
        if self.demo not in DEMOS:
            raise ConfigError("demo", f"unknown demo {self.demo!r} (choose from {', '.join(DEMOS)})")
        if not Path(self.scenario).is_file():
            raise ConfigError("scenario", f"no such file: {self.scenario}")
        if self.steps is not None and self.steps < 0:
            raise ConfigError("steps", "must be non-negative")
        if self.repeat < 1:
            raise ConfigError("repeat", "must be at least 1")


@dataclass
class RunResult:
    exit_code: int
    out: Path
    summary: str


# -- config assembly --------------------------------------------------------


def _parse_fault(item, path: str) -> FaultSpec:
    try:
        if isinstance(item, str):
            return FaultSpec.parse(item)
        if isinstance(item, dict):
            check_keys(item, ("target", "mode", "probability"), path)
            return FaultSpec(str(item.get("target")), str(item.get("mode")), number(item, "probability", 0.0, path))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None
    raise ConfigError(path, "must be 'name:mode:prob' or a mapping")


def _from_file(path: str) -> dict:
    doc = load_yaml(path)
    check_keys(doc, ("demo", "scenario", "seed", "steps", "verification", "faults", "out", "repeat"))
    out = {}
    if "demo" in doc:
        out["demo"] = doc["demo"]
    if "scenario" in doc:
        # relative to the config file
        out["scenario"] = Path(path).parent / str(doc["scenario"])
    for key in ("seed", "steps", "repeat"):
        if key in doc:
            out[key] = number(doc, key, None, integer=True)
    if "verification" in doc:
        out["verification"] = switch(doc, "verification", True)
    if "faults" in doc:
        if not isinstance(doc["faults"], list):
            raise ConfigError("faults", "must be a list")
        out["faults"] = tuple(_parse_fault(item, join("faults", i)) for i, item in enumerate(doc["faults"]))
    if "out" in doc:
        out["out"] = Path(str(doc["out"]))
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="safe-arbitration",
        description="Run the Pac-Man or driving demo with verified arbitration.",
        epilog="exit codes: 0 ok, 2 config error, 3 collision, 4 no safe option",
    )
    parser.add_argument("--config", help="YAML run config; flags given on the command line win")
    parser.add_argument("--demo", help="pacman or driving")
    parser.add_argument("--scenario", help="maze text file (pacman) or scenario YAML (driving)")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--steps", type=int)
    parser.add_argument("--verify", choices=("on", "off"))
    parser.add_argument("--fault", action="append", metavar="NAME:MODE:PROB", help="may be repeated")
    parser.add_argument("--out", help="run directory (default: runs)")
    parser.add_argument("--repeat", type=int, help="run N times with seeds seed..seed+N-1")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = _from_file(args.config) if args.config else {}
    if args.demo is not None:
        values["demo"] = args.demo
    if args.scenario is not None:
        values["scenario"] = Path(args.scenario)
    for key in ("seed", "steps", "repeat"):
        if getattr(args, key) is not None:
            values[key] = getattr(args, key)
    if args.verify is not None:
        values["verification"] = args.verify == "on"
    if args.fault:
        values["faults"] = tuple(_parse_fault(text, "--fault") for text in args.fault)
    if args.out is not None:
        values["out"] = Path(args.out)
    if "demo" not in values:
        raise ConfigError("demo", "missing (use --demo pacman|driving)")
    if values["demo"] in DEMOS and "scenario" not in values:
        values["scenario"] = data_path(DEFAULT_SCENARIO[values["demo"]])
    values.setdefault("scenario", Path("."))
    return RunConfig(**values)


# -- runs ---------------------------------------------------------------------


def _write_common(out: Path, transcript: list[str], timeline, snapshots) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "transcript.csv").write_text("\n".join(transcript) + "\n", encoding="utf-8")
    (out / "timeline.csv").write_text(timeline.to_csv(), encoding="utf-8")
    snap_dir = out / "snapshots"
    snap_dir.mkdir(exist_ok=True)
    for old in snap_dir.glob("step_*"):
        old.unlink()
    for snap in snapshots:
        write_snapshot(snap, snap_dir)


def run_pacman(config: RunConfig, seed: int, out: Path) -> RunResult:
    from .pacman.maze import MazeFormatError
    from .pacman.sim import INVALID_COMMAND, simulate

    try:
        text = config.scenario.read_text(encoding="utf-8")
        run = simulate(
            text,
            steps=500 if config.steps is None else config.steps,
            seed=seed,
            verify=True if config.verification is None else config.verification,
            faults=config.faults,
        )
    except MazeFormatError as exc:
        raise ConfigError("scenario", str(exc)) from None
    except ValueError as exc:  # unknown fault target
        raise ConfigError("faults", str(exc)) from None
    _write_common(out, run.transcript, run.timeline, run.snapshots)
    events = ["step,kind,detail"] + [f"{e.step},{e.kind},{e.detail}" for e in run.events]
    (out / "events.csv").write_text("\n".join(events) + "\n", encoding="utf-8")

    final = run.final
    summary = f"pacman seed={seed}: {final.status} after {final.step} steps, {final.dots_remaining} dots left"
    if run.invalid_commands:
        return RunResult(EXIT_COLLISION, out, summary + ", wall entry")
    if any(e.kind != INVALID_COMMAND for e in run.events):
        return RunResult(EXIT_NO_SAFE_OPTION, out, summary + f", {run.no_safe_option_steps} no-safe-option steps")
    return RunResult(EXIT_OK, out, summary)


def run_driving(config: RunConfig, seed: int, out: Path) -> RunResult:
    from .driving.scenario import load_scenario
    from .driving.sim import simulate

    scenario = load_scenario(config.scenario)
    if config.faults:
        scenario = dataclasses.replace(scenario, faults=scenario.faults + tuple(config.faults))
    try:
        run = simulate(scenario, verify=config.verification, steps=config.steps, seed=seed)
    except ValueError as exc:
        raise ConfigError("faults", str(exc)) from None
    _write_common(out, run.transcript, run.timeline, run.snapshots)
    (out / "collisions.csv").write_text(run.collision_log(), encoding="utf-8")

    ego = run.final.ego
    summary = f"driving seed={seed}: t={run.final.time:.1f} s, s={ego.s:.1f} m, {len(run.collisions)} collision(s)"
    if run.collisions:
        first = run.collisions[0]
        return RunResult(EXIT_COLLISION, out, summary + f", first with {first.other} at t={first.t:.1f} s")
    if run.no_safe_option_steps:
        return RunResult(EXIT_NO_SAFE_OPTION, out, summary + ", no safe option reached")
    return RunResult(EXIT_OK, out, summary)


def run(config: RunConfig) -> list[RunResult]:
    runner = run_pacman if config.demo == "pacman" else run_driving
    if config.repeat == 1:
        return [runner(config, config.seed, config.out)]
    return [runner(config, config.seed + i, config.out / f"run_{i:03d}") for i in range(config.repeat)]


def worst(codes: Sequence[int]) -> int:
    """Most severe exit code of a batch: collision, then no safe option."""
    for code in (EXIT_COLLISION, EXIT_NO_SAFE_OPTION):
        if code in codes:
            return code
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        config = config_from_args(args)
        results = run(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for result in results:
        print(f"{result.summary} -> {result.out} (exit {result.exit_code})")
    return worst([r.exit_code for r in results])


if __name__ == "__main__":
    sys.exit(main())
