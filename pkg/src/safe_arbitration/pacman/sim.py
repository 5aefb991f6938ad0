"""Closed-loop Pac-Man runs: arbitrate, execute, record."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..core import execute_step
from ..faults import FaultSpec
from ..introspection import GraphSnapshot, Timeline, capture
from ..verification import CommandHistory
from .game import GameState, InvalidMove, PacmanParams, game_step
from .graph import build_graph, pacman_verifier
from .maze import parse_maze

TRANSCRIPT_HEADER = "step,command,chosen_behavior,pacman_x,pacman_y,dots_remaining"

INVALID_COMMAND = "invalid-command"
NO_SAFE_OPTION = "no-safe-option"


@dataclass
class Event:
    step: int
    kind: str
    detail: str


@dataclass
class PacmanRun:
    transcript: list[str] = field(default_factory=lambda: [TRANSCRIPT_HEADER])
    snapshots: list[GraphSnapshot] = field(default_factory=list)
    timeline: Timeline = field(default_factory=Timeline)
    events: list[Event] = field(default_factory=list)
    executed: list[tuple[GameState, object, bool]] = field(default_factory=list)  # (state, command, exempt)
    final: Optional[GameState] = None

    @property
    def invalid_commands(self) -> int:
        return sum(e.kind == INVALID_COMMAND for e in self.events)

    @property
    def no_safe_option_steps(self) -> int:
        return sum(e.kind == NO_SAFE_OPTION for e in self.events)


def simulate(
    maze_text: str,
    *,
    steps: int = 500,
    seed: int = 0,
    params: Optional[PacmanParams] = None,
    verify: bool = True,
    fallbacks: bool = True,
    faults: Iterable[FaultSpec] = (),
    keep_states: bool = False,
) -> PacmanRun:
    """Play up to ``steps`` steps; stops early on win, loss or an invalid move."""
    params = params or PacmanParams()
    state = GameState.initial(parse_maze(maze_text))
    root = build_graph(params, seed=seed, fallbacks=fallbacks, verify=verify, faults=faults)
    history = CommandHistory()
    run = PacmanRun()

    for _ in range(steps):
        if state.terminal:
            break
        verified = execute_step(root, state, history)
        snap = capture(root, state.step)
        run.snapshots.append(snap)
        run.timeline.record(snap)
        chosen = snap.chosen_leaf
        command = verified.command if verified.passed else None
        if command is None:
            run.events.append(Event(state.step, NO_SAFE_OPTION, verified.result.detail))
        elif keep_states:
            exempt = root.option(chosen).flags.verification_exempt
            run.executed.append((state, command, exempt))
        try:
            nxt = game_step(state, command, params)
        except InvalidMove as exc:
            run.events.append(Event(state.step, INVALID_COMMAND, str(exc)))
            run.transcript.append(_line(state.step, command, chosen, state))
            break
        run.transcript.append(_line(state.step, command, chosen, nxt))
        state = nxt

    run.final = state
    return run


def _line(step: int, command, chosen: str, state: GameState) -> str:
    cmd = str(command) if command is not None else "-"
    x, y = state.pacman
    return f"{step},{cmd},{chosen},{x},{y},{state.dots_remaining}"


def reverify(run: PacmanRun) -> int:
    """Number of executed non-exempt commands that fail verification on replay."""
    return sum(
        not pacman_verifier(command, state).passed for state, command, exempt in run.executed if not exempt
    )
