"""Verifier and arbitration graphs for Pac-Man."""

from __future__ import annotations

from typing import Iterable, Optional

from ..core import Arbitrator, VerificationResult
from ..faults import FaultInjected, FaultSpec
from ..rng import substream
from ..verification import Verifier, always_pass
from . import behaviors as b
from .game import GameState, MoveCommand, PacmanParams

ROOT = "Pacman"
PRIMARY = ("ChaseGhosts", "AvoidGhosts", "EatClosestDot", "ChangeDotCluster")
FALLBACKS = ("MoveRandomly", "StayInPlace")


def check_move(command: MoveCommand, state: GameState) -> VerificationResult:
    target = command.direction.apply(state.pacman)
    if state.maze.is_wall(target):
        return VerificationResult.failed("wall collision")
    ghost = state.ghost_at(target)
    if ghost is not None and not ghost.frightened:
        return VerificationResult.failed("ghost collision")
    return VerificationResult.ok()


pacman_verifier = Verifier("pacman", check_move)


def build_graph(
    params: Optional[PacmanParams] = None,
    *,
    seed: int = 0,
    fallbacks: bool = True,
    verify: bool = True,
    faults: Iterable[FaultSpec] = (),
) -> Arbitrator:
    """Priority graph over the primary behaviors, optionally with fallback layers.

    ``fallbacks=False`` gives the bare graph; with ``fallbacks=True``
    MoveRandomly and the verification-exempt StayInPlace are appended.
    """
    params = params or PacmanParams()
    faults = {f.target: f for f in faults}
    root = Arbitrator(ROOT, verifier=pacman_verifier if verify else always_pass)

    def wrap(behavior):
        spec = faults.pop(behavior.name, None)
        if spec is None:
            return behavior
        return FaultInjected(behavior, spec, substream(seed, f"fault/{behavior.name}"), bad_command=b.into_wall)

    root.add_option(wrap(b.ChaseGhosts(params)))
    root.add_option(wrap(b.AvoidGhosts(params)))
    root.add_option(wrap(b.EatClosestDot()))
    root.add_option(wrap(b.ChangeDotCluster()))
    if fallbacks:
        root.add_option(wrap(b.MoveRandomly(substream(seed, "move_randomly"))))
        root.add_option(b.StayInPlace(), verification_exempt=True)
    if faults:
        raise ValueError(f"fault target(s) not in graph: {sorted(faults)}")
    return root
