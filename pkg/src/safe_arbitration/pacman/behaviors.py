"""Behavior components for Pac-Man."""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..core import Behavior, BehaviorError
from .game import MOVES, STAY, TIE_ORDER, Direction, GameState, MoveCommand, PacmanParams
from .maze import Cell, Cluster


def _field_at(field, cell: Cell) -> int:
    return int(field[cell[1], cell[0]])


def step_towards(state: GameState, target: Cell) -> MoveCommand:
    """First move of a shortest path from Pac-Man to ``target``."""
    field = state.maze.distances_from(target)
    here = _field_at(field, state.pacman)
    if here <= 0:
        return STAY
    for d in TIE_ORDER:
        cell = d.apply(state.pacman)
        if not state.maze.is_wall(cell) and _field_at(field, cell) == here - 1:
            return MoveCommand(d)
    raise BehaviorError(f"no path step towards {target}")


def nearest(state: GameState, cells) -> Optional[tuple[int, Cell]]:
    """Closest reachable cell by BFS distance; ties go to the lower row-major index."""
    field = state.pacman_field
    best = None
    for cell in cells:
        d = _field_at(field, cell)
        if d < 0:
            continue
        key = (d, state.maze.index(cell))
        if best is None or key < best[0]:
            best = (key, cell)
    if best is None:
        return None
    return best[0][0], best[1]


def chasing_ghost_distance(state: GameState) -> Optional[int]:
    hit = nearest(state, [g.position for g in state.ghosts if not g.frightened])
    return None if hit is None else hit[0]


class AvoidGhosts(Behavior):
    def __init__(self, params: PacmanParams, name: str = "AvoidGhosts"):
        super().__init__(name)
        self.params = params

    def check_invocation(self, state: GameState) -> bool:
        d = chasing_ghost_distance(state)
        return d is not None and d <= self.params.avoid_distance

    def get_command(self, state: GameState) -> MoveCommand:
        ghosts = [g.position for g in state.ghosts if not g.frightened]
        if not ghosts:
            raise BehaviorError("no ghost to avoid")
        best, best_score = None, None
        for d in TIE_ORDER:
            cell = d.apply(state.pacman)
            if state.maze.is_wall(cell):
                continue
            field = state.maze.distances_from(cell)
            dists = [_field_at(field, g) for g in ghosts]
            score = min(x if x >= 0 else np.iinfo(np.int32).max for x in dists)
            if best_score is None or score > best_score:
                best, best_score = d, score
        if best is None:
            return STAY
        return MoveCommand(best)


class ChaseGhosts(Behavior):
    def __init__(self, params: PacmanParams, name: str = "ChaseGhosts"):
        super().__init__(name)
        self.params = params

    def _target(self, state: GameState):
        if state.energizer_timer <= 0:
            return None
        hit = nearest(state, [g.position for g in state.ghosts if g.frightened])
        if hit is None or hit[0] > self.params.chase_distance:
            return None
        return hit[1]

    def check_invocation(self, state: GameState) -> bool:
        return self._target(state) is not None

    def get_command(self, state: GameState) -> MoveCommand:
        target = self._target(state)
        if target is None:
            raise BehaviorError("no frightened ghost in range")
        return step_towards(state, target)


class EatClosestDot(Behavior):
    def __init__(self, name: str = "EatClosestDot"):
        super().__init__(name)

    def check_invocation(self, state: GameState) -> bool:
        return nearest(state, state.items) is not None

    def get_command(self, state: GameState) -> MoveCommand:
        hit = nearest(state, state.items)
        if hit is None:
            raise BehaviorError("no reachable dot")
        return step_towards(state, hit[1])


def cluster_value(state: GameState, cluster: Cluster) -> float:
    hit = nearest(state, cluster.cells)
    if hit is None:
        return 0.0
    return cluster.size / (1.0 + hit[0])


class ChangeDotCluster(Behavior):
    """Heads for the cluster with the best size / (1 + distance) ratio when that
    is not the cluster the closest dot belongs to."""

    def __init__(self, name: str = "ChangeDotCluster"):
        super().__init__(name)

    def _target(self, state: GameState) -> Optional[Cluster]:
        clusters = state.clusters
        if len(clusters) < 2:
            return None
        closest = nearest(state, state.items)
        if closest is None:
            return None
        best = max(clusters, key=lambda c: cluster_value(state, c))  # first maximum wins ties
        if closest[1] in best.cells:
            return None
        return best

    def check_invocation(self, state: GameState) -> bool:
        return self._target(state) is not None

    def get_command(self, state: GameState) -> MoveCommand:
        cluster = self._target(state)
        if cluster is None:
            raise BehaviorError("no better cluster")
        return step_towards(state, nearest(state, cluster.cells)[1])


class MoveRandomly(Behavior):
    """Uniform random direction; it does not look at walls."""

    def __init__(self, rng: np.random.Generator, name: str = "MoveRandomly"):
        super().__init__(name)
        self.rng = rng

    def check_invocation(self, state: GameState) -> bool:
        return True

    def get_command(self, state: GameState) -> MoveCommand:
        return MoveCommand(MOVES[int(self.rng.integers(len(MOVES)))])


class StayInPlace(Behavior):
    def __init__(self, name: str = "StayInPlace"):
        super().__init__(name)

    def check_invocation(self, state: GameState) -> bool:
        return True

    def get_command(self, state: GameState) -> MoveCommand:
        return STAY


def into_wall(state: GameState, healthy=None) -> MoveCommand:
    """A deliberately broken command: the first move that hits a wall."""
    for d in TIE_ORDER:
        if state.maze.is_wall(d.apply(state.pacman)):
            return MoveCommand(d)
    raise BehaviorError("no wall next to Pac-Man to run into")
