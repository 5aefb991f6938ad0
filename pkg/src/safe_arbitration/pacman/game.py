"""Game state and environment dynamics of the grid-world demo."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Optional

from .maze import Cell, Cluster, Layout, Maze, dot_clusters


class Direction(enum.Enum):
    UP = "up"
    DOWN = "down"
    LEFT = "left"
    RIGHT = "right"
    NONE = "none"

    @property
    def delta(self) -> tuple[int, int]:
        return _DELTAS[self]

    def apply(self, cell: Cell) -> Cell:
        dx, dy = self.delta
        return cell[0] + dx, cell[1] + dy


_DELTAS = {
    Direction.UP: (0, -1),
    Direction.DOWN: (0, 1),
    Direction.LEFT: (-1, 0),
    Direction.RIGHT: (1, 0),
    Direction.NONE: (0, 0),
}

# tie-breaking order for every greedy choice in the demo
TIE_ORDER = (Direction.UP, Direction.LEFT, Direction.DOWN, Direction.RIGHT)
MOVES = (Direction.UP, Direction.DOWN, Direction.LEFT, Direction.RIGHT)


@dataclass(frozen=True)
class MoveCommand:
    direction: Direction

    def __str__(self) -> str:
        return self.direction.value


STAY = MoveCommand(Direction.NONE)

CHASE = "chase"
FRIGHTENED = "frightened"

RUNNING = "running"
WON = "won"
LOST = "lost"


@dataclass(frozen=True)
class Ghost:
    position: Cell
    mode: str = CHASE

    @property
    def frightened(self) -> bool:
        return self.mode == FRIGHTENED


@dataclass(frozen=True)
class PacmanParams:
    avoid_distance: int = 3
    chase_distance: int = 6
    energizer_duration: int = 20
    ghost_period: int = 2  # ghosts move on steps divisible by this

    def __post_init__(self):
        if self.avoid_distance < 0 or self.chase_distance < 0:
            raise ValueError("distance thresholds must be >= 0")
        if self.energizer_duration < 1 or self.ghost_period < 1:
            raise ValueError("energizer_duration and ghost_period must be >= 1")


@dataclass(frozen=True)
class GameState:
    maze: Maze
    pacman: Cell
    ghosts: tuple[Ghost, ...]
    dots: frozenset
    energizers: frozenset
    energizer_timer: int = 0
    step: int = 0
    status: str = RUNNING

    @classmethod
    def initial(cls, layout: Layout) -> "GameState":
        return cls(
            maze=layout.maze,
            pacman=layout.pacman,
            ghosts=tuple(Ghost(g) for g in layout.ghosts),
            dots=layout.dots,
            energizers=layout.energizers,
        )

    @property
    def dots_remaining(self) -> int:
        return len(self.dots) + len(self.energizers)

    @property
    def items(self) -> frozenset:
        """Everything Pac-Man can eat: dots and energizers."""
        return self.dots | self.energizers

    @property
    def terminal(self) -> bool:
        return self.status != RUNNING

    @cached_property
    def clusters(self) -> list[Cluster]:
        return dot_clusters(self.maze, self.items)

    @cached_property
    def pacman_field(self):
        return self.maze.distances_from(self.pacman)

    def ghost_at(self, cell: Cell) -> Optional[Ghost]:
        for g in self.ghosts:
            if g.position == cell:
                return g
        return None


class InvalidMove(RuntimeError):
    """An executed command would move Pac-Man into a wall."""


def _ghost_move(maze: Maze, ghost: Ghost, pacman_field) -> Cell:
    best, best_score = ghost.position, None
    for d in TIE_ORDER:
        cell = d.apply(ghost.position)
        if maze.is_wall(cell):
            continue
        dist = int(pacman_field[cell[1], cell[0]])
        if dist < 0:
            continue
        score = -dist if ghost.frightened else dist
        if best_score is None or score < best_score:
            best, best_score = cell, score
    return best


def game_step(state: GameState, command: Optional[MoveCommand], params: PacmanParams) -> GameState:
    """Advance the world by one step; ``command=None`` leaves Pac-Man idle.

    Raises :class:`InvalidMove` for a move into a wall (such a command should
    never get here once verification is on).
    """
    if state.terminal:
        return state
    maze = state.maze
    old_pacman = state.pacman
    direction = command.direction if command is not None else Direction.NONE
    pacman = direction.apply(old_pacman)
    if maze.is_wall(pacman):
        raise InvalidMove(f"step {state.step}: move {direction.value} from {old_pacman} hits a wall")

    dots, energizers = state.dots, state.energizers
    ghosts = list(state.ghosts)
    timer = state.energizer_timer
    if pacman in energizers:
        energizers = energizers - {pacman}
        timer = params.energizer_duration
        ghosts = [replace(g, mode=FRIGHTENED) for g in ghosts]
    else:
        if pacman in dots:
            dots = dots - {pacman}
        if timer > 0:
            timer -= 1
            if timer == 0:
                ghosts = [replace(g, mode=CHASE) for g in ghosts]

    status = RUNNING

    # Pac-Man moves first, so a head-on swap is caught by the first check
    def resolve(ghosts):
        nonlocal status
        survivors = []
        for g in ghosts:
            if g.position == pacman:
                if g.frightened:
                    continue
                status = LOST
            survivors.append(g)
        return survivors

    ghosts = resolve(ghosts)
    if not dots and not energizers and status == RUNNING:
        status = WON

    if status == RUNNING and state.step % params.ghost_period == 0:
        field = maze.distances_from(pacman)
        ghosts = resolve([replace(g, position=_ghost_move(maze, g, field)) for g in ghosts])

    if not any(g.frightened for g in ghosts):
        timer = 0
    return GameState(
        maze=maze,
        pacman=pacman,
        ghosts=tuple(ghosts),
        dots=dots,
        energizers=energizers,
        energizer_timer=timer,
        step=state.step + 1,
        status=status,
    )
