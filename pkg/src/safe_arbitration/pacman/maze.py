"""Static maze geometry, shortest paths and dot clusters."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np
from scipy import ndimage

from .. import _kernels

Cell = tuple[int, int]  # (x, y); y grows downwards

WALL = "#"
DOT = "."
ENERGIZER = "o"
EMPTY = " "
PACMAN = "P"
GHOST = "G"
_KNOWN = {WALL, DOT, ENERGIZER, EMPTY, PACMAN, GHOST}


class MazeFormatError(ValueError):
    pass


@dataclass(eq=False)
class Maze:
    """Wall layout of a level.  Walls never change, so distance fields are cached."""

    walls: np.ndarray
    _fields: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.walls = np.array(self.walls, dtype=bool)
        self.walls.setflags(write=False)
        self.open = ~self.walls
        self.open.setflags(write=False)

    @property
    def height(self) -> int:
        return self.walls.shape[0]

    @property
    def width(self) -> int:
        return self.walls.shape[1]

    def in_bounds(self, cell: Cell) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    def is_wall(self, cell: Cell) -> bool:
        return not self.in_bounds(cell) or bool(self.walls[cell[1], cell[0]])

    def index(self, cell: Cell) -> int:
        return cell[1] * self.width + cell[0]

    def distances_from(self, cell: Cell) -> np.ndarray:
        """BFS distance field (``-1`` = unreachable) from ``cell``; read-only."""
        cached = self._fields.get(cell)
        if cached is None:
            sources = np.zeros_like(self.walls)
            sources[cell[1], cell[0]] = True
            cached = _kernels.bfs_field(self.open, sources)
            cached.setflags(write=False)
            self._fields[cell] = cached
        return cached

    def distance(self, a: Cell, b: Cell) -> Optional[int]:
        d = int(self.distances_from(a)[b[1], b[0]])
        return None if d < 0 else d


@dataclass(frozen=True)
class Layout:
    maze: Maze
    pacman: Cell
    ghosts: tuple[Cell, ...]
    dots: frozenset
    energizers: frozenset


def parse_maze(text: str) -> Layout:
    """Parse the plain-text level format (``#`` wall, ``.`` dot, ``o`` energizer,
    space empty, ``P`` Pac-Man start, ``G`` ghost start)."""
    rows = [line.rstrip("\n\r") for line in text.splitlines()]
    while rows and not rows[-1].strip():
        rows.pop()
    if not rows:
        raise MazeFormatError("empty maze")
    width = max(len(r) for r in rows)
    rows = [r.ljust(width) for r in rows]

    walls = np.zeros((len(rows), width), dtype=bool)
    pacman = None
    ghosts, dots, energizers = [], set(), set()
    for y, row in enumerate(rows):
        for x, ch in enumerate(row):
            if ch not in _KNOWN:
                raise MazeFormatError(f"row {y}, column {x}: unknown cell {ch!r}")
            if ch == WALL:
                walls[y, x] = True
            elif ch == DOT:
                dots.add((x, y))
            elif ch == ENERGIZER:
                energizers.add((x, y))
            elif ch == PACMAN:
                if pacman is not None:
                    raise MazeFormatError("more than one Pac-Man start")
                pacman = (x, y)
            elif ch == GHOST:
                ghosts.append((x, y))

    border = np.concatenate([walls[0], walls[-1], walls[:, 0], walls[:, -1]])
    if not border.all():
        raise MazeFormatError("border cells must be walls")
    if pacman is None:
        raise MazeFormatError("no Pac-Man start")
    if not dots and not energizers:
        raise MazeFormatError("maze needs at least one dot")
    return Layout(Maze(walls), pacman, tuple(ghosts), frozenset(dots), frozenset(energizers))


def bfs_distance(maze: Maze, start: Cell, goal: Cell) -> Optional[int]:
    """Shortest 4-connected path length avoiding walls; None if unreachable."""
    if maze.is_wall(start) or maze.is_wall(goal):
        return None
    return maze.distance(start, goal)


@dataclass(frozen=True)
class Cluster:
    cells: tuple[Cell, ...]
    size: int
    centroid: tuple[float, float]


def dot_clusters(maze: Maze, dots: Iterable[Cell]) -> list[Cluster]:
    """4-connected components of dot cells, largest first.

    Equal sizes are ordered by their smallest row-major cell index.
    """
    mask = np.zeros_like(maze.walls)
    for x, y in dots:
        mask[y, x] = True
    labels, n = ndimage.label(mask)
    clusters = []
    for k in range(1, n + 1):
        ys, xs = np.nonzero(labels == k)
        cells = tuple(sorted(zip(xs.tolist(), ys.tolist()), key=maze.index))
        centroid = (float(xs.mean()), float(ys.mean()))
        clusters.append(Cluster(cells, len(cells), centroid))
    clusters.sort(key=lambda c: (-c.size, maze.index(c.cells[0])))
    return clusters
