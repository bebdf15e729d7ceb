"""Grid geometry: positions, directions, bounded movement.

Coordinate convention (fixed for reproducibility): x is the column in
[0, width), y is the row in [0, height), Up is +y and Right is +x.  Moves
that would leave the grid clamp to the current position.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import NamedTuple

from numba import njit


class Direction(IntEnum):
    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3
    STAY = 4

    @property
    def delta(self) -> tuple:
        return (_DX[self.value], _DY[self.value])


_DX = (0, 0, -1, 1, 0)
_DY = (1, -1, 0, 0, 0)


class Position(NamedTuple):
    x: int
    y: int


@dataclass(frozen=True)
class GridConfig:
    """Static world geometry and timing constants shared by all modules."""

    width: int
    height: int
    influence_radius: int      # follower sensing radius (Chebyshev)
    prop_radius: int           # propagator exchange radius (Chebyshev)
    prop_period: int           # rounds between propagation exchanges
    prop_max_dist: float       # max Euclidean distance records travel
    work_period: int           # consecutive rounds per unit of work
    follower_count: int


@njit(cache=True)
def _move(x, y, d, w, h):
    """One clamped step; d is a Direction value (STAY allowed)."""
    if d == 0:
        ny = y + 1
        if ny < h:
            return x, ny
    elif d == 1:
        ny = y - 1
        if ny >= 0:
            return x, ny
    elif d == 2:
        nx = x - 1
        if nx >= 0:
            return nx, y
    elif d == 3:
        nx = x + 1
        if nx < w:
            return nx, y
    return x, y


@njit(cache=True)
def _blocked(x, y, d, w, h):
    nx, ny = _move(x, y, d, w, h)
    return nx == x and ny == y and d != 4


@njit(cache=True)
def _step_toward(x, y, tx, ty):
    """One step reducing the axis with the larger |delta|; ties go to x."""
    dx = tx - x
    dy = ty - y
    if dx == 0 and dy == 0:
        return x, y
    adx = dx if dx >= 0 else -dx
    ady = dy if dy >= 0 else -dy
    if adx >= ady:
        return (x + 1, y) if dx > 0 else (x - 1, y)
    return (x, y + 1) if dy > 0 else (x, y - 1)


def apply_move(pos: Position, direction: Direction, grid: GridConfig) -> Position:
    """One-cell move; exiting moves return the unchanged position."""
    x, y = _move(pos.x, pos.y, int(direction), grid.width, grid.height)
    return Position(int(x), int(y))


def step_toward(pos: Position, target: Position) -> Position:
    """One diagonal-free step from pos toward target (see _step_toward)."""
    x, y = _step_toward(pos.x, pos.y, target.x, target.y)
    return Position(int(x), int(y))


def chebyshev(a: Position, b: Position) -> int:
    return max(abs(a.x - b.x), abs(a.y - b.y))
