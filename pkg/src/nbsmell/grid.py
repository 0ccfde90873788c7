"""Occupancy grid: map data model, ASCII map I/O, random generation, frontiers.

Conventions used throughout the package: the grid is stored row-major with
``y`` increasing downward, cells are addressed as ``Cell(x, y)`` with ``x``
the column and ``y`` the row, and headings are measured counter-clockwise
from the +x axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, NamedTuple

import numpy as np

__all__ = [
    "Cell",
    "CellState",
    "GridMap",
    "MapFormatError",
    "Pose",
    "coverage_ratio",
    "frontier_cells",
    "generate_random_grid",
    "heading_set",
    "mark_scanned",
    "parse_map",
    "serialize_map",
]

FREE_CHAR = "."
OBSTACLE_CHAR = "#"
START_CHAR = "S"


class Cell(NamedTuple):
    """A grid cell addressed by column ``x`` and row ``y`` (both 0-based)."""

    x: int
    y: int


class Pose(NamedTuple):
    """A robot pose: a free cell plus a heading in radians."""

    cell: Cell
    theta: float


class CellState(IntEnum):
    OBSTACLE = 0
    FREE_UNSCANNED = 1
    FREE_SCANNED = 2


class MapFormatError(ValueError):
    """Raised when an ASCII map document cannot be parsed."""


def heading_set(count: int) -> tuple[float, ...]:
    """Equally spaced headings in [0, 2*pi), starting at 0.

    Only 4 or 8 orientations are supported (axis directions, plus the
    45-degree diagonals for 8).
    """
    if count not in (4, 8):
        raise ValueError(f"orientation count must be 4 or 8, got {count}")
    return tuple(2.0 * math.pi * k / count for k in range(count))


@dataclass(eq=False)
class GridMap:
    """Dense occupancy grid with per-cell scan bookkeeping.

    ``states`` is a (height, width) uint8 array of :class:`CellState` values.
    Obstacles never change; free cells transition monotonically from
    unscanned to scanned.  The map object is cheap to copy and safe to share
    read-only; mutation happens only through :func:`mark_scanned`.
    """

    width: int
    height: int
    resolution: float
    states: np.ndarray
    start: Cell
    _graphs: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.resolution <= 0:
            raise ValueError(f"resolution must be > 0, got {self.resolution}")
        if self.states.shape != (self.height, self.width):
            raise ValueError(
                f"states shape {self.states.shape} does not match "
                f"{self.height}x{self.width}"
            )
        if not self.in_bounds(self.start):
            raise ValueError(f"start cell {self.start} out of bounds")
        if self.states[self.start.y, self.start.x] == CellState.OBSTACLE:
            raise ValueError(f"start cell {self.start} is an obstacle")

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell.x < self.width and 0 <= cell.y < self.height

    def state(self, cell: Cell) -> CellState:
        return CellState(self.states[cell.y, cell.x])

    def is_free(self, cell: Cell) -> bool:
        return self.in_bounds(cell) and self.states[cell.y, cell.x] != CellState.OBSTACLE

    def free_mask(self) -> np.ndarray:
        return self.states != CellState.OBSTACLE

    def unscanned_mask(self) -> np.ndarray:
        return self.states == CellState.FREE_UNSCANNED

    def scanned_mask(self) -> np.ndarray:
        return self.states == CellState.FREE_SCANNED

    def free_count(self) -> int:
        return int(np.count_nonzero(self.states != CellState.OBSTACLE))

    def scanned_count(self) -> int:
        return int(np.count_nonzero(self.states == CellState.FREE_SCANNED))

    def free_cells(self) -> list[Cell]:
        ys, xs = np.nonzero(self.states != CellState.OBSTACLE)
        return [Cell(int(x), int(y)) for y, x in zip(ys, xs)]

    def unscanned_cells(self) -> list[Cell]:
        ys, xs = np.nonzero(self.states == CellState.FREE_UNSCANNED)
        return [Cell(int(x), int(y)) for y, x in zip(ys, xs)]

    def copy(self) -> "GridMap":
        return GridMap(
            width=self.width,
            height=self.height,
            resolution=self.resolution,
            states=self.states.copy(),
            start=self.start,
        )


def parse_map(text: str) -> GridMap:
    """Parse an ASCII map document.

    Format: a ``resolution <meters>`` header line followed by equal-length
    rows over the alphabet ``.`` (free), ``#`` (obstacle), ``S`` (free start
    cell, exactly one).
    """
    lines = text.splitlines()
    if not lines:
        raise MapFormatError("empty map document (line 1)")
    header = lines[0].split()
    if len(header) != 2 or header[0] != "resolution":
        raise MapFormatError(
            f"line 1: expected 'resolution <meters>', got {lines[0]!r}"
        )
    try:
        resolution = float(header[1])
    except ValueError:
        raise MapFormatError(f"line 1: invalid resolution {header[1]!r}") from None
    if not math.isfinite(resolution) or resolution <= 0:
        raise MapFormatError(f"line 1: resolution must be > 0, got {header[1]!r}")

    rows = lines[1:]
    if not rows:
        raise MapFormatError("map document has no grid rows (line 2)")
    width = len(rows[0])
    if width == 0:
        raise MapFormatError("line 2: empty map row")

    states = np.empty((len(rows), width), dtype=np.uint8)
    start: Cell | None = None
    for y, row in enumerate(rows):
        line_no = y + 2
        if len(row) != width:
            raise MapFormatError(
                f"line {line_no}: ragged row (length {len(row)}, expected {width})"
            )
        for x, ch in enumerate(row):
            if ch == FREE_CHAR:
                states[y, x] = CellState.FREE_UNSCANNED
            elif ch == OBSTACLE_CHAR:
                states[y, x] = CellState.OBSTACLE
            elif ch == START_CHAR:
                if start is not None:
                    raise MapFormatError(
                        f"line {line_no}, column {x + 1}: multiple start cells"
                    )
                start = Cell(x, y)
                states[y, x] = CellState.FREE_UNSCANNED
            else:
                raise MapFormatError(
                    f"line {line_no}, column {x + 1}: illegal character {ch!r}"
                )
    if start is None:
        raise MapFormatError("map document has no start cell 'S'")
    return GridMap(
        width=width,
        height=len(rows),
        resolution=resolution,
        states=states,
        start=start,
    )


def serialize_map(grid: GridMap) -> str:
    """Serialize a map to the ASCII format accepted by :func:`parse_map`.

    Scan flags are not representable in the format; scanned cells are
    emitted as plain free cells.
    """
    out = [f"resolution {grid.resolution!r}"]
    for y in range(grid.height):
        chars = []
        for x in range(grid.width):
            if Cell(x, y) == grid.start:
                chars.append(START_CHAR)
            elif grid.states[y, x] == CellState.OBSTACLE:
                chars.append(OBSTACLE_CHAR)
            else:
                chars.append(FREE_CHAR)
        out.append("".join(chars))
    return "\n".join(out) + "\n"


def generate_random_grid(size: int, obstacle_ratio: float, seed: int) -> GridMap:
    """Square random grid: obstacles sampled uniformly without replacement.

    The PRNG is numpy's PCG64 seeded with ``seed``; the obstacle count is
    ``round(obstacle_ratio * size**2)``.  The start is the free cell nearest
    the grid center (ties: smallest row, then column).  Resolution is 1.0 m.
    """
    if size < 1:
        raise ValueError(f"size must be >= 1, got {size}")
    if not 0.0 <= obstacle_ratio < 1.0:
        raise ValueError(f"obstacle_ratio must be in [0, 1), got {obstacle_ratio}")
    n_cells = size * size
    n_obstacles = round(obstacle_ratio * n_cells)
    if n_obstacles >= n_cells:
        raise ValueError("obstacle ratio leaves no free cells")

    rng = np.random.Generator(np.random.PCG64(seed))
    states = np.full((size, size), CellState.FREE_UNSCANNED, dtype=np.uint8)
    if n_obstacles:
        flat = rng.choice(n_cells, size=n_obstacles, replace=False)
        states.reshape(-1)[flat] = CellState.OBSTACLE

    center = (size - 1) / 2.0
    ys, xs = np.nonzero(states != CellState.OBSTACLE)
    d2 = (xs - center) ** 2 + (ys - center) ** 2
    order = np.lexsort((xs, ys, d2))
    best = order[0]
    start = Cell(int(xs[best]), int(ys[best]))
    return GridMap(width=size, height=size, resolution=1.0, states=states, start=start)


_NEIGHBORS_4 = ((1, 0), (-1, 0), (0, 1), (0, -1))
_NEIGHBORS_8 = _NEIGHBORS_4 + ((1, 1), (1, -1), (-1, 1), (-1, -1))


def neighbor_offsets(connectivity: int) -> tuple[tuple[int, int], ...]:
    if connectivity == 4:
        return _NEIGHBORS_4
    if connectivity == 8:
        return _NEIGHBORS_8
    raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")


def frontier_cells(grid: GridMap, connectivity: int) -> list[Cell]:
    """Scanned free cells adjacent to at least one unscanned free cell.

    Returned in row-major order.
    """
    offsets = neighbor_offsets(connectivity)
    scanned = grid.scanned_mask()
    unscanned = grid.unscanned_mask()
    has_unscanned_neighbor = np.zeros_like(scanned)
    h, w = scanned.shape
    for dx, dy in offsets:
        src_y = slice(max(0, -dy), min(h, h - dy))
        src_x = slice(max(0, -dx), min(w, w - dx))
        dst_y = slice(max(0, dy), min(h, h + dy))
        dst_x = slice(max(0, dx), min(w, w + dx))
        has_unscanned_neighbor[src_y, src_x] |= unscanned[dst_y, dst_x]
    ys, xs = np.nonzero(scanned & has_unscanned_neighbor)
    return [Cell(int(x), int(y)) for y, x in zip(ys, xs)]


def mark_scanned(grid: GridMap, cells: Iterable[Cell]) -> int:
    """Mark free cells as scanned; returns the number of new transitions.

    Idempotent on already-scanned cells.  Marking an obstacle is a contract
    violation and raises.
    """
    count = 0
    for cell in cells:
        state = grid.states[cell.y, cell.x]
        if state == CellState.OBSTACLE:
            raise ValueError(f"cannot scan obstacle cell {cell}")
        if state == CellState.FREE_UNSCANNED:
            grid.states[cell.y, cell.x] = CellState.FREE_SCANNED
            count += 1
    return count


def coverage_ratio(grid: GridMap) -> float:
    """Scanned free cells divided by total free cells."""
    free = grid.free_count()
    if free == 0:
        raise ValueError("map has no free cells")
    return grid.scanned_count() / free
