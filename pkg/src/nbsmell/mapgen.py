"""Synthetic test environments: empty, corridor, rooms, and random maps.

All generators are pure functions of their parameters (PCG64 seeded
streams), so generated maps are reproducible across runs.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .grid import Cell, CellState, GridMap, generate_random_grid, parse_map

__all__ = ["corridor_map", "empty_map", "generate_map", "rooms_map", "shipped_map"]

SHIPPED_MAPS = {
    "corridor": "corridor_60x10.txt",
    "rooms": "rooms_80x80.txt",
}


def shipped_map(name: str) -> GridMap:
    """Load one of the packaged benchmark maps ('corridor' or 'rooms')."""
    try:
        filename = SHIPPED_MAPS[name]
    except KeyError:
        raise ValueError(
            f"unknown shipped map {name!r}; expected one of {sorted(SHIPPED_MAPS)}"
        ) from None
    text = (resources.files("nbsmell") / "maps" / filename).read_text()
    return parse_map(text)


def _start_near_center(states: np.ndarray) -> Cell:
    """Free cell nearest the grid center (ties: smallest row, then column)."""
    h, w = states.shape
    cx = (w - 1) / 2.0
    cy = (h - 1) / 2.0
    ys, xs = np.nonzero(states != CellState.OBSTACLE)
    d2 = (xs - cx) ** 2 + (ys - cy) ** 2
    best = np.lexsort((xs, ys, d2))[0]
    return Cell(int(xs[best]), int(ys[best]))


def empty_map(width: int, height: int, resolution: float = 1.0) -> GridMap:
    states = np.full((height, width), CellState.FREE_UNSCANNED, dtype=np.uint8)
    return GridMap(
        width=width,
        height=height,
        resolution=resolution,
        states=states,
        start=_start_near_center(states),
    )


def corridor_map(width: int, height: int, seed: int = 0,
                 resolution: float = 0.5) -> GridMap:
    """Long thin corridor with side rooms opening onto it through doors.

    A two-row corridor runs the full width at mid-height; the bands above
    and below are partitioned into rooms by one-cell walls, each room
    connected to the corridor by a short door gap.
    """
    if width < 8 or height < 7:
        raise ValueError(f"corridor maps need at least 8x7 cells, got {width}x{height}")
    rng = np.random.Generator(np.random.PCG64(seed))
    states = np.full((height, width), CellState.FREE_UNSCANNED, dtype=np.uint8)
    cy = height // 2 - 1  # corridor occupies rows cy and cy+1

    def build_band(wall_row: int, interior_rows: slice) -> None:
        states[wall_row, :] = CellState.OBSTACLE
        # partition the band into rooms with vertical dividers
        edges = [0]
        x = 0
        while True:
            x += int(rng.integers(8, 14))
            if x >= width - 4:
                break
            edges.append(x)
            states[interior_rows, x] = CellState.OBSTACLE
        edges.append(width)
        # one door per room through the wall row
        for left, right in zip(edges, edges[1:]):
            lo = left + 1 if left > 0 else 0
            hi = right - 1
            if hi - lo < 2:
                continue
            door = int(rng.integers(lo, hi - 1))
            states[wall_row, door:door + 2] = CellState.FREE_UNSCANNED

    build_band(cy - 1, slice(0, cy - 1))
    build_band(cy + 2, slice(cy + 3, height))
    return GridMap(
        width=width,
        height=height,
        resolution=resolution,
        states=states,
        start=_start_near_center(states),
    )


def rooms_map(width: int, height: int, seed: int = 0,
              resolution: float = 1.0) -> GridMap:
    """Large connected open rooms separated by walls with wide doorways."""
    if width < 16 or height < 16:
        raise ValueError(f"rooms maps need at least 16x16 cells, got {width}x{height}")
    rng = np.random.Generator(np.random.PCG64(seed))
    states = np.full((height, width), CellState.FREE_UNSCANNED, dtype=np.uint8)
    nx = max(2, round(width / 28))
    ny = max(2, round(height / 28))
    wall_xs = [i * width // nx for i in range(1, nx)]
    wall_ys = [i * height // ny for i in range(1, ny)]
    for x in wall_xs:
        states[:, x] = CellState.OBSTACLE
    for y in wall_ys:
        states[y, :] = CellState.OBSTACLE

    door = 4
    y_edges = [0] + wall_ys + [height]
    x_edges = [0] + wall_xs + [width]
    for x in wall_xs:  # doorway per vertical wall segment
        for top, bottom in zip(y_edges, y_edges[1:]):
            lo, hi = top + 1, bottom - 1
            if hi - lo < door:
                continue
            at = int(rng.integers(lo, hi - door + 1))
            states[at:at + door, x] = CellState.FREE_UNSCANNED
    for y in wall_ys:  # doorway per horizontal wall segment
        for left, right in zip(x_edges, x_edges[1:]):
            lo, hi = left + 1, right - 1
            if hi - lo < door:
                continue
            at = int(rng.integers(lo, hi - door + 1))
            states[y, at:at + door] = CellState.FREE_UNSCANNED
    return GridMap(
        width=width,
        height=height,
        resolution=resolution,
        states=states,
        start=_start_near_center(states),
    )


def generate_map(kind: str, width: int, height: int, seed: int = 0,
                 obstacle_ratio: float = 0.1,
                 resolution: float | None = None) -> GridMap:
    """Dispatch to a generator by kind: empty, corridor, rooms, or random."""
    if kind == "empty":
        return empty_map(width, height, resolution=resolution or 1.0)
    if kind == "corridor":
        return corridor_map(width, height, seed=seed, resolution=resolution or 0.5)
    if kind == "rooms":
        return rooms_map(width, height, seed=seed, resolution=resolution or 1.0)
    if kind == "random":
        if width != height:
            raise ValueError("random maps are square; width must equal height")
        grid = generate_random_grid(width, obstacle_ratio, seed)
        if resolution is not None:
            grid.resolution = resolution
        return grid
    raise ValueError(f"unknown map kind {kind!r}")
