"""Field-of-smell geometry: ray casting, scan-angle trimming, sensing time.

A remote gas sensor mounted on a pan-tilt unit sweeps a circular sector. A
free cell is smellable from a pose when its center lies inside the sector
and the segment between cell centers crosses no obstacle cell. The sweep
executed at a pose is trimmed to the angular span of the currently
unscanned smellable cells, so the sensor never sweeps wider than needed.

Segment/cell intersection policy: a cell counts as crossed when the open
segment passes through its interior. When the segment runs exactly through
a lattice corner the traversal steps diagonally, so cells touched only at
that corner point do not block. This rule is exact (integer arithmetic, no
epsilon) and matches dense point-sampling of the segment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .grid import Cell, CellState, GridMap, Pose

__all__ = [
    "ScanResult",
    "SensorModel",
    "compute_fos",
    "line_of_sight",
    "sensing_time",
    "traverse_segment",
    "visible_cells",
    "FosEvaluator",
]


@dataclass(frozen=True)
class SensorModel:
    """Remote gas sensor parameters.

    ``r_max`` is the metric range limit, ``phi_max`` the maximum opening
    angle in degrees.  The sweep time is linear in the executed angle:
    ``setup_time + sweep_rate * phi``.  The defaults reproduce a pan-tilt
    TDLAS unit that needs 21 s for a 45-degree sweep and 36 s for 90
    degrees.
    """

    r_max: float
    phi_max: float = 180.0
    setup_time: float = 6.0
    sweep_rate: float = 1.0 / 3.0  # seconds per degree

    def __post_init__(self) -> None:
        if not self.r_max > 0:
            raise ValueError(f"r_max must be > 0, got {self.r_max}")
        if not 0 < self.phi_max <= 180:
            raise ValueError(f"phi_max must be in (0, 180], got {self.phi_max}")
        if self.setup_time < 0:
            raise ValueError(f"setup_time must be >= 0, got {self.setup_time}")
        if not self.sweep_rate > 0:
            raise ValueError(f"sweep_rate must be > 0, got {self.sweep_rate}")


def sensing_time(phi: float, sensor: SensorModel) -> float:
    """Duration of a sweep of ``phi`` degrees; 0 when no scan is performed."""
    if phi < 0 or phi > sensor.phi_max:
        raise ValueError(f"phi {phi} outside [0, {sensor.phi_max}]")
    if phi == 0:
        return 0.0
    return sensor.setup_time + sensor.sweep_rate * phi


def traverse_segment(x0: int, y0: int, x1: int, y1: int) -> list[tuple[int, int]]:
    """Cells whose interior the segment between cell centers crosses.

    Exact integer walk: boundary crossings are ordered by comparing
    ``(2*ix + 1) * ny`` against ``(2*iy + 1) * nx``; a tie means the segment
    passes exactly through a lattice corner and the walk steps diagonally.
    Includes both endpoint cells.
    """
    dx = x1 - x0
    dy = y1 - y0
    sx = 1 if dx > 0 else -1
    sy = 1 if dy > 0 else -1
    nx = abs(dx)
    ny = abs(dy)
    ix = iy = 0
    cells = [(x0, y0)]
    while ix < nx or iy < ny:
        tx = (2 * ix + 1) * ny
        ty = (2 * iy + 1) * nx
        if tx < ty:
            ix += 1
        elif tx > ty:
            iy += 1
        else:
            ix += 1
            iy += 1
        cells.append((x0 + sx * ix, y0 + sy * iy))
    return cells


def line_of_sight(grid: GridMap, a: Cell, b: Cell) -> bool:
    """True when the segment between the cell centers crosses no obstacle."""
    states = grid.states
    for x, y in traverse_segment(a.x, a.y, b.x, b.y):
        if states[y, x] == CellState.OBSTACLE:
            return False
    return True


class _RayDisk:
    """Precomputed ray bundle to every cell offset within sensor range.

    Offsets exclude (0, 0) and satisfy ``(dx^2 + dy^2) * resolution^2 <=
    r_max^2``.  Rays are stored as padded (K, L) coordinate arrays so that
    visibility for a whole pose is a single vectorized gather.
    """

    def __init__(self, r_max: float, resolution: float) -> None:
        rc2 = (r_max / resolution) ** 2
        reach = int(math.floor(math.sqrt(rc2)))
        self.reach = max(reach, 1)
        offsets = []
        for oy in range(-reach, reach + 1):
            for ox in range(-reach, reach + 1):
                if ox == 0 and oy == 0:
                    continue
                if (ox * ox + oy * oy) * resolution * resolution <= r_max * r_max:
                    offsets.append((ox, oy))
        k = len(offsets)
        self.k = k
        self.dx = np.array([o[0] for o in offsets], dtype=np.int32)
        self.dy = np.array([o[1] for o in offsets], dtype=np.int32)
        self.bearings = np.arctan2(self.dy.astype(np.float64), self.dx.astype(np.float64))

        max_len = 1
        rays = []
        for ox, oy in offsets:
            ray = traverse_segment(0, 0, ox, oy)[1:]  # own cell handled separately
            rays.append(ray)
            max_len = max(max_len, len(ray))
        self.ray_len = max_len
        self.ray_x = np.zeros((k, max_len), dtype=np.int32)
        self.ray_y = np.zeros((k, max_len), dtype=np.int32)
        for i, ray in enumerate(rays):
            n = len(ray)
            self.ray_x[i, :n] = [c[0] for c in ray]
            self.ray_y[i, :n] = [c[1] for c in ray]
            # pad with the endpoint; re-checking it is harmless
            self.ray_x[i, n:] = ray[-1][0]
            self.ray_y[i, n:] = ray[-1][1]


@lru_cache(maxsize=16)
def _ray_disk(r_max: float, resolution: float) -> _RayDisk:
    return _RayDisk(r_max, resolution)


def _wrap_angles(angles: np.ndarray) -> np.ndarray:
    return np.arctan2(np.sin(angles), np.cos(angles))


@dataclass(eq=False)
class ScanResult:
    """Outcome of one sensing operation at a fixed pose.

    ``smellable_all`` is every free cell the trimmed sweep covers (always
    including the pose's own cell); ``smellable_new`` is its previously
    unscanned subset, snapshotted at evaluation time.  ``info_gain`` equals
    ``len(smellable_new)``.  The cell sets are materialized lazily from the
    underlying ray masks.
    """

    phi_used: float  # degrees
    sensing_time: float  # seconds
    info_gain: int
    origin: Cell
    _own_new: bool
    _new_offsets: np.ndarray = field(repr=False)
    _disk: _RayDisk = field(repr=False)
    _vis: np.ndarray = field(repr=False)
    _window: np.ndarray = field(repr=False)
    _rel: np.ndarray = field(repr=False)
    _alpha: tuple[float, float] | None = field(repr=False)

    @cached_property
    def smellable_new(self) -> set[Cell]:
        cells = self._offsets_to_cells(self._new_offsets)
        if self._own_new:
            cells.add(self.origin)
        return cells

    @cached_property
    def smellable_all(self) -> set[Cell]:
        if self._alpha is None:
            return {self.origin}
        lo, hi = self._alpha
        mask = self._vis & self._window & (self._rel >= lo) & (self._rel <= hi)
        cells = self._offsets_to_cells(np.nonzero(mask)[0])
        cells.add(self.origin)
        return cells

    def new_cells(self) -> list[Cell]:
        """Newly covered cells in deterministic (offset-table) order."""
        cells = self._offsets_to_cells_list(self._new_offsets)
        if self._own_new:
            cells.append(self.origin)
        return cells

    def _offsets_to_cells(self, idx: np.ndarray) -> set[Cell]:
        return set(self._offsets_to_cells_list(idx))

    def _offsets_to_cells_list(self, idx: np.ndarray) -> list[Cell]:
        xs = self._disk.dx[idx] + self.origin.x
        ys = self._disk.dy[idx] + self.origin.y
        return [Cell(int(x), int(y)) for x, y in zip(xs, ys)]


class FosEvaluator:
    """Vectorized field-of-smell evaluation over one grid.

    Holds padded obstacle/unscanned mirrors of the grid plus a per-cell
    visibility cache.  Visibility depends only on obstacles, which never
    change, so cached entries stay valid for the life of the evaluator;
    the unscanned mirror must be kept in sync through :meth:`mark_scanned`.
    """

    def __init__(self, grid: GridMap, sensor: SensorModel,
                 orientations: tuple[float, ...]) -> None:
        self.grid = grid
        self.sensor = sensor
        self.orientations = tuple(orientations)
        self.disk = _ray_disk(sensor.r_max, grid.resolution)
        pad = self.disk.reach
        self._pad = pad
        wp = grid.width + 2 * pad
        hp = grid.height + 2 * pad
        self._wp = wp
        obstacle = np.ones((hp, wp), dtype=bool)
        obstacle[pad:pad + grid.height, pad:pad + grid.width] = (
            grid.states == CellState.OBSTACLE
        )
        unscanned = np.zeros((hp, wp), dtype=bool)
        unscanned[pad:pad + grid.height, pad:pad + grid.width] = (
            grid.states == CellState.FREE_UNSCANNED
        )
        self._obstacle_flat = obstacle.reshape(-1)
        self._unscanned_flat = unscanned.reshape(-1)

        self._end_flat = self.disk.dy.astype(np.int64) * wp + self.disk.dx
        self._ray_flat = self.disk.ray_y.astype(np.int64) * wp + self.disk.ray_x

        half = math.radians(sensor.phi_max) / 2.0
        self.rel_bearings: list[np.ndarray] = []
        self.window_masks: list[np.ndarray] = []
        for theta in self.orientations:
            rel = _wrap_angles(self.disk.bearings - theta)
            self.rel_bearings.append(rel)
            self.window_masks.append(np.abs(rel) <= half)
        self._vis_cache: dict[int, np.ndarray] = {}

    def _pos_flat(self, cell: Cell) -> int:
        return (cell.y + self._pad) * self._wp + (cell.x + self._pad)

    def visible(self, cell: Cell) -> np.ndarray:
        """Boolean mask over the ray disk: offset free and line of sight clear."""
        pos = self._pos_flat(cell)
        cached = self._vis_cache.get(pos)
        if cached is not None:
            return cached
        if self.disk.k == 0:
            vis = np.zeros(0, dtype=bool)
        else:
            blocked = self._obstacle_flat[pos + self._ray_flat]
            vis = ~blocked.any(axis=1)
        self._vis_cache[pos] = vis
        return vis

    def mark_scanned(self, cells: list[Cell]) -> None:
        """Sync the padded unscanned mirror after the grid was mutated."""
        pad, wp = self._pad, self._wp
        for c in cells:
            self._unscanned_flat[(c.y + pad) * wp + (c.x + pad)] = False

    def evaluate_cell(self, cell: Cell) -> list[ScanResult]:
        """Scan results for every orientation at ``cell`` (orientation order)."""
        pos = self._pos_flat(cell)
        vis = self.visible(cell)
        unscanned = self._unscanned_flat[pos + self._end_flat]
        own_new = bool(self.grid.states[cell.y, cell.x] == CellState.FREE_UNSCANNED)
        results = []
        for rel, window in zip(self.rel_bearings, self.window_masks):
            results.append(self._evaluate(cell, vis, unscanned, own_new, rel, window))
        return results

    def _evaluate(self, cell: Cell, vis: np.ndarray, unscanned: np.ndarray,
                  own_new: bool, rel: np.ndarray, window: np.ndarray) -> ScanResult:
        new_mask = vis & window & unscanned
        new_offsets = np.nonzero(new_mask)[0]
        if new_offsets.size == 0:
            gain = 1 if own_new else 0
            return ScanResult(
                phi_used=0.0,
                sensing_time=self.sensor.setup_time if gain else 0.0,
                info_gain=gain,
                origin=cell,
                _own_new=own_new,
                _new_offsets=new_offsets,
                _disk=self.disk,
                _vis=vis,
                _window=window,
                _rel=rel,
                _alpha=None,
            )
        rel_new = rel[new_offsets]
        lo = float(rel_new.min())
        hi = float(rel_new.max())
        phi = math.degrees(hi - lo)
        gain = int(new_offsets.size) + (1 if own_new else 0)
        return ScanResult(
            phi_used=phi,
            sensing_time=self.sensor.setup_time + self.sensor.sweep_rate * phi,
            info_gain=gain,
            origin=cell,
            _own_new=own_new,
            _new_offsets=new_offsets,
            _disk=self.disk,
            _vis=vis,
            _window=window,
            _rel=rel,
            _alpha=(lo, hi),
        )


def compute_fos(grid: GridMap, pose: Pose, sensor: SensorModel) -> ScanResult:
    """Evaluate one sensing operation at ``pose`` against the current map."""
    if not grid.is_free(pose.cell):
        raise ValueError(f"pose cell {pose.cell} is not a free cell")
    evaluator = FosEvaluator(grid, sensor, (pose.theta,))
    return evaluator.evaluate_cell(pose.cell)[0]


def visible_cells(grid: GridMap, cell: Cell, r_max: float) -> set[Cell]:
    """Free cells within metric range of ``cell`` with clear line of sight.

    Range and occlusion only; no angular window is applied and the cell
    itself is not included.
    """
    disk = _ray_disk(r_max, grid.resolution)
    sensor = SensorModel(r_max=r_max)
    evaluator = FosEvaluator(grid, sensor, ())
    vis = evaluator.visible(cell)
    idx = np.nonzero(vis)[0]
    return {
        Cell(int(disk.dx[i] + cell.x), int(disk.dy[i] + cell.y)) for i in idx
    }
