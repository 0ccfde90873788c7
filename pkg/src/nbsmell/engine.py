"""Online coverage loop: enumerate candidate poses, score, move, scan, repeat.

Candidate positions are the frontier cells (scanned free cells adjacent to
unscanned free cells); before the first scan no frontier exists, so the
bootstrap candidate set is the start cell with every orientation. Each
candidate pose is scored by the Choquet integral of its normalized travel
distance, information gain, and sensing time; the best candidate is
executed and the loop repeats until no candidate can cover a new cell.

``run_coverage`` mutates the map it is given (scan bookkeeping); pass a
copy to keep the original pristine.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .grid import (
    Cell,
    GridMap,
    Pose,
    coverage_ratio,
    frontier_cells,
    heading_set,
    mark_scanned,
)
from .mcdm import (
    FuzzyMeasure,
    WeightConfig,
    build_measure,
    choquet_batch,
    named_measure,
    normalize_utilities,
)
from .planning import shortest_distances, travel_time
from .sensing import FosEvaluator, ScanResult, SensorModel

__all__ = [
    "Candidate",
    "CoverageEngine",
    "RunResult",
    "StepRecord",
    "enumerate_candidates",
    "resolve_measure",
    "run_coverage",
    "select_best",
    "uncoverable_cells",
]


@dataclass
class Candidate:
    """A scored (or scorable) candidate pose.

    ``utilities`` and ``score`` are filled in by :func:`select_best`, since
    normalization is relative to the whole candidate set.
    """

    pose: Pose
    distance: float  # meters from the current robot cell
    scan: ScanResult
    utilities: tuple[float, float, float] | None = None
    score: float | None = None


@dataclass(frozen=True)
class StepRecord:
    index: int  # 1-based
    pose: Pose
    phi_used: float  # degrees
    info_gain: int
    travel_time: float  # seconds
    sensing_time: float  # seconds
    cumulative_coverage: float
    candidates_evaluated: int
    decision_time: float  # wall-clock seconds spent enumerating + selecting


@dataclass
class RunResult:
    steps: list[StepRecord]
    total_sensing_ops: int
    total_travel_time: float
    total_sensing_time: float
    total_time: float
    coverage_satisfied: bool
    uncovered_cells: list[Cell]

    @property
    def total_decision_time(self) -> float:
        return sum(rec.decision_time for rec in self.steps)


def resolve_measure(config: str | WeightConfig | FuzzyMeasure) -> FuzzyMeasure:
    if isinstance(config, FuzzyMeasure):
        return config
    if isinstance(config, WeightConfig):
        return build_measure(config)
    return named_measure(config)


def _collect_candidates(
    grid: GridMap,
    evaluator: FosEvaluator,
    dist_field: np.ndarray,
    robot_cell: Cell,
    connectivity: int,
) -> list[Candidate]:
    if grid.scanned_count() == 0:
        positions = [robot_cell]
    else:
        positions = frontier_cells(grid, connectivity)
    headings = evaluator.orientations
    candidates: list[Candidate] = []
    for cell in positions:
        distance = float(dist_field[cell.y, cell.x])
        if not math.isfinite(distance):
            continue
        for theta, scan in zip(headings, evaluator.evaluate_cell(cell)):
            if scan.info_gain >= 1:
                candidates.append(Candidate(Pose(cell, theta), distance, scan))
    return candidates


def enumerate_candidates(
    grid: GridMap,
    robot: Pose,
    orientations: int,
    sensor: SensorModel,
    connectivity: int,
) -> list[Candidate]:
    """Candidates with positive information gain at reachable positions.

    Positions are frontier cells (or the robot cell before the first scan),
    iterated row-major with orientations ascending.
    """
    headings = heading_set(orientations)
    evaluator = FosEvaluator(grid, sensor, headings)
    dist_field = shortest_distances(grid, robot.cell, connectivity)
    return _collect_candidates(grid, evaluator, dist_field, robot.cell, connectivity)


def select_best(candidates: list[Candidate], measure: FuzzyMeasure) -> Candidate:
    """Normalize, score, and pick the best candidate.

    Ties on the Choquet score break deterministically: smaller distance,
    then smaller sensing time, then row-major cell order, then smaller
    heading (the construction order of the candidate list).
    """
    if not candidates:
        raise ValueError("select_best needs at least one candidate")
    raw = np.array(
        [(c.scan.info_gain, c.distance, c.scan.sensing_time) for c in candidates],
        dtype=np.float64,
    )
    utilities = normalize_utilities(raw)
    scores = choquet_batch(utilities, measure)
    for cand, u, s in zip(candidates, utilities, scores):
        cand.utilities = (float(u[0]), float(u[1]), float(u[2]))
        cand.score = float(s)

    best = candidates[0]
    best_key = (best.score, -best.distance, -best.scan.sensing_time)
    for cand in candidates[1:]:
        key = (cand.score, -cand.distance, -cand.scan.sensing_time)
        if key > best_key:
            best = cand
            best_key = key
    return best


class CoverageEngine:
    """Stateful coverage run over one grid map (which it mutates)."""

    def __init__(
        self,
        grid: GridMap,
        config: str | WeightConfig | FuzzyMeasure,
        sensor: SensorModel,
        orientations: int = 4,
        connectivity: int = 4,
        speed: float = 1.0,
        target_coverage: float = 1.0,
    ) -> None:
        if not speed > 0:
            raise ValueError(f"speed must be > 0, got {speed}")
        if not 0.0 < target_coverage <= 1.0:
            raise ValueError(
                f"target_coverage must be in (0, 1], got {target_coverage}"
            )
        self.grid = grid
        self.measure = resolve_measure(config)
        self.sensor = sensor
        self.connectivity = connectivity
        self.speed = speed
        self.target_coverage = target_coverage
        self.headings = heading_set(orientations)
        self.evaluator = FosEvaluator(grid, sensor, self.headings)
        self.robot = Pose(grid.start, self.headings[0])
        self.records: list[StepRecord] = []
        self._done = False

    def step(self) -> StepRecord | None:
        """Execute one sensing operation; None when no candidate remains."""
        if self._done:
            return None
        started = time.perf_counter()
        dist_field = shortest_distances(self.grid, self.robot.cell, self.connectivity)
        candidates = _collect_candidates(
            self.grid, self.evaluator, dist_field, self.robot.cell, self.connectivity
        )
        if not candidates:
            self._done = True
            return None
        best = select_best(candidates, self.measure)
        decision_time = time.perf_counter() - started

        move_time = travel_time(best.distance, self.speed)
        new_cells = best.scan.new_cells()
        marked = mark_scanned(self.grid, new_cells)
        if marked != best.scan.info_gain:
            raise RuntimeError(
                f"scan bookkeeping out of sync: marked {marked}, "
                f"expected {best.scan.info_gain}"
            )
        self.evaluator.mark_scanned(new_cells)
        self.robot = best.pose

        record = StepRecord(
            index=len(self.records) + 1,
            pose=best.pose,
            phi_used=best.scan.phi_used,
            info_gain=best.scan.info_gain,
            travel_time=move_time,
            sensing_time=best.scan.sensing_time,
            cumulative_coverage=coverage_ratio(self.grid),
            candidates_evaluated=len(candidates),
            decision_time=decision_time,
        )
        self.records.append(record)
        return record

    def run(self) -> RunResult:
        while coverage_ratio(self.grid) < self.target_coverage:
            if self.step() is None:
                break
        total_travel = sum(rec.travel_time for rec in self.records)
        total_sensing = sum(rec.sensing_time for rec in self.records)
        uncovered = self.grid.unscanned_cells()
        return RunResult(
            steps=list(self.records),
            total_sensing_ops=len(self.records),
            total_travel_time=total_travel,
            total_sensing_time=total_sensing,
            total_time=total_travel + total_sensing,
            coverage_satisfied=not uncovered,
            uncovered_cells=uncovered,
        )


def run_coverage(
    grid: GridMap,
    config: str | WeightConfig | FuzzyMeasure,
    sensor: SensorModel,
    orientations: int = 4,
    connectivity: int = 4,
    speed: float = 1.0,
    target_coverage: float = 1.0,
) -> RunResult:
    """Run the coverage loop to completion on ``grid`` (mutated in place)."""
    engine = CoverageEngine(
        grid,
        config,
        sensor,
        orientations=orientations,
        connectivity=connectivity,
        speed=speed,
        target_coverage=target_coverage,
    )
    return engine.run()


def uncoverable_cells(
    grid: GridMap,
    sensor: SensorModel,
    orientations: int,
    connectivity: int,
) -> list[Cell]:
    """Free cells whose centers no feasible sweep can cover.

    Exhaustive check: a cell is coverable when some free cell reachable
    from the map start has line of sight to it within sensor range and its
    bearing falls inside the opening-angle window of at least one
    orientation.  Every free cell trivially covers itself.
    """
    headings = heading_set(orientations)
    evaluator = FosEvaluator(grid, sensor, headings)
    dist_field = shortest_distances(grid, grid.start, connectivity)
    reachable = np.isfinite(dist_field)
    disk = evaluator.disk

    window_any = np.zeros(disk.k, dtype=bool)
    for mask in evaluator.window_masks:
        window_any |= mask

    coverable = np.zeros((grid.height, grid.width), dtype=bool)
    ys, xs = np.nonzero(reachable)
    for y, x in zip(ys, xs):
        coverable[y, x] = True  # own cell is always covered by a scan there
        vis = evaluator.visible(Cell(int(x), int(y)))
        idx = np.nonzero(vis & window_any)[0]
        coverable[disk.dy[idx] + y, disk.dx[idx] + x] = True

    out = []
    free = grid.free_mask()
    for y in range(grid.height):
        for x in range(grid.width):
            if free[y, x] and not coverable[y, x]:
                out.append(Cell(x, y))
    return out
