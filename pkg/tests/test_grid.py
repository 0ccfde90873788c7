import numpy as np
import pytest

from nbsmell.grid import (
    Cell,
    CellState,
    MapFormatError,
    coverage_ratio,
    frontier_cells,
    generate_random_grid,
    heading_set,
    mark_scanned,
    parse_map,
    serialize_map,
)


class TestParseMap:
    def test_minimal_two_by_two(self):
        grid = parse_map("resolution 1.0\nS.\n.#")
        assert (grid.width, grid.height) == (2, 2)
        assert grid.resolution == 1.0
        assert grid.start == Cell(0, 0)
        assert grid.free_count() == 3
        assert grid.state(Cell(1, 1)) == CellState.OBSTACLE
        assert grid.state(Cell(0, 0)) == CellState.FREE_UNSCANNED

    def test_single_cell_map(self):
        grid = parse_map("resolution 0.5\nS")
        assert (grid.width, grid.height) == (1, 1)
        assert grid.resolution == 0.5
        assert grid.start == Cell(0, 0)

    def test_multiple_starts_rejected(self):
        with pytest.raises(MapFormatError, match="multiple start"):
            parse_map("resolution 1.0\nSS")

    def test_missing_start_rejected(self):
        with pytest.raises(MapFormatError, match="no start"):
            parse_map("resolution 1.0\n..\n..")

    def test_ragged_rows_rejected(self):
        with pytest.raises(MapFormatError, match="line 3.*ragged"):
            parse_map("resolution 1.0\nS..\n..")

    def test_illegal_character_names_position(self):
        with pytest.raises(MapFormatError, match="line 2, column 2"):
            parse_map("resolution 1.0\nSx.")

    def test_missing_resolution_header(self):
        with pytest.raises(MapFormatError, match="resolution"):
            parse_map("S.\n..")

    def test_bad_resolution_value(self):
        with pytest.raises(MapFormatError):
            parse_map("resolution zero\nS.")
        with pytest.raises(MapFormatError):
            parse_map("resolution -1\nS.")

    def test_roundtrip_identity(self):
        text = "resolution 0.5\n..#.S\n#...#\n.....\n"
        grid = parse_map(text)
        assert serialize_map(grid) == text
        again = parse_map(serialize_map(grid))
        assert np.array_equal(again.states, grid.states)
        assert again.start == grid.start
        assert again.resolution == grid.resolution


class TestRandomGrid:
    def test_zero_ratio_all_free(self):
        grid = generate_random_grid(3, 0.0, 7)
        assert grid.free_count() == 9

    def test_exact_obstacle_count_ninety(self):
        grid = generate_random_grid(90, 0.1, 42)
        assert int(np.count_nonzero(grid.states == CellState.OBSTACLE)) == 810

    def test_determinism(self):
        a = generate_random_grid(25, 0.2, 99)
        b = generate_random_grid(25, 0.2, 99)
        assert np.array_equal(a.states, b.states)
        assert a.start == b.start

    def test_different_seeds_differ(self):
        a = generate_random_grid(25, 0.2, 1)
        b = generate_random_grid(25, 0.2, 2)
        assert not np.array_equal(a.states, b.states)

    def test_start_is_central_free_cell(self):
        grid = generate_random_grid(9, 0.0, 5)
        assert grid.start == Cell(4, 4)

    def test_all_obstacles_rejected(self):
        with pytest.raises(ValueError):
            generate_random_grid(2, 0.9, 3)  # round(3.6) = 4 = all cells

    def test_resolution_is_one_meter(self):
        assert generate_random_grid(4, 0.1, 0).resolution == 1.0


class TestFrontier:
    def test_fresh_map_has_no_frontier(self):
        grid = parse_map("resolution 1.0\nS..\n...")
        assert frontier_cells(grid, 4) == []

    def test_single_boundary_cell_on_strip(self):
        grid = parse_map("resolution 1.0\nS..")
        mark_scanned(grid, [Cell(0, 0), Cell(1, 0)])
        assert frontier_cells(grid, 4) == [Cell(1, 0)]

    def test_fully_scanned_map_has_no_frontier(self):
        grid = parse_map("resolution 1.0\nS..")
        mark_scanned(grid, [Cell(0, 0), Cell(1, 0), Cell(2, 0)])
        assert frontier_cells(grid, 4) == []

    def test_diagonal_neighbor_counts_only_under_8(self):
        grid = parse_map("resolution 1.0\nS#\n#.")
        mark_scanned(grid, [Cell(0, 0)])
        assert frontier_cells(grid, 4) == []
        assert frontier_cells(grid, 8) == [Cell(0, 0)]

    def test_row_major_order(self):
        grid = parse_map("resolution 1.0\nS..\n...\n...")
        mark_scanned(grid, [Cell(2, 0), Cell(0, 1), Cell(1, 2)])
        assert frontier_cells(grid, 4) == [Cell(2, 0), Cell(0, 1), Cell(1, 2)]

    def test_frontier_cells_are_scanned_with_unscanned_neighbor(self):
        rng = np.random.default_rng(3)
        grid = generate_random_grid(12, 0.2, 8)
        free = grid.free_cells()
        mark_scanned(grid, [free[i] for i in rng.choice(len(free), 30)])
        for conn in (4, 8):
            for cell in frontier_cells(grid, conn):
                assert grid.state(cell) == CellState.FREE_SCANNED
                neighbors = [
                    Cell(cell.x + dx, cell.y + dy)
                    for dx, dy in (
                        [(1, 0), (-1, 0), (0, 1), (0, -1)] if conn == 4 else
                        [(1, 0), (-1, 0), (0, 1), (0, -1),
                         (1, 1), (1, -1), (-1, 1), (-1, -1)]
                    )
                ]
                assert any(
                    grid.in_bounds(n) and grid.state(n) == CellState.FREE_UNSCANNED
                    for n in neighbors
                )


class TestMarkScanned:
    def test_empty_set_marks_nothing(self):
        grid = parse_map("resolution 1.0\nS..")
        assert mark_scanned(grid, []) == 0

    def test_idempotent(self):
        grid = parse_map("resolution 1.0\nS..")
        assert mark_scanned(grid, [Cell(1, 0)]) == 1
        assert mark_scanned(grid, [Cell(1, 0)]) == 0

    def test_counts_only_new_transitions(self):
        grid = parse_map("resolution 1.0\nS...")
        mark_scanned(grid, [Cell(0, 0)])
        assert mark_scanned(grid, [Cell(0, 0), Cell(1, 0), Cell(2, 0)]) == 2

    def test_obstacle_rejected(self):
        grid = parse_map("resolution 1.0\nS#")
        with pytest.raises(ValueError, match="obstacle"):
            mark_scanned(grid, [Cell(1, 0)])

    def test_obstacles_never_change(self):
        grid = generate_random_grid(10, 0.3, 11)
        before = (grid.states == CellState.OBSTACLE).copy()
        mark_scanned(grid, grid.free_cells())
        assert np.array_equal(grid.states == CellState.OBSTACLE, before)


class TestCoverageRatio:
    def test_fresh_map_is_zero(self):
        assert coverage_ratio(parse_map("resolution 1.0\nS..")) == 0.0

    def test_fully_scanned_is_one(self):
        grid = parse_map("resolution 1.0\nS..")
        mark_scanned(grid, grid.free_cells())
        assert coverage_ratio(grid) == 1.0

    def test_partial_ratio(self):
        # 4868 of 6113 scanned is just under 80%
        assert 4868 / 6113 == pytest.approx(0.79634, abs=1e-5)
        grid = parse_map("resolution 1.0\nS...\n....\n..##")
        mark_scanned(grid, [Cell(0, 0), Cell(1, 0), Cell(2, 0)])
        assert coverage_ratio(grid) == pytest.approx(0.3)


class TestHeadings:
    def test_four_orientations(self):
        hs = heading_set(4)
        assert hs == pytest.approx((0.0, np.pi / 2, np.pi, 3 * np.pi / 2))

    def test_eight_orientations_include_diagonals(self):
        hs = heading_set(8)
        assert len(hs) == 8
        assert hs[1] == pytest.approx(np.pi / 4)
        assert all(b > a for a, b in zip(hs, hs[1:]))
        assert all(0 <= h < 2 * np.pi for h in hs)

    def test_invalid_count_rejected(self):
        with pytest.raises(ValueError):
            heading_set(6)
