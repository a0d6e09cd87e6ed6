import math

import numpy as np
import pytest

from swarm_bench.errors import MalformedMap, NumericError
from swarm_bench.gridmap import (CellState, GridSpec, OccupancyGrid, classify,
                                 count_unknown, exploration_rate,
                                 interior_obstacle_ratio, load_ascii_map,
                                 load_map_file, logodds_update, mark_visited,
                                 to_pgm_bytes)


class TestLoadAsciiMap:
    def test_three_by_three(self):
        grid = load_ascii_map("###\n#.#\n###", 0.1)
        assert grid.spec.width_cells == 3 and grid.spec.height_cells == 3
        assert grid.truth.sum() == 8
        assert grid.truth[1, 1] == 0
        assert np.all(grid.log_odds == 0)

    def test_empty_map_interior(self, maps_dir):
        grid = load_map_file(maps_dir / "empty.txt", 0.1)
        assert (grid.spec.width_cells, grid.spec.height_cells) == (240, 240)
        assert interior_obstacle_ratio(grid) == 0.0

    def test_house_map_ratio(self, maps_dir):
        grid = load_map_file(maps_dir / "house.txt", 0.1)
        assert abs(interior_obstacle_ratio(grid) - 0.27) <= 0.02

    def test_orientation_first_line_is_north(self):
        grid = load_ascii_map("###\n#.#\n###\n###", 0.1)  # 3 wide, 4 tall
        # The free cell is on text row 1 (from the top) -> j = 4 - 1 - 1 = 2.
        assert grid.truth[1, 2] == 0

    def test_ragged_rows(self):
        with pytest.raises(MalformedMap):
            load_ascii_map("###\n#.##\n###")

    def test_unknown_character(self):
        with pytest.raises(MalformedMap):
            load_ascii_map("###\n#x#\n###")

    def test_open_perimeter(self):
        with pytest.raises(MalformedMap):
            load_ascii_map("###\n#..\n###")


class TestLogOddsUpdate:
    def test_hit_full_confidence(self):
        assert logodds_update(0.0, True, 1.0) == pytest.approx(0.85)

    def test_zero_confidence_noop(self):
        assert logodds_update(0.0, False, 0.0) == 0.0

    def test_free_from_half(self):
        assert logodds_update(0.5, False, 1.0) == pytest.approx(0.1)

    def test_nonfinite_rejected(self):
        with pytest.raises(NumericError):
            logodds_update(math.nan, True, 1.0)
        with pytest.raises(NumericError):
            logodds_update(math.inf, False, 0.5)

    def test_clamping_band(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            val = 0.0
            for _ in range(50):
                val = logodds_update(val, bool(rng.integers(2)),
                                     float(rng.random()))
                assert -5.0 <= val <= 5.0

    def test_monotone_free_evidence(self):
        val = 0.0
        for k in range(1, 30):
            val = logodds_update(val, False, 1.0)
            assert val == pytest.approx(max(-5.0, k * -0.4))
            prob = 1.0 / (1.0 + math.exp(-val))
            assert 0.0 < prob < 0.5


class TestClassify:
    def test_positive_occupied(self):
        assert classify(0.8) is CellState.OCCUPIED

    def test_zero_unknown(self):
        assert classify(0.0) is CellState.UNKNOWN

    def test_negative_empty(self):
        assert classify(-1.2) is CellState.EMPTY

    def test_never_observed_cell_is_unknown(self):
        grid = OccupancyGrid(GridSpec(4, 4, 0.1))
        assert classify(grid.log_odds[2, 2]) is CellState.UNKNOWN


class TestExplorationStats:
    def test_rate_extremes(self):
        grid = OccupancyGrid(GridSpec(6, 6, 0.1))
        assert exploration_rate(grid) == 0.0
        grid.touched[1:-1, 1:-1] = 1
        assert exploration_rate(grid) == 1.0

    def test_rate_half(self):
        grid = OccupancyGrid(GridSpec(6, 6, 0.1))
        grid.touched[1:-1, 1:3] = 1  # 8 of 16 interior cells
        assert exploration_rate(grid) == 0.5

    def test_count_unknown_fresh_empty(self, maps_dir):
        grid = load_map_file(maps_dir / "empty.txt", 0.1)
        assert count_unknown(grid) == 238 * 238 == 56644

    def test_count_unknown_single_update(self):
        grid = OccupancyGrid(GridSpec(10, 10, 0.1))
        before = count_unknown(grid)
        grid.log_odds[4, 4] = logodds_update(0.0, True, 0.7)
        grid.touched[4, 4] = 1
        assert count_unknown(grid) == before - 1
        grid.touched[1:-1, 1:-1] = 1
        assert count_unknown(grid) == 0

    def test_unknown_plus_classified_is_interior(self):
        rng = np.random.default_rng(3)
        grid = OccupancyGrid(GridSpec(12, 12, 0.1))
        for _ in range(300):
            i, j = rng.integers(1, 11, size=2)
            grid.log_odds[i, j] = logodds_update(
                grid.log_odds[i, j], bool(rng.integers(2)), float(rng.random()))
            grid.touched[i, j] = 1
            classified = int(np.count_nonzero(grid.touched[1:-1, 1:-1]))
            assert count_unknown(grid) + classified == grid.spec.interior_cells


class TestMarkVisited:
    def test_empty_set_unchanged(self):
        grid = OccupancyGrid(GridSpec(5, 5, 0.1))
        mark_visited(grid, [])
        assert grid.visited.sum() == 0

    def test_idempotent(self):
        grid = OccupancyGrid(GridSpec(5, 5, 0.1))
        mark_visited(grid, [(1, 1)])
        snapshot = grid.visited.copy()
        mark_visited(grid, [(1, 1)])
        assert np.array_equal(grid.visited, snapshot)

    def test_all_interior(self):
        grid = OccupancyGrid(GridSpec(5, 5, 0.1))
        cells = [(i, j) for i in range(1, 4) for j in range(1, 4)]
        mark_visited(grid, cells)
        assert grid.visited.sum() == grid.spec.interior_cells

    def test_out_of_bounds(self):
        grid = OccupancyGrid(GridSpec(5, 5, 0.1))
        with pytest.raises(IndexError):
            mark_visited(grid, [(5, 0)])
        with pytest.raises(IndexError):
            mark_visited(grid, [(-1, 0)])


class TestPgmExport:
    def test_header_and_values(self):
        grid = load_ascii_map("###\n#.#\n###", 0.1)
        grid.log_odds[0, 0] = 2.0
        grid.touched[0, 0] = 1
        grid.log_odds[1, 1] = -2.0
        grid.touched[1, 1] = 1
        data = to_pgm_bytes(grid)
        assert data.startswith(b"P5\n3 3\n255\n")
        pixels = np.frombuffer(data[len(b"P5\n3 3\n255\n"):], dtype=np.uint8)
        pixels = pixels.reshape(3, 3)
        # Rows are north to south: (1, 1) is the middle pixel, (0, 0) the
        # bottom-left one.
        assert pixels[1, 1] == 255
        assert pixels[2, 0] == 0
        assert pixels[0, 2] == 128


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        GridSpec(0, 5, 0.1)
    with pytest.raises(ValueError):
        GridSpec(5, 5, 0.0)
    spec = GridSpec(240, 240, 0.1)
    assert spec.width_m == pytest.approx(24.0)
    assert spec.interior_cells == 238 * 238
