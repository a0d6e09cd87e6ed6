from pathlib import Path

import numpy as np
import pytest

from swarm_bench.gridmap import GridSpec, OccupancyGrid, load_map_file

MAPS = Path(__file__).resolve().parent.parent / "maps"


@pytest.fixture(scope="session")
def maps_dir() -> Path:
    return MAPS


def make_box_world(n: int, cell_size: float = 0.2) -> OccupancyGrid:
    """n x n ground-truth world: walls on the perimeter, free inside."""
    truth = np.zeros((n, n), dtype=np.uint8)
    truth[0, :] = truth[-1, :] = 1
    truth[:, 0] = truth[:, -1] = 1
    return OccupancyGrid(GridSpec(n, n, cell_size), truth=truth)


def known_empty_belief(n: int, cell_size: float = 0.2) -> OccupancyGrid:
    """Belief grid whose every cell is already classified Empty."""
    g = OccupancyGrid(GridSpec(n, n, cell_size))
    g.log_odds[:, :] = -1.0
    g.touched[:, :] = 1
    return g


@pytest.fixture(scope="session")
def empty_world_120() -> OccupancyGrid:
    return load_map_file(MAPS / "empty_120.txt", 0.2)


@pytest.fixture(scope="session")
def house_world_120() -> OccupancyGrid:
    return load_map_file(MAPS / "house_120.txt", 0.2)
