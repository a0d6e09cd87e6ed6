"""Occupancy grids: log-odds belief, visited layer, ground truth, statistics.

Belief cells start at log-odds 0 (probability 0.5) and are updated
additively by the inverse sensor model. A cell counts as Unknown until it
has received a nonzero-confidence update; that "touched" bit replaces a
float comparison against exactly 0 and keeps the exploration rate
monotone.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import MalformedMap, NumericError

# Inverse sensor model defaults. Only the signs and the 0 threshold are
# model-mandated; magnitudes are standard occupancy-grid practice.
DL_OCC = 0.85
DL_FREE = -0.4
L_MIN = -5.0
L_MAX = 5.0

UNKNOWN_PGM = 128


class CellState(Enum):
    OCCUPIED = "occupied"
    EMPTY = "empty"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class GridSpec:
    width_cells: int
    height_cells: int
    cell_size_m: float = 0.1

    def __post_init__(self):
        if self.width_cells <= 0 or self.height_cells <= 0:
            raise ValueError("grid dimensions must be positive")
        if self.cell_size_m <= 0:
            raise ValueError("cell_size_m must be positive")

    @property
    def width_m(self) -> float:
        return self.width_cells * self.cell_size_m

    @property
    def height_m(self) -> float:
        return self.height_cells * self.cell_size_m

    @property
    def interior_cells(self) -> int:
        return (self.width_cells - 2) * (self.height_cells - 2)


class OccupancyGrid:
    """Log-odds belief grid with a visited layer and optional ground truth.

    Arrays are indexed [i, j] where i is the x (east) cell index and j the
    y (north) cell index. ``truth`` is present only for simulated worlds.
    """

    def __init__(self, spec: GridSpec, truth: np.ndarray | None = None,
                 dl_occ: float = DL_OCC, dl_free: float = DL_FREE,
                 l_min: float = L_MIN, l_max: float = L_MAX):
        shape = (spec.width_cells, spec.height_cells)
        self.spec = spec
        self.log_odds = np.zeros(shape)
        self.touched = np.zeros(shape, dtype=np.uint8)
        self.visited = np.zeros(shape, dtype=np.uint8)
        self.truth = truth
        self.dl_occ = dl_occ
        self.dl_free = dl_free
        self.l_min = l_min
        self.l_max = l_max
        if truth is not None and truth.shape != shape:
            raise ValueError("truth mask shape does not match spec")

    def in_bounds(self, i: int, j: int) -> bool:
        return 0 <= i < self.spec.width_cells and 0 <= j < self.spec.height_cells

    def cell_of(self, x_m: float, y_m: float) -> tuple[int, int]:
        return (int(math.floor(x_m / self.spec.cell_size_m)),
                int(math.floor(y_m / self.spec.cell_size_m)))

    def occupied_mask(self) -> np.ndarray:
        return (self.log_odds > 0).astype(np.uint8)

    def unknown_mask(self) -> np.ndarray:
        return (self.touched == 0).astype(np.uint8)

    def belief_snapshot(self) -> "OccupancyGrid":
        """Deep copy of the belief layers (truth deliberately dropped)."""
        snap = OccupancyGrid(self.spec, dl_occ=self.dl_occ, dl_free=self.dl_free,
                             l_min=self.l_min, l_max=self.l_max)
        snap.log_odds = self.log_odds.copy()
        snap.touched = self.touched.copy()
        snap.visited = self.visited.copy()
        return snap


def logodds_update(cell_log_odds: float, hit: bool, confidence: float,
                   dl_occ: float = DL_OCC, dl_free: float = DL_FREE,
                   l_min: float = L_MIN, l_max: float = L_MAX) -> float:
    """One Bayes update in log-odds form: add the confidence-scaled
    inverse-sensor-model constant and clamp."""
    if not math.isfinite(cell_log_odds) or not math.isfinite(confidence):
        raise NumericError("non-finite input to logodds_update")
    if not 0.0 <= confidence <= 1.0:
        raise ValueError("confidence must be in [0, 1]")
    delta = dl_occ if hit else dl_free
    val = cell_log_odds + confidence * delta
    return min(max(val, l_min), l_max)


def classify(cell_log_odds: float) -> CellState:
    """Sign of the log-odds value: >0 occupied, <0 empty, =0 unknown."""
    if not math.isfinite(cell_log_odds):
        raise NumericError("non-finite input to classify")
    if cell_log_odds > 0:
        return CellState.OCCUPIED
    if cell_log_odds < 0:
        return CellState.EMPTY
    return CellState.UNKNOWN


def load_ascii_map(text: str, cell_size_m: float = 0.1) -> OccupancyGrid:
    """Parse a '#'/'.' map into a grid with ground truth.

    Text rows run north to south: the first line is the top (largest j).
    The perimeter must be fully walled.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MalformedMap("empty map text")
    width = len(lines[0])
    height = len(lines)
    truth = np.zeros((width, height), dtype=np.uint8)
    for row, line in enumerate(lines):
        if len(line) != width:
            raise MalformedMap(f"ragged row {row}: {len(line)} != {width}")
        j = height - 1 - row
        for i, ch in enumerate(line):
            if ch == "#":
                truth[i, j] = 1
            elif ch != ".":
                raise MalformedMap(f"unknown character {ch!r} at row {row}, col {i}")
    if (not truth[0, :].all() or not truth[-1, :].all()
            or not truth[:, 0].all() or not truth[:, -1].all()):
        raise MalformedMap("perimeter is not fully walled")
    return OccupancyGrid(GridSpec(width, height, cell_size_m), truth=truth)


def load_map_file(path, cell_size_m: float = 0.1) -> OccupancyGrid:
    with open(path, encoding="utf-8") as fh:
        return load_ascii_map(fh.read(), cell_size_m)


def exploration_rate(grid: OccupancyGrid) -> float:
    """Fraction of interior cells classified non-Unknown."""
    interior = grid.touched[1:-1, 1:-1]
    if interior.size == 0:
        raise ValueError("grid has no interior cells")
    return float(np.count_nonzero(interior)) / interior.size


def count_unknown(grid: OccupancyGrid) -> int:
    """Interior cells never updated (log-odds still exactly 0)."""
    interior = grid.touched[1:-1, 1:-1]
    return int(interior.size - np.count_nonzero(interior))


def interior_obstacle_ratio(grid: OccupancyGrid) -> float:
    if grid.truth is None:
        raise ValueError("grid has no ground truth")
    interior = grid.truth[1:-1, 1:-1]
    return float(np.count_nonzero(interior)) / interior.size


def mark_visited(grid: OccupancyGrid, cells) -> OccupancyGrid:
    """Set visited flags; idempotent. Out-of-bounds indices raise IndexError."""
    for i, j in cells:
        if not grid.in_bounds(i, j):
            raise IndexError(f"cell ({i}, {j}) out of bounds")
        grid.visited[i, j] = 1
    return grid


def to_pgm_bytes(grid: OccupancyGrid) -> bytes:
    """Belief as binary PGM: 0 = occupied, 128 = unknown, 255 = free.

    Rows run north to south so the image matches the map-file orientation.
    """
    img = np.full((grid.spec.height_cells, grid.spec.width_cells), 255, dtype=np.uint8)
    occ = (grid.log_odds > 0) & (grid.touched > 0)
    unk = grid.touched == 0
    img[unk.T[::-1]] = UNKNOWN_PGM
    img[occ.T[::-1]] = 0
    header = f"P5\n{grid.spec.width_cells} {grid.spec.height_cells}\n255\n"
    return header.encode("ascii") + img.tobytes()


def write_pgm(grid: OccupancyGrid, path) -> None:
    with open(path, "wb") as fh:
        fh.write(to_pgm_bytes(grid))
