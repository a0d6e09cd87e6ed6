"""Path planning on the belief grid and observation-gain prediction.

All operations are pure functions of immutable snapshots. Plans never read
ground truth: occupancy comes from the belief's log-odds sign, unknown
cells are traversable at a mild cost premium.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels, sensor
from .errors import InvalidQuery, NoPathError
from .gridmap import OccupancyGrid

UNKNOWN_COST_MULT = 1.2


@dataclass
class Path:
    cells: list  # ordered (i, j), 8-adjacent, start included
    cost: float  # orthogonal steps 1, diagonal sqrt(2), unknown cells x1.2


def heading_between(a, b) -> int:
    """Heading (multiple of 45 deg; 0 = +y/north, 90 = +x/east) of the
    single-cell step from a to b."""
    di = b[0] - a[0]
    dj = b[1] - a[1]
    table = {(0, 1): 0, (1, 1): 45, (1, 0): 90, (1, -1): 135,
             (0, -1): 180, (-1, -1): 225, (-1, 0): 270, (-1, 1): 315}
    try:
        return table[(di, dj)]
    except KeyError:
        raise ValueError(f"cells {a} and {b} are not 8-adjacent") from None


def turns_between(h1: int, h2: int) -> int:
    """Minimal number of 45-degree turns from heading h1 to h2."""
    steps = ((h2 - h1) // 45) % 8
    return min(steps, 8 - steps)


def planning_masks(belief: OccupancyGrid):
    occupied = np.ascontiguousarray((belief.log_odds > 0).view(np.uint8))
    unknown = np.ascontiguousarray((belief.touched == 0).view(np.uint8))
    return occupied, unknown


def astar_on_masks(occupied, unknown, start, goal,
                   unknown_mult: float = UNKNOWN_COST_MULT):
    if occupied[start[0], start[1]]:
        raise InvalidQuery(f"start cell {start} is occupied")
    cells, cost = kernels.astar(occupied, unknown, start[0], start[1],
                                goal[0], goal[1], unknown_mult)
    if cells is None:
        return None
    return Path(cells=cells, cost=cost)


def astar(belief: OccupancyGrid, start, goal,
          unknown_mult: float = UNKNOWN_COST_MULT):
    """Minimal-cost 8-connected path on the belief grid, or None when the
    goal is unreachable. Octile heuristic; optimality is checked against a
    Dijkstra oracle in the test suite."""
    if not belief.in_bounds(*goal):
        raise InvalidQuery(f"goal cell {goal} out of bounds")
    occupied, unknown = planning_masks(belief)
    return astar_on_masks(occupied, unknown, start, goal, unknown_mult)


def plan_tour(belief: OccupancyGrid, start, targets,
              unknown_mult: float = UNKNOWN_COST_MULT) -> Path:
    """Concatenation of A* legs start -> t1 -> ... -> tk in gene order.

    Raises NoPathError (carrying the 1-based failing leg index) when any
    leg is unreachable.
    """
    if not targets:
        raise ValueError("targets must be non-empty")
    occupied, unknown = planning_masks(belief)
    return plan_tour_on_masks(occupied, unknown, start, targets, unknown_mult)


def plan_tour_on_masks(occupied, unknown, start, targets,
                       unknown_mult: float = UNKNOWN_COST_MULT) -> Path:
    cells = [tuple(start)]
    cost = 0.0
    cur = tuple(start)
    for leg, target in enumerate(targets, start=1):
        seg = astar_on_masks(occupied, unknown, cur, tuple(target), unknown_mult)
        if seg is None:
            raise NoPathError(leg)
        cells.extend(seg.cells[1:])
        cost += seg.cost
        cur = tuple(target)
    return Path(cells=cells, cost=cost)


def path_energy(path: Path, initial_heading: int = 0) -> int:
    """Motion commands needed to execute the path under the 45-degree
    model: one move per cell transition plus the turns to align."""
    heading = int(initial_heading) % 360
    moves = 0
    turns = 0
    for prev, nxt in zip(path.cells, path.cells[1:]):
        want = heading_between(prev, nxt)
        turns += turns_between(heading, want)
        heading = want
        moves += 1
    return moves + turns


class GainScratch:
    """Reusable stamp buffer for observation-gain counting."""

    def __init__(self, spec):
        self.stamp = np.zeros((spec.width_cells, spec.height_cells), dtype=np.int32)
        self.counter = 0

    def next_stamp(self) -> int:
        self.counter += 1
        return self.counter


def interior_touched_mask(belief: OccupancyGrid) -> np.ndarray:
    """Touched layer with the perimeter forced on, so gain counting only
    ever credits interior unknown cells (the exploration-rate universe)."""
    t = belief.touched.copy()
    t[0, :] = t[-1, :] = 1
    t[:, 0] = t[:, -1] = 1
    return np.ascontiguousarray(t)


def estimate_observation_gain(belief: OccupancyGrid, path: Path,
                              lidar: sensor.LidarConfig,
                              initial_heading: int = 0,
                              stride: int = 1,
                              scratch: GainScratch | None = None,
                              occupied=None, counted_touched=None) -> int:
    """Predicted newly observed cells: unique currently-Unknown interior
    cells swept by noise-free scans cast from the path's cells against the
    belief grid (Unknown is transparent, believed-Occupied blocks).

    ``stride`` subsamples the scan poses (the final cell is always kept);
    the default casts from every cell.
    """
    # Scan headings mirror execution: the robot faces its arrival direction
    # when it scans after each move. Tours may revisit cells (shared
    # junctions), so headings come from the original sequence and each cell
    # keeps its first-visit heading; counting is unique per cell.
    heading = int(initial_heading) % 360
    heading_at = {}
    cells = []
    for k, c in enumerate(path.cells):
        if k > 0 and c != path.cells[k - 1]:
            heading = heading_between(path.cells[k - 1], c)
        if c not in heading_at:
            heading_at[c] = heading
            cells.append(c)
    if stride > 1 and len(cells) > 1:
        kept = cells[::stride]
        if kept[-1] != cells[-1]:
            kept.append(cells[-1])
        cells = kept
    if not cells:
        return 0

    spec = belief.spec
    if occupied is None:
        occupied = planning_masks(belief)[0]
    if counted_touched is None:
        counted_touched = interior_touched_mask(belief)
    if scratch is None:
        scratch = GainScratch(spec)

    n = len(cells)
    xs = np.empty(n)
    ys = np.empty(n)
    head_idx = np.empty(n, dtype=np.int32)
    cell_size = spec.cell_size_m
    for k, (i, j) in enumerate(cells):
        xs[k] = (i + 0.5) * cell_size
        ys[k] = (j + 0.5) * cell_size
        head_idx[k] = (heading_at[(i, j)] // 45) % 8

    sdx_table, sdy_table = sensor.heading_step_tables(lidar, cell_size)
    _, n_steps = sensor.step_geometry(lidar, cell_size)
    stamp_val = scratch.next_stamp()
    return kernels.count_gain(occupied, counted_touched, scratch.stamp, stamp_val,
                              xs, ys, head_idx, sdx_table, sdy_table,
                              n_steps, 1.0 / cell_size)
