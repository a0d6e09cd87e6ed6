"""The exploration problem: candidate encoding, the unknown-cell fitness
with its energy constraint, per-robot target selection, and the mission
loop that couples optimizer, planner, motion, and the shared map.

Robots never exchange state directly: coordination happens only through
the shared belief grid each of them updates and reads.
"""

import hashlib
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import metaheuristics as mh
from . import planner, sensor
from .errors import NoFeasibleTarget
from .gridmap import OccupancyGrid, count_unknown, exploration_rate, logodds_update
from .presets import Preset
from .robot import (Pose, RobotMode, RobotState, WorldView, command_count,
                    fsm_tick)

STOP_RATE = 0.99
# Global ticks with zero energy spent and zero new observations before a
# mission is declared stalled (livelock guard).
STALL_TICKS = 100


def decode(genes: np.ndarray, belief: OccupancyGrid, occupied=None) -> list:
    """Gene pairs (x, y) in meters -> target cells, snapping targets that
    fall on believed-occupied cells to the nearest non-occupied cell."""
    spec = belief.spec
    cs = spec.cell_size_m
    if occupied is None:
        occupied = belief.log_odds > 0
    targets = []
    for kk in range(0, len(genes), 2):
        i = min(int(math.floor(genes[kk] / cs)), spec.width_cells - 1)
        j = min(int(math.floor(genes[kk + 1] / cs)), spec.height_cells - 1)
        i = max(i, 0)
        j = max(j, 0)
        if occupied[i, j]:
            i, j = _nearest_free(occupied, spec, i, j)
        targets.append((i, j))
    return targets


def _nearest_free(occupied, spec, i, j):
    """Bounded spiral search for the Euclidean-nearest non-occupied cell
    (ties broken by index order). Rings are scanned outward until the ring
    index exceeds the best distance found, since a Chebyshev ring r+1 can
    still hold a cell closer than ring r's corners."""
    w, h = spec.width_cells, spec.height_cells
    best = None
    for r in range(1, max(w, h)):
        if best is not None and r * r > best[0][0]:
            break
        lo_i, hi_i = max(i - r, 0), min(i + r, w - 1)
        lo_j, hi_j = max(j - r, 0), min(j + r, h - 1)
        for ci in range(lo_i, hi_i + 1):
            for cj in range(lo_j, hi_j + 1):
                if max(abs(ci - i), abs(cj - j)) != r or occupied[ci, cj]:
                    continue
                key = ((ci - i) ** 2 + (cj - j) ** 2, ci, cj)
                if best is None or key < best[0]:
                    best = (key, ci, cj)
    if best is None:
        raise NoFeasibleTarget("no non-occupied cell on the whole grid")
    return best[1], best[2]


class ExplorationObjective:
    """Minimized fitness: remaining-unknown count minus the predicted
    observation gain of the candidate's tour; candidates whose tour is
    unreachable or exceeds the remaining energy are pushed past any
    feasible value by the penalty weight."""

    def __init__(self, belief: OccupancyGrid, start_cell, start_heading: int,
                 k_targets: int, remaining_energy: int,
                 lidar: sensor.LidarConfig, penalty_weight: float | None = None,
                 scan_stride: int = 1):
        self.belief = belief
        self.start_cell = tuple(start_cell)
        self.start_heading = int(start_heading)
        self.k_targets = int(k_targets)
        self.remaining_energy = int(remaining_energy)
        self.lidar = lidar
        self.scan_stride = scan_stride
        self.penalty_weight = (float(belief.spec.interior_cells + 1)
                               if penalty_weight is None else float(penalty_weight))
        self.masks = planner.planning_masks(belief)
        self.counted_touched = planner.interior_touched_mask(belief)
        self.unknown_total = count_unknown(belief)
        self.scratch = planner.GainScratch(belief.spec)

    def bounds(self):
        spec = self.belief.spec
        lower = np.zeros(2 * self.k_targets)
        upper = np.tile([spec.width_m, spec.height_m], self.k_targets)
        return lower, upper

    def __call__(self, genes: np.ndarray) -> float:
        occupied, unknown = self.masks
        targets = decode(genes, self.belief, occupied)
        try:
            path = planner.plan_tour_on_masks(occupied, unknown,
                                              self.start_cell, targets)
        except planner.NoPathError:
            return self.penalty_weight
        gain = planner.estimate_observation_gain(
            self.belief, path, self.lidar, initial_heading=self.start_heading,
            stride=self.scan_stride, scratch=self.scratch,
            occupied=occupied, counted_touched=self.counted_touched)
        energy = command_count(path.cells, self.start_heading)
        fit = float(self.unknown_total - gain)
        if energy > self.remaining_energy:
            fit += self.penalty_weight
        return fit


def select_targets(robot: RobotState, shared: OccupancyGrid, preset: Preset,
                   *, k_targets: int, max_gens: int = 30, early_stop: int = 10,
                   lidar: sensor.LidarConfig | None = None,
                   init_population: np.ndarray | None = None,
                   opt_rng=None, scan_stride: int = 1):
    """Run one optimization round over a snapshot of the shared map.

    Returns (targets, RunResult). Raises NoFeasibleTarget when even the
    best candidate is penalized (no energy, nothing reachable).
    """
    if robot.energy_steps <= 0:
        raise NoFeasibleTarget(f"robot {robot.id} has no energy")
    lidar = lidar or sensor.LidarConfig()
    snapshot = shared.belief_snapshot()
    objective = ExplorationObjective(
        snapshot, robot.cell, robot.pose.heading_deg, k_targets,
        robot.energy_steps, lidar, scan_stride=scan_stride)
    lower, upper = objective.bounds()
    algorithm = mh.make_algorithm(preset.algorithm, preset.params)
    result = mh.run(algorithm, objective, lower, upper,
                    pop_size=preset.pop_size, max_gens=max_gens,
                    early_stop=early_stop, rng=opt_rng, initial=init_population)
    if result.best_fitness >= objective.penalty_weight:
        raise NoFeasibleTarget(f"robot {robot.id}: only penalized candidates")
    return decode(result.best_genes, snapshot), result


@dataclass
class MissionConfig:
    truth_grid: OccupancyGrid
    preset: Preset
    n_robots: int = 1
    start_poses: list | None = None  # [(x_m, y_m, heading_deg)]
    energy: int = 3000
    k_targets: int = 1
    max_gens: int = 30
    early_stop: int = 10
    pop_size: int | None = None  # overrides the preset when set
    seed: int = 25
    lidar: sensor.LidarConfig = field(default_factory=sensor.LidarConfig)
    stop_rate: float = STOP_RATE
    scan_stride: int = 1
    sensor_noise: bool = True
    max_ticks: int | None = None

    def resolved_preset(self) -> Preset:
        if self.pop_size is None or self.pop_size == self.preset.pop_size:
            return self.preset
        return Preset(self.preset.algorithm, self.pop_size, self.preset.params)


@dataclass
class MissionResult:
    series: list            # (tick, robot_id, steps_used, rate, fitevals_cum)
    optimizer_rows: list    # (robot_id, round, generation, best_fitness, fitevals)
    round_timings: list     # (robot_id, round, computation_ms)
    trajectory: list        # (tick, robot_id, x, y, heading, energy, mode)
    final_map: OccupancyGrid
    final_rate: float
    ticks: int
    total_steps: int
    total_fitevals: int
    computation_s: float
    wall_s: float
    init_population_hash: str
    outcome: str


def default_start_poses(n: int, cell_size: float):
    """Deployment row starting at (1, 1) m, heading north; additional
    robots take the centers of the next cells east so no two share a cell
    (offsets of exactly r*cell_size can round onto the same cell)."""
    base_i = int(math.floor(1.0 / cell_size))
    base_j = int(math.floor(1.0 / cell_size))
    poses = [(1.0, 1.0, 0)]
    for r in range(1, n):
        poses.append(((base_i + r + 0.5) * cell_size,
                      (base_j + 0.5) * cell_size, 0))
    return poses


class Mission:
    """One exploration mission: robots tick round-robin in id order, each
    following the navigation FSM against the shared map."""

    def __init__(self, config: MissionConfig):
        self.cfg = config
        self.truth = config.truth_grid
        spec = self.truth.spec
        self.shared = OccupancyGrid(spec)
        self.preset = config.resolved_preset()
        self.stop_rate = config.stop_rate
        poses = config.start_poses or default_start_poses(config.n_robots,
                                                          spec.cell_size_m)
        if len(poses) < config.n_robots:
            raise ValueError("not enough start poses")
        self.robots = []
        for rid in range(config.n_robots):
            x, y, hdg = poses[rid]
            cell = self.shared.cell_of(x, y)
            if not self.truth.in_bounds(*cell) or self.truth.truth[cell[0], cell[1]]:
                raise ValueError(f"start pose {poses[rid]} is not in free space")
            noise_rng = np.random.default_rng(
                np.random.SeedSequence((config.seed, rid, 1)))
            self.robots.append(RobotState(
                id=rid, pose=Pose(x, y, int(hdg) % 360), cell=cell,
                energy_steps=config.energy, rng=noise_rng))
        if len({r.cell for r in self.robots}) != len(self.robots):
            raise ValueError("start poses share a cell")

        self.tick = 0
        self.rounds = [0] * config.n_robots
        self.fitevals_cum = [0] * config.n_robots
        self.computation_s = [0.0] * config.n_robots
        self.optimizer_rows = []
        self.round_timings = []
        self.series = []
        self.trajectory = []
        self.init_population_hash = ""
        self._rate_cache = None
        self.outcome = "running"

    # -- services used by the navigation FSM ------------------------------

    def exploration_rate(self) -> float:
        if self._rate_cache is None:
            self._rate_cache = exploration_rate(self.shared)
        return self._rate_cache

    def select_targets(self, robot: RobotState):
        rnd = self.rounds[robot.id]
        self.rounds[robot.id] += 1
        init_rng = np.random.default_rng(
            np.random.SeedSequence((self.cfg.seed, robot.id, 2, rnd, 0)))
        opt_rng = np.random.default_rng(
            np.random.SeedSequence((self.cfg.seed, robot.id, 2, rnd, 1)))
        snapshot_obj = ExplorationObjective(
            self.shared.belief_snapshot(), robot.cell, robot.pose.heading_deg,
            self.cfg.k_targets, robot.energy_steps, self.cfg.lidar,
            scan_stride=self.cfg.scan_stride)
        lower, upper = snapshot_obj.bounds()
        init_pop = mh.sample_population(init_rng, self.preset.pop_size, lower, upper)
        if rnd == 0 and robot.id == 0:
            self.init_population_hash = hashlib.sha256(
                np.ascontiguousarray(init_pop).tobytes()).hexdigest()
        algorithm = mh.make_algorithm(self.preset.algorithm, self.preset.params)
        t0 = time.perf_counter()
        result = mh.run(algorithm, snapshot_obj, lower, upper,
                        pop_size=self.preset.pop_size, max_gens=self.cfg.max_gens,
                        early_stop=self.cfg.early_stop, rng=opt_rng,
                        initial=init_pop)
        dt = time.perf_counter() - t0
        self.computation_s[robot.id] += dt
        self.fitevals_cum[robot.id] += result.fitevals
        for gs in result.history:
            self.optimizer_rows.append(
                (robot.id, rnd, gs.generation, gs.best_fitness, gs.fitevals))
        self.round_timings.append((robot.id, rnd, dt * 1e3))
        if result.best_fitness >= snapshot_obj.penalty_weight:
            return None
        return decode(result.best_genes, snapshot_obj.belief)

    def plan(self, robot: RobotState):
        if not robot.current_targets:
            return None
        occupied, unknown = planner.planning_masks(self.shared)
        if robot.avoid_cell is not None:
            occupied = occupied.copy()
            occupied[robot.avoid_cell[0], robot.avoid_cell[1]] = 1
        try:
            path = planner.plan_tour_on_masks(occupied, unknown, robot.cell,
                                              robot.current_targets)
        except planner.NoPathError:
            return None
        if command_count(path.cells, robot.pose.heading_deg) > robot.energy_steps:
            return None
        return list(path.cells[1:])

    def robot_at(self, cell, exclude: int):
        for r in self.robots:
            if r.id != exclude and r.cell == tuple(cell):
                return r
        return None

    def path_blocked(self, robot: RobotState) -> bool:
        lo = self.shared.log_odds
        return any(lo[c[0], c[1]] > 0 for c in robot.current_path)

    def world_view(self, robot: RobotState) -> WorldView:
        others = {r.cell for r in self.robots if r.id != robot.id}
        return WorldView(self.truth, others)

    def after_move(self, robot: RobotState) -> None:
        self._scan(robot)

    def report_bump(self, cell) -> None:
        g = self.shared
        g.log_odds[cell[0], cell[1]] = logodds_update(
            g.log_odds[cell[0], cell[1]], True, 1.0,
            g.dl_occ, g.dl_free, g.l_min, g.l_max)
        g.touched[cell[0], cell[1]] = 1
        g.visited[cell[0], cell[1]] = 1
        self._rate_cache = None

    # -- mission loop ------------------------------------------------------

    def _scan(self, robot: RobotState) -> None:
        rng = robot.rng if (self.cfg.sensor_noise
                            and self.cfg.lidar.noise_std_fraction > 0) else None
        sensor.scan_into(self.shared, self.truth,
                         (robot.pose.x_m, robot.pose.y_m, robot.pose.heading_deg),
                         self.cfg.lidar, rng)
        self._rate_cache = None

    def _record(self) -> None:
        rate = self.exploration_rate()
        for r in self.robots:
            self.series.append((self.tick, r.id, r.steps_used, rate,
                                self.fitevals_cum[r.id]))
            self.trajectory.append((self.tick, r.id, r.pose.x_m, r.pose.y_m,
                                    r.pose.heading_deg, r.energy_steps,
                                    r.mode.value))

    def run(self) -> MissionResult:
        wall0 = time.perf_counter()
        for robot in self.robots:
            self._scan(robot)  # observe before the first optimization
        self._record()

        max_ticks = self.cfg.max_ticks or (10 * self.cfg.energy + 1000)
        stalled_for = 0
        while self.tick < max_ticks:
            if self.exploration_rate() >= self.stop_rate:
                self.outcome = "explored"
                break
            if all(r.mode is RobotMode.DONE for r in self.robots):
                self.outcome = "all_done"
                break
            energy_before = sum(r.energy_steps for r in self.robots)
            touched_before = int(np.count_nonzero(self.shared.touched))
            self.tick += 1
            for robot in self.robots:
                fsm_tick(robot, self)
            self._record()
            energy_after = sum(r.energy_steps for r in self.robots)
            touched_after = int(np.count_nonzero(self.shared.touched))
            if energy_after == energy_before and touched_after == touched_before:
                stalled_for += 1
                if stalled_for >= STALL_TICKS:
                    self.outcome = "stalled"
                    break
            else:
                stalled_for = 0
        else:
            self.outcome = "tick_limit"

        return MissionResult(
            series=self.series,
            optimizer_rows=self.optimizer_rows,
            round_timings=self.round_timings,
            trajectory=self.trajectory,
            final_map=self.shared,
            final_rate=self.exploration_rate(),
            ticks=self.tick,
            total_steps=sum(r.steps_used for r in self.robots),
            total_fitevals=sum(self.fitevals_cum),
            computation_s=sum(self.computation_s),
            wall_s=time.perf_counter() - wall0,
            init_population_hash=self.init_population_hash,
            outcome=self.outcome,
        )


def run_mission(config: MissionConfig) -> MissionResult:
    return Mission(config).run()
