import math

import numpy as np
import pytest

from swarm_bench import sensor
from swarm_bench.errors import NoFeasibleTarget
from swarm_bench.exploration import (ExplorationObjective, Mission,
                                     MissionConfig, decode,
                                     default_start_poses, run_mission,
                                     select_targets)
from swarm_bench.gridmap import (GridSpec, OccupancyGrid, count_unknown,
                                 exploration_rate)
from swarm_bench.presets import resolve
from swarm_bench.robot import Pose, RobotState
from conftest import known_empty_belief, make_box_world


def make_robot(cell=(5, 5), heading=0, energy=500, rid=0):
    cs = 0.2
    return RobotState(id=rid, pose=Pose((cell[0] + 0.5) * cs,
                                        (cell[1] + 0.5) * cs, heading),
                      cell=cell, energy_steps=energy)


class TestDecode:
    def test_floor_arithmetic(self):
        belief = known_empty_belief(60, 0.1)
        assert decode(np.array([1.25, 3.07]), belief) == [(12, 30)]

    def test_wall_gene_snaps_to_adjacent_free(self):
        belief = known_empty_belief(20, 0.1)
        belief.log_odds[10, 10] = 2.0
        (i, j), = decode(np.array([1.05, 1.05]), belief)
        assert max(abs(i - 10), abs(j - 10)) == 1
        assert belief.log_odds[i, j] <= 0

    def test_snap_matches_bruteforce_nearest(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            belief = known_empty_belief(25, 0.1)
            occ = rng.random((25, 25)) < 0.4
            belief.log_odds[occ] = 2.0
            free = np.argwhere(~occ)
            if len(free) == 0:
                continue
            gi, gj = rng.integers(0, 25, size=2)
            got, = decode(np.array([(gi + 0.5) * 0.1, (gj + 0.5) * 0.1]), belief)
            # Brute force: nearest free cell by (squared distance, i, j).
            best = min(((ci - gi) ** 2 + (cj - gj) ** 2, ci, cj)
                       for ci, cj in map(tuple, free))
            if not occ[gi, gj]:
                assert got == (gi, gj)
            else:
                assert ((got[0] - gi) ** 2 + (got[1] - gj) ** 2, *got) == best

    def test_k_one_single_target(self):
        belief = known_empty_belief(10, 0.1)
        assert len(decode(np.array([0.5, 0.5]), belief)) == 1

    def test_out_of_band_genes_clamp_into_grid(self):
        belief = known_empty_belief(10, 0.1)
        (i, j), = decode(np.array([999.0, -3.0]), belief)
        assert 0 <= i < 10 and 0 <= j < 10


class TestFitness:
    def make_objective(self, belief, cell=(5, 5), energy=10_000, k=1):
        return ExplorationObjective(belief, cell, 0, k, energy,
                                    sensor.LidarConfig())

    def test_fully_explored_belief_gives_zero(self):
        belief = known_empty_belief(40, 0.2)
        obj = self.make_objective(belief)
        assert obj(np.array([3.0, 3.0])) == 0.0

    def test_energy_infeasible_at_least_penalty(self):
        belief = known_empty_belief(40, 0.2)
        obj = self.make_objective(belief, cell=(2, 2), energy=3)
        fit = obj(np.array([7.0, 7.0]))  # far corner: needs >> 3 steps
        assert fit >= obj.penalty_weight

    def test_unreachable_gets_penalty(self):
        belief = known_empty_belief(30, 0.2)
        belief.log_odds[:, 15] = 2.0  # wall across
        obj = self.make_objective(belief, cell=(5, 5))
        assert obj(np.array([2.0, 5.0])) == obj.penalty_weight

    def test_more_gain_strictly_lower_fitness(self):
        # Explored south half, unknown north half: a northern target sweeps
        # strictly more unknown cells than a southern one.
        belief = OccupancyGrid(GridSpec(50, 50, 0.2))
        belief.log_odds[:, :25] = -1.0
        belief.touched[:, :25] = 1
        obj = self.make_objective(belief, cell=(25, 5))
        north = obj(np.array([5.0, 4.4]))
        south = obj(np.array([5.0, 1.6]))
        assert north < south

    def test_zero_gain_fitness_is_count_unknown(self):
        belief = OccupancyGrid(GridSpec(60, 60, 0.2))
        belief.log_odds[:30, :30] = -1.0
        belief.touched[:30, :30] = 1
        obj = self.make_objective(belief, cell=(5, 5))
        # Target deep inside the explored block, far from any unknown.
        fit = obj(np.array([1.0, 1.0]))
        assert fit == float(obj.unknown_total)
        unknown_near = obj(np.array([5.4, 5.4]))
        assert unknown_near < fit


class TestSelectTargets:
    def test_corner_scenario_targets_near_unknown(self):
        world = make_box_world(40, 0.2)
        shared = OccupancyGrid(world.spec)
        shared.log_odds[:, :] = -1.0
        shared.touched[:, :] = 1
        # Unknown pocket in the north-east corner.
        shared.log_odds[30:39, 30:39] = 0.0
        shared.touched[30:39, 30:39] = 0
        robot = make_robot(cell=(5, 5), energy=10_000)
        targets, result = select_targets(robot, shared, resolve("xboa-pop20"),
                                         k_targets=1)
        # Exhaustive oracle: evaluate every free cell center as a target.
        obj = ExplorationObjective(shared.belief_snapshot(), robot.cell, 0, 1,
                                   robot.energy_steps, sensor.LidarConfig())
        best_cell, best_fit = None, math.inf
        for i in range(1, 39):
            for j in range(1, 39):
                fit = obj(np.array([(i + 0.5) * 0.2, (j + 0.5) * 0.2]))
                if fit < best_fit:
                    best_cell, best_fit = (i, j), fit
        unknown_cells = np.argwhere(shared.touched == 0)
        d_target = np.min(np.hypot(*(unknown_cells - np.array(targets[0])).T)) * 0.2
        d_oracle = np.min(np.hypot(*(unknown_cells - np.array(best_cell)).T)) * 0.2
        assert d_oracle <= sensor.LidarConfig().max_range_m
        assert d_target <= sensor.LidarConfig().max_range_m
        assert result.best_fitness <= best_fit * 1.10 + 1.0

    def test_zero_energy_is_no_feasible_target(self):
        shared = OccupancyGrid(GridSpec(20, 20, 0.2))
        robot = make_robot(energy=0)
        with pytest.raises(NoFeasibleTarget):
            select_targets(robot, shared, resolve("xboa-pop5"), k_targets=1)

    def test_same_seed_same_targets(self):
        world = make_box_world(30, 0.2)
        shared = OccupancyGrid(world.spec)
        sensor.scan_into(shared, world, (3.0, 3.0, 0), sensor.LidarConfig())
        out = []
        for _ in range(2):
            robot = make_robot(cell=(15, 15), energy=1000)
            rng = np.random.default_rng(99)
            targets, _ = select_targets(robot, shared, resolve("boa-pop5"),
                                        k_targets=2, opt_rng=rng)
            out.append(targets)
        assert out[0] == out[1]


def small_mission(algo="xboa-pop5", n_robots=1, energy=400, seed=25, k=1,
                  world=None, **kw):
    world = world or make_box_world(40, 0.2)
    return MissionConfig(truth_grid=world, preset=resolve(algo),
                         n_robots=n_robots, energy=energy, k_targets=k,
                         seed=seed, **kw)


class TestMission:
    def test_explores_small_empty_world(self):
        res = run_mission(small_mission())
        assert res.outcome == "explored"
        assert res.final_rate >= 0.99
        assert res.total_steps <= 400

    def test_zero_energy_ends_at_initial_scan(self):
        res = run_mission(small_mission(energy=0))
        assert res.ticks <= 1
        assert res.total_steps == 0
        rate_tick0 = res.series[0][3]
        assert res.final_rate == rate_tick0 > 0

    def test_rate_monotone_across_ticks(self):
        res = run_mission(small_mission(seed=3))
        rates = [row[3] for row in res.series]
        assert all(b >= a for a, b in zip(rates, rates[1:]))

    def test_deterministic_replay(self):
        r1 = run_mission(small_mission(seed=7))
        r2 = run_mission(small_mission(seed=7))
        assert r1.series == r2.series
        assert r1.trajectory == r2.trajectory
        assert r1.optimizer_rows == r2.optimizer_rows
        assert np.array_equal(r1.final_map.log_odds, r2.final_map.log_odds)

    def test_robots_never_collide_or_enter_walls(self):
        world = make_box_world(40, 0.2)
        cfg = small_mission(n_robots=3, seed=11, world=world, energy=300)
        mission = Mission(cfg)
        seen = {}
        result = mission.run()
        for tick, rid, x, y, heading, energy, mode in result.trajectory:
            cell = (int(x / 0.2), int(y / 0.2))
            assert world.truth[cell] == 0
            key = (tick, cell)
            assert seen.setdefault(key, rid) == rid  # one robot per cell/tick
        assert result.final_rate > 0.5

    def test_energy_accounting_matches_steps_metric(self):
        res = run_mission(small_mission(seed=5, energy=150))
        last_rows = {rid: steps for _, rid, steps, _, _ in res.series}
        assert res.total_steps == sum(last_rows.values())
        assert all(steps <= 150 for steps in last_rows.values())

    def test_robots_share_only_the_map(self):
        # The FSM service surface hands each robot only its own state plus
        # shared-map derived data; robot objects never reference each other.
        cfg = small_mission(n_robots=2, seed=2, energy=200)
        mission = Mission(cfg)
        mission.run()
        for r in mission.robots:
            assert not hasattr(r, "peers")

    def test_done_robots_stay_done(self):
        res = run_mission(small_mission(seed=13, energy=60))
        by_robot = {}
        for tick, rid, *_, mode in res.trajectory:
            by_robot.setdefault(rid, []).append(mode)
        for modes in by_robot.values():
            if "done" in modes:
                first = modes.index("done")
                assert all(m == "done" for m in modes[first:])

    def test_default_start_poses_distinct_cells(self):
        poses = default_start_poses(4, 0.2)
        cells = {(int(x / 0.2), int(y / 0.2)) for x, y, _ in poses}
        assert len(cells) == 4

    def test_plan_rejects_energy_infeasible_tour(self):
        cfg = small_mission(energy=5)
        mission = Mission(cfg)
        robot = mission.robots[0]
        robot.current_targets = [(35, 35)]  # far corner: needs >> 5 steps
        assert mission.plan(robot) is None
        robot.current_targets = [(robot.cell[0], robot.cell[1] + 2)]
        assert mission.plan(robot) is not None


def corridor_world():
    """3-cell-wide corridor with a passing bay halfway along the north
    side; long enough that two robots meet head-on."""
    w, h = 30, 7
    truth = np.ones((w, h), dtype=np.uint8)
    truth[1:29, 2:5] = 0          # corridor rows j=2..4
    truth[12:18, 5:6] = 0         # passing bay
    from swarm_bench.gridmap import GridSpec, OccupancyGrid
    return OccupancyGrid(GridSpec(w, h, 0.2), truth=truth)


class TestCorridorConflict:
    def test_head_on_conflict_resolves_and_both_arrive(self):
        from swarm_bench.robot import RobotMode, fsm_tick

        world = corridor_world()
        # stop_rate > 1 keeps the explored-stop out of this scripted run:
        # the corridor is tiny, the robots see almost all of it immediately.
        cfg = MissionConfig(truth_grid=world, preset=resolve("boa-pop5"),
                            n_robots=2, energy=300, seed=1, stop_rate=2.0,
                            start_poses=[(0.5, 0.7, 90), (5.5, 0.7, 270)])
        mission = Mission(cfg)
        r0, r1 = mission.robots
        # Script the targets: swap ends so the robots must pass each other
        # in the corridor; skip the optimizer entirely.
        for r in mission.robots:
            mission._scan(r)
        r0.current_targets = [(27, 3)]
        r1.current_targets = [(2, 3)]
        r0.mode = RobotMode.PLANNING
        r1.mode = RobotMode.PLANNING
        waited = False
        for _ in range(250):
            for r in mission.robots:
                if r.current_targets or r.current_path:
                    fsm_tick(r, mission)
            waited = waited or any(r.mode is RobotMode.WAITING
                                   for r in mission.robots)
            assert r0.cell != r1.cell
            if not r0.current_targets and not r1.current_targets:
                break
        assert r0.cell == (27, 3)
        assert r1.cell == (2, 3)
        assert waited  # the conflict actually happened and was resolved
