"""Robot state, grid motion commands, energy accounting, navigation FSM.

Motion is 8-connected with 45-degree headings, so grid paths translate
exactly into move/turn command sequences. Every executed move or turn
costs one energy step; turning and moving are tallied separately for the
metrics. Localization is ground truth.
"""

from dataclasses import dataclass, field
from enum import Enum

from .errors import EnergyExhausted
from .planner import heading_between, turns_between

# Ticks a robot waits on a blocker before replanning around it.
CONFLICT_WAIT_TICKS = 3

HEADING_DELTAS = {0: (0, 1), 45: (1, 1), 90: (1, 0), 135: (1, -1),
                  180: (0, -1), 225: (-1, -1), 270: (-1, 0), 315: (-1, 1)}


class MotionCommand(Enum):
    MOVE_FORWARD_ONE_CELL = "move"
    TURN_LEFT_45 = "turn_left"
    TURN_RIGHT_45 = "turn_right"
    STOP = "stop"


class RobotMode(Enum):
    IDLE = "idle"
    OPTIMIZING = "optimizing"
    PLANNING = "planning"
    EXECUTING = "executing"
    WAITING = "waiting"
    BLOCKED = "blocked"
    DONE = "done"


@dataclass
class Pose:
    x_m: float
    y_m: float
    heading_deg: int  # multiple of 45, in [0, 360)


@dataclass
class RobotState:
    id: int
    pose: Pose
    cell: tuple
    energy_steps: int
    rng: object = None
    mode: RobotMode = RobotMode.IDLE
    current_path: list = field(default_factory=list)  # upcoming cells
    current_targets: list = field(default_factory=list)
    initial_energy: int = 0
    moves: int = 0
    turns: int = 0
    wait_ticks: int = 0
    waiting_on: tuple | None = None
    avoid_cell: tuple | None = None
    done_reason: str | None = None

    def __post_init__(self):
        if self.initial_energy == 0:
            self.initial_energy = self.energy_steps

    @property
    def steps_used(self) -> int:
        return self.initial_energy - self.energy_steps


@dataclass
class WorldView:
    """What motion can see: ground truth plus the other robots' cells."""
    truth_grid: object
    other_cells: set


def apply_command(robot: RobotState, cmd: MotionCommand, world: WorldView) -> RobotState:
    """Execute one motion command in place.

    Moves into walls, other robots, or out of bounds leave the pose and
    energy unchanged and set mode=BLOCKED. Issuing a non-Stop command with
    zero energy raises EnergyExhausted.
    """
    if cmd is MotionCommand.STOP:
        return robot
    if robot.energy_steps <= 0:
        raise EnergyExhausted(f"robot {robot.id} has no energy left")

    if cmd is MotionCommand.TURN_LEFT_45:
        robot.pose.heading_deg = (robot.pose.heading_deg - 45) % 360
        robot.energy_steps -= 1
        robot.turns += 1
        return robot
    if cmd is MotionCommand.TURN_RIGHT_45:
        robot.pose.heading_deg = (robot.pose.heading_deg + 45) % 360
        robot.energy_steps -= 1
        robot.turns += 1
        return robot

    di, dj = HEADING_DELTAS[robot.pose.heading_deg % 360]
    dest = (robot.cell[0] + di, robot.cell[1] + dj)
    grid = world.truth_grid
    if (not grid.in_bounds(*dest) or grid.truth[dest[0], dest[1]]
            or dest in world.other_cells):
        robot.mode = RobotMode.BLOCKED
        return robot
    robot.cell = dest
    cs = grid.spec.cell_size_m
    robot.pose.x_m = (dest[0] + 0.5) * cs
    robot.pose.y_m = (dest[1] + 0.5) * cs
    robot.energy_steps -= 1
    robot.moves += 1
    return robot


def solve_conflict(a: RobotState, b: RobotState):
    """Deterministic priority rule for two robots that want each other's
    cell (or the same cell) next tick: the lower id keeps executing, the
    higher id waits."""
    keeper, waiter = (a, b) if a.id < b.id else (b, a)
    keeper.mode = RobotMode.EXECUTING
    waiter.mode = RobotMode.WAITING
    waiter.wait_ticks = 0
    waiter.waiting_on = keeper.cell
    return a, b


def fsm_tick(robot: RobotState, services) -> RobotState:
    """Advance the navigation FSM by one transition.

    ``services`` supplies the mission context:
      exploration_rate(), stop_rate, select_targets(robot),
      plan(robot), robot_at(cell, exclude), path_blocked(robot),
      world_view(robot), after_move(robot), report_bump(cell).
    """
    if robot.mode is RobotMode.DONE:
        return robot
    if services.exploration_rate() >= services.stop_rate:
        robot.mode = RobotMode.DONE
        robot.done_reason = "explored"
        return robot
    if robot.energy_steps <= 0:
        robot.mode = RobotMode.DONE
        robot.done_reason = "exhausted"
        return robot

    mode = robot.mode
    if mode is RobotMode.IDLE:
        robot.mode = RobotMode.PLANNING if robot.current_targets else RobotMode.OPTIMIZING
        return robot

    if mode is RobotMode.OPTIMIZING:
        targets = services.select_targets(robot)
        if targets is None:
            robot.mode = RobotMode.DONE
            robot.done_reason = "no_feasible_target"
        else:
            robot.current_targets = list(targets)
            robot.mode = RobotMode.PLANNING
        return robot

    if mode is RobotMode.PLANNING:
        path = services.plan(robot)
        robot.avoid_cell = None
        if path is None:
            robot.current_targets = []
            robot.current_path = []
            robot.mode = RobotMode.OPTIMIZING
        elif not path:  # already at the tour's end
            robot.current_targets = []
            robot.current_path = []
            robot.mode = RobotMode.IDLE
        else:
            robot.current_path = path
            robot.mode = RobotMode.EXECUTING
        return robot

    if mode is RobotMode.EXECUTING:
        if not robot.current_path:
            robot.current_targets = []
            robot.mode = RobotMode.IDLE
            return robot
        if services.path_blocked(robot):
            robot.mode = RobotMode.PLANNING
            return robot
        nxt = robot.current_path[0]
        blocker = services.robot_at(nxt, exclude=robot.id)
        if blocker is not None:
            if robot.id < blocker.id:
                return robot  # priority: keep executing, retry next tick
            robot.mode = RobotMode.WAITING
            robot.wait_ticks = 0
            robot.waiting_on = nxt
            return robot
        want = heading_between(robot.cell, nxt)
        if robot.pose.heading_deg != want:
            cmd = _turn_toward(robot.pose.heading_deg, want)
            apply_command(robot, cmd, services.world_view(robot))
            return robot
        apply_command(robot, MotionCommand.MOVE_FORWARD_ONE_CELL,
                      services.world_view(robot))
        if robot.mode is RobotMode.BLOCKED:
            # Bumped an obstacle the belief does not know (e.g. inside the
            # LIDAR blind zone): record it so the planner can route around.
            services.report_bump(nxt)
            robot.mode = RobotMode.PLANNING
            return robot
        robot.current_path.pop(0)
        services.after_move(robot)
        if robot.current_targets and robot.cell == tuple(robot.current_targets[0]):
            robot.current_targets.pop(0)
        if not robot.current_path:
            robot.current_targets = []
            robot.mode = RobotMode.IDLE
        return robot

    if mode is RobotMode.WAITING:
        if services.robot_at(robot.waiting_on, exclude=robot.id) is None:
            robot.mode = RobotMode.EXECUTING
            robot.waiting_on = None
            robot.wait_ticks = 0
            return robot
        robot.wait_ticks += 1
        if robot.wait_ticks >= CONFLICT_WAIT_TICKS:
            robot.avoid_cell = robot.waiting_on
            robot.waiting_on = None
            robot.wait_ticks = 0
            robot.mode = RobotMode.PLANNING
        return robot

    if mode is RobotMode.BLOCKED:
        robot.mode = RobotMode.PLANNING
        return robot

    raise AssertionError(f"unhandled mode {mode}")


def _turn_toward(heading: int, want: int) -> MotionCommand:
    cw = ((want - heading) // 45) % 8
    ccw = 8 - cw
    # Ties (180-degree reversals) turn right for determinism.
    if cw <= ccw:
        return MotionCommand.TURN_RIGHT_45
    return MotionCommand.TURN_LEFT_45


def command_count(path_cells, initial_heading: int) -> int:
    """Moves + turns needed to walk ``path_cells`` from ``initial_heading``."""
    heading = initial_heading % 360
    total = 0
    for prev, nxt in zip(path_cells, path_cells[1:]):
        want = heading_between(prev, nxt)
        total += turns_between(heading, want) + 1
        heading = want
    return total
