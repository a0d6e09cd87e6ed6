"""Exception types shared across the simulator."""


class SwarmBenchError(Exception):
    """Base class for all package errors."""


class MalformedMap(SwarmBenchError):
    """Map text is ragged, contains unknown characters, or has an open perimeter."""


class NumericError(SwarmBenchError):
    """A numeric argument was non-finite."""


class InvalidPose(SwarmBenchError):
    """Pose outside the grid or inside an obstacle."""


class EnergyExhausted(SwarmBenchError):
    """A motion command was issued with zero energy remaining."""


class InvalidQuery(SwarmBenchError):
    """A planner query started from an occupied cell."""


class NoPathError(SwarmBenchError):
    """A tour leg has no path. Carries the index of the failing leg."""

    def __init__(self, leg: int):
        super().__init__(f"no path for tour leg {leg}")
        self.leg = leg


class InvalidCutPoint(SwarmBenchError):
    """Crossover cut point outside [1, D-1]."""


class NoFeasibleTarget(SwarmBenchError):
    """The optimizer produced only penalized (infeasible) candidates."""


class ConfigError(SwarmBenchError):
    """Bad experiment configuration."""


class IoError(SwarmBenchError):
    """Output location is not writable."""
