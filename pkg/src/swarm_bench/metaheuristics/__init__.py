"""Population metaheuristics behind one algorithm interface.

``make_algorithm(name, params)`` builds a fresh per-run instance; third
party algorithms can be plugged in by registering a factory.
"""

from .base import (Algorithm, Candidate, GenStats, Population, RunResult,
                   evaluate, history_csv_rows, intensity, run,
                   sample_population)
from .boa import (Aboa, Boa, BoaParams, Mboa, Saboa, Xboa,
                  crossover_single_point, fragrance, raw_fragrance,
                  updated_sensor_modality)
from .ga import Ga, GaParams, polynomial_mutation
from .pso import Pso, PsoParams

_FACTORIES = {
    "boa": (Boa, BoaParams),
    "xboa": (Xboa, BoaParams),
    "mboa": (Mboa, BoaParams),
    "saboa": (Saboa, BoaParams),
    "aboa": (Aboa, BoaParams),
    "ga": (Ga, GaParams),
    "pso": (Pso, PsoParams),
}


def algorithm_names():
    return sorted(_FACTORIES)


def register_algorithm(name: str, algo_cls, params_cls=None):
    _FACTORIES[name] = (algo_cls, params_cls)


def make_algorithm(name: str, params=None, **kwargs) -> Algorithm:
    try:
        algo_cls, params_cls = _FACTORIES[name]
    except KeyError:
        raise KeyError(f"unknown algorithm {name!r}; registered: "
                       f"{', '.join(algorithm_names())}") from None
    if params is None and params_cls is not None:
        params = params_cls(**kwargs) if kwargs else params_cls()
    return algo_cls(params) if params is not None else algo_cls()


__all__ = [
    "Algorithm", "Candidate", "GenStats", "Population", "RunResult",
    "evaluate", "history_csv_rows", "intensity", "run", "sample_population",
    "Boa", "Xboa", "Mboa", "Saboa", "Aboa", "BoaParams",
    "crossover_single_point", "fragrance", "raw_fragrance",
    "updated_sensor_modality",
    "Ga", "GaParams", "polynomial_mutation", "Pso", "PsoParams",
    "algorithm_names", "register_algorithm", "make_algorithm",
]
