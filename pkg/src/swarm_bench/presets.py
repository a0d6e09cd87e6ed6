"""Named algorithm presets: the tuned hyperparameter sets shipped as
configuration defaults, keyed by algorithm and population size."""

from .metaheuristics import BoaParams, GaParams, PsoParams


class Preset:
    def __init__(self, algorithm: str, pop_size: int, params):
        self.algorithm = algorithm
        self.pop_size = pop_size
        self.params = params


PRESETS = {
    "boa-pop20": Preset("boa", 20, BoaParams(
        power_exponent_a=0.547, sensor_modality_c=0.602, switch_probability=0.395)),
    "boa-pop5": Preset("boa", 5, BoaParams(
        power_exponent_a=0.73, sensor_modality_c=0.577, switch_probability=0.331)),
    "xboa-pop20": Preset("xboa", 20, BoaParams(
        power_exponent_a=0.905, sensor_modality_c=0.257, crossover_probability=0.593)),
    "xboa-pop5": Preset("xboa", 5, BoaParams(
        power_exponent_a=0.994, sensor_modality_c=0.518, crossover_probability=0.583)),
    "mboa-pop5": Preset("mboa", 5, BoaParams(
        power_exponent_a=0.61, sensor_modality_c=0.356, switch_probability=0.762)),
    "aboa-pop5": Preset("aboa", 5, BoaParams(
        power_exponent_a=0.992, sensor_modality_c=0.98, switch_probability=0.983,
        mu=1.356)),
    "saboa-pop5": Preset("saboa", 5, BoaParams(switch_probability=0.237)),
    "ga-default": Preset("ga", 20, GaParams(
        crossover_probability=0.11, mutation_probability=0.215,
        mutation_distribution_index=76.026)),
    "pso-default": Preset("pso", 20, PsoParams(
        social_coef=1.506, cognitive_coef=3.379, max_velocity=0.329,
        inertia_weight=0.449, neighborhood_size=4)),
}

# Bare algorithm names resolve to a sensible preset.
DEFAULT_PRESET = {
    "boa": "boa-pop20",
    "xboa": "xboa-pop20",
    "mboa": "mboa-pop5",
    "aboa": "aboa-pop5",
    "saboa": "saboa-pop5",
    "ga": "ga-default",
    "pso": "pso-default",
}


def resolve(name: str) -> Preset:
    """Look up a preset by preset name or bare algorithm name."""
    if name in PRESETS:
        return PRESETS[name]
    if name in DEFAULT_PRESET:
        return PRESETS[DEFAULT_PRESET[name]]
    known = sorted(PRESETS) + sorted(DEFAULT_PRESET)
    raise KeyError(f"unknown algorithm or preset {name!r}; known: {', '.join(known)}")
