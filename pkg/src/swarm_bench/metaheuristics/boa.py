"""Butterfly-style optimizers: the original algorithm and four variants.

Shared machinery: each candidate emits a fragrance F = c * I^a derived
from its fitness intensity; per candidate a coin decides between the
global move toward the best-known solution and a local move built from
two random population members. The sensor-modality factor c follows a
per-generation schedule.

Variant differences:
  * crossover variant (xBOA): the global move is replaced by single-point
    crossover with a random partner (better child replaces the parent);
    local moves are accepted even when they degrade fitness.
  * intensified variant (mBOA): extra probes around the best solution
    with a shrinking radius after the normal generation.
  * self-adaptive variant (SABOA): fragrance is the intensity normalized
    by the population maximum; no c/a parameters.
  * nonlinear variant (ABOA): c follows c0 * (1 - (t/T)^mu) instead of
    the incremental rule.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidCutPoint
from .base import Algorithm, Population, intensity

SABOA_EPS = 1e-12


@dataclass
class BoaParams:
    power_exponent_a: float = 0.547
    sensor_modality_c: float = 0.602
    switch_probability: float = 0.395
    crossover_probability: float = 0.593  # crossover variant only
    mu: float = 1.356                     # nonlinear-schedule variant only
    intensify_radius_frac: float = 0.05   # intensified variant only
    intensify_probes: int = 5
    decreasing_c: bool = False  # alternate schedule; off by default

    def __post_init__(self):
        if self.sensor_modality_c <= 0:
            raise ValueError("sensor_modality_c must be positive")
        if not 0 < self.power_exponent_a <= 1:
            raise ValueError("power_exponent_a must be in (0, 1]")
        for name in ("switch_probability", "crossover_probability"):
            p = getattr(self, name)
            if not 0 <= p <= 1:
                raise ValueError(f"{name} must be in [0, 1]")


def raw_fragrance(i_value: float, c: float, a: float) -> float:
    """F = c * I^a for a given intensity. No parameter validation: the
    arithmetic is defined for any c, a."""
    if i_value < 0:
        raise ValueError("intensity must be non-negative")
    return c * i_value ** a


def fragrance(fitness: float, params: BoaParams, f_min: float,
              c: float | None = None) -> float:
    """F = c * I^a with I the fitness intensity relative to the
    population best."""
    cc = params.sensor_modality_c if c is None else c
    return raw_fragrance(intensity(fitness, f_min), cc, params.power_exponent_a)


def crossover_single_point(genes1: np.ndarray, genes2: np.ndarray, point: int):
    """Split both parents at ``point`` and swap the tails."""
    if len(genes1) != len(genes2):
        raise ValueError("parents must have equal gene length")
    if not 1 <= point <= len(genes1) - 1:
        raise InvalidCutPoint(f"cut point {point} outside [1, {len(genes1) - 1}]")
    child1 = np.concatenate([genes1[:point], genes2[point:]])
    child2 = np.concatenate([genes2[:point], genes1[point:]])
    return child1, child2


def updated_sensor_modality(c: float, max_gens: int, decreasing: bool = False) -> float:
    """Per-generation schedule for c. The reference rule adds
    0.025 / (c * T); the decreasing toggle subtracts it instead."""
    delta = 0.025 / (c * max_gens)
    if decreasing:
        return max(c - delta, 1e-12)
    return c + delta


class Boa(Algorithm):
    """Original algorithm: greedy per-candidate acceptance, elitist record."""

    name = "boa"

    def __init__(self, params: BoaParams | None = None):
        self.params = params or BoaParams()
        self.c = self.params.sensor_modality_c
        self.max_gens = 30

    def prepare(self, pop: Population, max_gens: int) -> None:
        self.c = self.params.sensor_modality_c
        self.max_gens = max_gens

    def _fragrances(self, pop: Population) -> np.ndarray:
        f_min = min(m.fitness for m in pop.members)
        return np.array([self.c * intensity(m.fitness, f_min) ** self.params.power_exponent_a
                         for m in pop.members])

    def _local_move(self, pop, i, frag_i, r, rng):
        n = pop.size
        j = int(rng.integers(n))
        k = int(rng.integers(n))
        xi = pop.members[i].genes
        return xi + (r * r * pop.members[j].genes - pop.members[k].genes) * frag_i

    def _global_move(self, pop, i, frag_i, r):
        xi = pop.members[i].genes
        return xi + (r * r * pop.best_genes - xi) * frag_i

    def step(self, pop: Population, objective, lower, upper, rng) -> None:
        params = self.params
        frag = self._fragrances(pop)
        for i in range(pop.size):
            r = float(rng.random())
            if r < params.switch_probability:
                new = self._global_move(pop, i, frag[i], r)
            else:
                new = self._local_move(pop, i, frag[i], r, rng)
            new = np.clip(new, lower, upper)
            f_new = pop.eval_genes(objective, new)
            if f_new < pop.members[i].fitness:
                pop.members[i].genes = new
                pop.members[i].fitness = f_new
        self.c = updated_sensor_modality(self.c, self.max_gens, params.decreasing_c)


class Xboa(Boa):
    """Crossover variant: global search by recombination with a random
    partner, unconditional acceptance of local moves."""

    name = "xboa"

    def step(self, pop: Population, objective, lower, upper, rng) -> None:
        params = self.params
        frag = self._fragrances(pop)
        n = pop.size
        dim = len(pop.members[0].genes)
        for i in range(n):
            r = float(rng.random())
            if r < params.crossover_probability and n > 1 and dim > 1:
                j = int(rng.integers(n - 1))
                if j >= i:
                    j += 1
                point = int(rng.integers(1, dim))
                child1, child2 = crossover_single_point(
                    pop.members[i].genes, pop.members[j].genes, point)
                f1 = pop.eval_genes(objective, child1)
                f2 = pop.eval_genes(objective, child2)
                if f2 < f1:
                    pop.members[i].genes = child2
                    pop.members[i].fitness = f2
                else:
                    pop.members[i].genes = child1
                    pop.members[i].fitness = f1
            else:
                new = np.clip(self._local_move(pop, i, frag[i], r, rng), lower, upper)
                # Accepted even when worse; best_ever keeps the record.
                pop.members[i].genes = new
                pop.members[i].fitness = pop.eval_genes(objective, new)
        self.c = updated_sensor_modality(self.c, self.max_gens, params.decreasing_c)


class Mboa(Boa):
    """Intensified variant: after the normal generation, probe around the
    best solution with a radius shrinking linearly over the run."""

    name = "mboa"

    def step(self, pop: Population, objective, lower, upper, rng) -> None:
        t = pop.generation  # completed generations before this one
        super().step(pop, objective, lower, upper, rng)
        params = self.params
        width = upper - lower
        radius = params.intensify_radius_frac * (1.0 - t / self.max_gens)
        for _ in range(params.intensify_probes):
            probe = pop.best_genes + rng.uniform(-1.0, 1.0, size=len(width)) * radius * width
            probe = np.clip(probe, lower, upper)
            pop.eval_genes(objective, probe)  # record-keeping accepts improvements


class Saboa(Boa):
    """Self-adaptive variant: fragrance is intensity normalized by the
    population maximum; only the switch probability remains."""

    name = "saboa"

    def _fragrances(self, pop: Population) -> np.ndarray:
        f_min = min(m.fitness for m in pop.members)
        intensities = np.array([intensity(m.fitness, f_min) for m in pop.members])
        return intensities / (intensities.max() + SABOA_EPS)

    def step(self, pop: Population, objective, lower, upper, rng) -> None:
        params = self.params
        frag = self._fragrances(pop)
        for i in range(pop.size):
            r = float(rng.random())
            if r < params.switch_probability:
                new = self._global_move(pop, i, frag[i], r)
            else:
                new = self._local_move(pop, i, frag[i], r, rng)
            new = np.clip(new, lower, upper)
            f_new = pop.eval_genes(objective, new)
            if f_new < pop.members[i].fitness:
                pop.members[i].genes = new
                pop.members[i].fitness = f_new
        # No sensor-modality schedule in this variant.


class Aboa(Boa):
    """Nonlinear-schedule variant: c(t) = c0 * (1 - (t/T)^mu)."""

    name = "aboa"

    def schedule(self, t: int) -> float:
        p = self.params
        return p.sensor_modality_c * (1.0 - (t / self.max_gens) ** p.mu)

    def step(self, pop: Population, objective, lower, upper, rng) -> None:
        self.c = self.schedule(pop.generation)
        params = self.params
        frag = self._fragrances(pop)
        for i in range(pop.size):
            r = float(rng.random())
            if r < params.switch_probability:
                new = self._global_move(pop, i, frag[i], r)
            else:
                new = self._local_move(pop, i, frag[i], r, rng)
            new = np.clip(new, lower, upper)
            f_new = pop.eval_genes(objective, new)
            if f_new < pop.members[i].fitness:
                pop.members[i].genes = new
                pop.members[i].fitness = f_new
