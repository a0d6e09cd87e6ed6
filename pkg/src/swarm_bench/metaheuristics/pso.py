"""Particle swarm optimizer with a ring topology (lbest).

Velocity update per particle: inertia term, cognitive pull toward the
particle's own best, social pull toward the best memory in its ring
neighborhood. Velocities are clamped componentwise to a fraction of the
domain width.
"""

from dataclasses import dataclass

import numpy as np

from .base import Algorithm, Population


@dataclass
class PsoParams:
    social_coef: float = 1.506
    cognitive_coef: float = 3.379
    max_velocity: float = 0.329  # fraction of the domain width per dimension
    inertia_weight: float = 0.449
    neighborhood_size: int = 4   # ring neighbors (two on each side)

    def __post_init__(self):
        if self.max_velocity <= 0:
            raise ValueError("max_velocity must be positive")


class Pso(Algorithm):
    name = "pso"

    def __init__(self, params: PsoParams | None = None):
        self.params = params or PsoParams()
        self.velocity = None
        self.pbest_genes = None
        self.pbest_fitness = None

    def prepare(self, pop: Population, max_gens: int) -> None:
        n = pop.size
        dim = len(pop.members[0].genes)
        self.velocity = np.zeros((n, dim))
        self.pbest_genes = np.array([m.genes for m in pop.members])
        self.pbest_fitness = np.array([m.fitness for m in pop.members])

    def _neighborhood_best(self, i: int, n: int) -> int:
        half = self.params.neighborhood_size // 2
        best = i
        for d in range(-half, half + 1):
            j = (i + d) % n
            if self.pbest_fitness[j] < self.pbest_fitness[best]:
                best = j
        return best

    def step(self, pop: Population, objective, lower, upper, rng) -> None:
        params = self.params
        n = pop.size
        dim = len(pop.members[0].genes)
        width = upper - lower
        vmax = params.max_velocity * width
        # Neighborhood bests from the memories at generation start.
        nbest = [self._neighborhood_best(i, n) for i in range(n)]
        for i in range(n):
            m = pop.members[i]
            r1 = rng.random(dim)
            r2 = rng.random(dim)
            v = (params.inertia_weight * self.velocity[i]
                 + params.cognitive_coef * r1 * (self.pbest_genes[i] - m.genes)
                 + params.social_coef * r2 * (self.pbest_genes[nbest[i]] - m.genes))
            v = np.clip(v, -vmax, vmax)
            self.velocity[i] = v
            m.genes = np.clip(m.genes + v, lower, upper)
            m.fitness = pop.eval_genes(objective, m.genes)
            if m.fitness < self.pbest_fitness[i]:
                self.pbest_fitness[i] = m.fitness
                self.pbest_genes[i] = m.genes.copy()
