"""Genetic algorithm: size-2 tournaments, single-point crossover,
polynomial mutation, generational replacement with 1-elitism."""

from dataclasses import dataclass

from .base import Algorithm, Candidate, Population, evaluate
from .boa import crossover_single_point


@dataclass
class GaParams:
    crossover_probability: float = 0.11
    mutation_probability: float = 0.215
    mutation_distribution_index: float = 76.026
    tournament_size: int = 2

    def __post_init__(self):
        for name in ("crossover_probability", "mutation_probability"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must be in [0, 1]")


def polynomial_mutation(x: float, lo: float, hi: float, eta: float, u: float) -> float:
    """Bounded polynomial mutation; u = 0.5 leaves the gene unchanged."""
    if u < 0.5:
        delta = (2.0 * u) ** (1.0 / (eta + 1.0)) - 1.0
    else:
        delta = 1.0 - (2.0 * (1.0 - u)) ** (1.0 / (eta + 1.0))
    return min(max(x + delta * (hi - lo), lo), hi)


class Ga(Algorithm):
    name = "ga"

    def __init__(self, params: GaParams | None = None):
        self.params = params or GaParams()

    def _tournament(self, pop: Population, rng) -> Candidate:
        idx = rng.integers(pop.size, size=self.params.tournament_size)
        best = pop.members[int(idx[0])]
        for i in idx[1:]:
            if pop.members[int(i)].fitness < best.fitness:
                best = pop.members[int(i)]
        return best

    def step(self, pop: Population, objective, lower, upper, rng) -> None:
        params = self.params
        n = pop.size
        dim = len(pop.members[0].genes)
        elite = min(pop.members, key=lambda m: m.fitness)
        elite_genes = elite.genes.copy()
        elite_fitness = elite.fitness

        parents = [self._tournament(pop, rng) for _ in range(n)]
        children: list[Candidate] = []
        for a, b in zip(parents[0::2], parents[1::2]):
            if dim > 1 and rng.random() < params.crossover_probability:
                point = int(rng.integers(1, dim))
                g1, g2 = crossover_single_point(a.genes, b.genes, point)
                children.append(Candidate(g1))
                children.append(Candidate(g2))
            else:
                children.append(Candidate(a.genes.copy(), a.fitness))
                children.append(Candidate(b.genes.copy(), b.fitness))
        if len(children) < n:  # odd population: last parent passes through
            last = parents[-1]
            children.append(Candidate(last.genes.copy(), last.fitness))

        for child in children:
            mutated = False
            genes = child.genes
            for d in range(dim):
                if rng.random() < params.mutation_probability:
                    genes[d] = polynomial_mutation(
                        genes[d], lower[d], upper[d],
                        params.mutation_distribution_index, float(rng.random()))
                    mutated = True
            if mutated:
                child.fitness = None

        pop.members = children
        evaluate(pop, objective)
        worst_i = max(range(n), key=lambda i: pop.members[i].fitness)
        if elite_fitness < min(m.fitness for m in pop.members):
            pop.members[worst_i] = Candidate(elite_genes, elite_fitness)
