"""Population substrate shared by every algorithm: candidates, the
evaluation/bookkeeping core, and the generation loop with early stopping.

Minimization convention throughout. ``best_ever`` is the elitist record:
it never worsens even when an algorithm accepts degrading moves.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np


@dataclass
class Candidate:
    genes: np.ndarray
    fitness: float | None = None
    flagged: bool = False  # set when the objective returned a non-finite value


class Population:
    def __init__(self, members):
        self.members = list(members)
        if not self.members:
            raise ValueError("population cannot be empty")
        self.generation = 0
        self.fitevals = 0
        self.best_genes = None
        self.best_fitness = math.inf

    @property
    def size(self) -> int:
        return len(self.members)

    def eval_genes(self, objective, genes: np.ndarray) -> float:
        """Route every objective call through here so fitevals stays an
        exact audit of invocations. Non-finite values become +inf."""
        raw = float(objective(genes))
        self.fitevals += 1
        if not math.isfinite(raw):
            raw = math.inf
        if raw < self.best_fitness:
            self.best_fitness = raw
            self.best_genes = np.array(genes, copy=True)
        return raw

    def fitness_array(self) -> np.ndarray:
        return np.array([m.fitness for m in self.members])


def evaluate(pop: Population, objective) -> Population:
    """Evaluate every unevaluated member; refresh the elitist record."""
    for m in pop.members:
        if m.fitness is None:
            raw = float(objective(m.genes))
            pop.fitevals += 1
            if math.isfinite(raw):
                m.fitness = raw
            else:
                m.fitness = math.inf
                m.flagged = True
            if m.fitness < pop.best_fitness:
                pop.best_fitness = m.fitness
                pop.best_genes = m.genes.copy()
    return pop


def intensity(fitness: float, f_min: float) -> float:
    """Fragrance intensity under minimization: better candidates get
    larger values, the population best gets 1."""
    if not math.isfinite(f_min) or not math.isfinite(fitness):
        return 0.0
    return 1.0 / (1.0 + fitness - f_min)


def sample_population(rng, n: int, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    return rng.uniform(lower, upper, size=(n, len(lower)))


class Algorithm:
    """One metaheuristic behind a uniform interface. Instances hold
    per-run state; ``prepare`` is called once before the first step."""

    name = "base"

    def prepare(self, pop: Population, max_gens: int) -> None:
        pass

    def step(self, pop: Population, objective, lower, upper, rng) -> None:
        raise NotImplementedError


@dataclass
class GenStats:
    generation: int
    best_fitness: float
    fitevals: int
    elapsed_ms: float


@dataclass
class RunResult:
    best_genes: np.ndarray
    best_fitness: float
    history: list = field(default_factory=list)

    @property
    def fitevals(self) -> int:
        return self.history[-1].fitevals if self.history else 0


def history_csv_rows(result: "RunResult"):
    """Generation history as (generation, best_fitness, fitevals,
    elapsed_ms) rows."""
    return [(h.generation, h.best_fitness, h.fitevals, h.elapsed_ms)
            for h in result.history]


def run(algorithm: Algorithm, objective, lower, upper, *, pop_size: int = 20,
        max_gens: int = 30, early_stop: int = 10, seed=None, rng=None,
        initial: np.ndarray | None = None, stop_signal=None) -> RunResult:
    """Iterate generations until max_gens, ``early_stop`` consecutive
    generations without best-ever improvement, or an external stop signal.

    The initial population (generation 0) counts as the first history
    entry; a constant objective therefore stops after 1 + early_stop
    entries. Same seed and initial population give identical histories.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if rng is None:
        rng = np.random.default_rng(seed)
    if initial is None:
        initial = sample_population(rng, pop_size, lower, upper)
    members = [Candidate(np.array(g, dtype=float)) for g in initial]
    pop = Population(members)

    t0 = time.perf_counter()
    evaluate(pop, objective)
    history = [GenStats(0, pop.best_fitness, pop.fitevals,
                        (time.perf_counter() - t0) * 1e3)]
    algorithm.prepare(pop, max_gens)

    streak = 0
    for gen in range(1, max_gens + 1):
        prev_best = pop.best_fitness
        t0 = time.perf_counter()
        algorithm.step(pop, objective, lower, upper, rng)
        pop.generation = gen
        history.append(GenStats(gen, pop.best_fitness, pop.fitevals,
                                (time.perf_counter() - t0) * 1e3))
        streak = 0 if pop.best_fitness < prev_best else streak + 1
        if early_stop and streak >= early_stop:
            break
        if stop_signal is not None and stop_signal():
            break
    return RunResult(best_genes=pop.best_genes.copy(),
                     best_fitness=pop.best_fitness, history=history)
