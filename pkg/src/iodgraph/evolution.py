"""A small generational loop that uses IOD graph crossover as its only variation operator.

There is no mutation: each offspring is a crossover child of two
tournament-selected parents, or a clone of the first parent when the pair has
no compatible partitions. Every offspring draws its randomness from a seed
derived from ``(seed, generation, slot)``, so runs are reproducible even when
offspring are produced on several threads.
"""

from __future__ import annotations

import json
import random
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analysis import InformativenessLevel, informativeness, output_reach
from .crossover import QUALIFIED, MatchingSpec, PartitionStrategy, crossover
from .errors import IODGraphError
from .graph import Edge, IODGraph


@dataclass(frozen=True)
class EvolutionConfig:
    population_size: int = 8
    generations: int = 10
    fitness: str = "informativeness"  # or "target"
    target_pairs: tuple[Edge, ...] = ()
    tournament_size: int = 2
    strategy: PartitionStrategy = field(default_factory=PartitionStrategy)
    matching: MatchingSpec = field(default_factory=MatchingSpec)
    identity: str = QUALIFIED
    seed: int = 0
    threads: int = 1

    def validate(self) -> EvolutionConfig:
        if self.population_size < 2:
            raise ValueError("population size must be at least 2")
        if self.generations < 0:
            raise ValueError("generations must be non-negative")
        if self.tournament_size < 1:
            raise ValueError("tournament size must be at least 1")
        if self.fitness not in ("informativeness", "target"):
            raise ValueError(f"unknown fitness {self.fitness!r}")
        if self.fitness == "target" and not self.target_pairs:
            raise ValueError("target fitness needs at least one (input, output) pair")
        return self

    @classmethod
    def from_json(cls, data: dict) -> EvolutionConfig:
        fitness = data.get("fitness", "informativeness")
        pairs: tuple = ()
        if isinstance(fitness, dict):
            pairs = tuple(tuple(p) for p in fitness.get("target_pairs", []))
            fitness = "target"
        return cls(
            population_size=int(data.get("population_size", 8)),
            generations=int(data.get("generations", 10)),
            fitness=fitness,
            target_pairs=pairs,
            tournament_size=int(data.get("tournament_size", 2)),
            strategy=PartitionStrategy.from_json(data.get("strategy", {})),
            matching=MatchingSpec.from_json(data.get("matching", {})),
            identity=data.get("identity", QUALIFIED),
            seed=int(data.get("seed", 0)),
            threads=int(data.get("threads", 1)),
        )


@dataclass(frozen=True)
class GenerationSummary:
    generation: int
    distribution: dict[str, int]
    best_fitness: float
    mean_fitness: float
    crossovers: int
    clones: int

    def to_json(self) -> str:
        return json.dumps({
            "generation": self.generation,
            "distribution": self.distribution,
            "best_fitness": self.best_fitness,
            "mean_fitness": round(self.mean_fitness, 12),
            "crossovers": self.crossovers,
            "clones": self.clones,
        }, sort_keys=True)


@dataclass(frozen=True)
class EvolutionResult:
    history: list[GenerationSummary]
    population: list[IODGraph]


def fitness_of(graph: IODGraph, config: EvolutionConfig) -> float:
    if config.fitness == "informativeness":
        return float(informativeness(graph))
    reach = output_reach(graph)
    hits = sum(1 for i, o in config.target_pairs if o in reach.get(i, ()))
    return hits / len(config.target_pairs)


def _summary(generation: int, population: Sequence[IODGraph], scores: Sequence[float],
             crossovers: int, clones: int) -> GenerationSummary:
    dist = {level.label: 0 for level in InformativenessLevel}
    for g in population:
        dist[informativeness(g).label] += 1
    return GenerationSummary(generation, dist, max(scores), sum(scores) / len(scores), crossovers, clones)


def _derived_seed(*parts: int) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


def _tournament(rng: random.Random, scores: Sequence[float], size: int, exclude: int | None = None) -> int:
    pool = [k for k in range(len(scores)) if k != exclude]
    entrants = [rng.choice(pool) for _ in range(size)]
    return max(entrants, key=lambda k: (scores[k], -k))


def _offspring(population, scores, config: EvolutionConfig, generation: int, slot: int) -> tuple[IODGraph, bool]:
    seed = _derived_seed(config.seed, generation, slot)
    rng = random.Random(seed)
    first = _tournament(rng, scores, config.tournament_size)
    second = _tournament(rng, scores, config.tournament_size, exclude=first)
    try:
        record = crossover(population[first], population[second], config.strategy, config.matching,
                           seed=seed, identity=config.identity,
                           input_parent=f"g{generation - 1}:{first}", output_parent=f"g{generation - 1}:{second}")
    except IODGraphError:
        return population[first], False
    return record.child, True


def evolve(initial: Sequence[IODGraph], config: EvolutionConfig) -> EvolutionResult:
    """Run ``config.generations`` generations; history entry 0 describes ``initial``."""
    config.validate()
    population = [g.require_valid() for g in initial]
    if len(population) < 2:
        raise ValueError("the initial population needs at least two graphs")
    scores = [fitness_of(g, config) for g in population]
    history = [_summary(0, population, scores, 0, 0)]
    for generation in range(1, config.generations + 1):
        def make(slot, population=population, scores=scores, generation=generation):
            return _offspring(population, scores, config, generation, slot)

        with ThreadPoolExecutor(max_workers=max(1, config.threads)) as pool:
            results = list(pool.map(make, range(config.population_size)))
        population = [child for child, _ in results]
        made = sum(1 for _, crossed in results if crossed)
        scores = [fitness_of(g, config) for g in population]
        history.append(_summary(generation, population, scores, made, len(results) - made))
    return EvolutionResult(history, population)
