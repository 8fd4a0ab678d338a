"""Genetic search for the spin-reversal mask that samples lowest.

Individuals are boolean masks.  Fitness is the minimum energy over ``N_a``
anneals of the masked problem; lower is better.  Each generation keeps the
``ceil(p_mat * N)`` fittest as parents, breeds ``N`` children by uniform
crossover and bit-flip mutation, then puts the generation's best mask back
into one random child slot so the best mask found is never lost.

All randomness is keyed on ``(seed, generation, index)``; a run can be resumed
from a checkpoint and reproduces the uninterrupted run exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np

from .chimera import Embedding, PhysicalIsing, expand_chain_mask
from .errors import InvalidArgument
from .ising import IsingModel, SpinReversalMask
from .sampler import LOGICAL, PHYSICAL, NoiseModel, SampleSet, SamplerConfig, score, solve_with_mask
from .seeding import GA_EVAL, GA_INIT, GA_VARIATION, derive_seed

QUBIT = "qubit"
CHAIN = "chain"

STANDARD_PARAMETERS = dict(population=80, p_spin=0.1, p_mat=0.1, p_mut=0.01)
BASE_PARAMETERS = dict(population=20, p_spin=0.1, p_mat=0.1, p_mut=0.01)


@dataclass(frozen=True)
class GAConfig:
    population: int = 80
    p_spin: float = 0.1
    p_mat: float = 0.1
    p_mut: float = 0.01
    generations: int = 100
    num_anneals: int = 200
    level: str = QUBIT
    seed: int = 0
    score_fraction: float = 0.01
    tie_break: str = "mean"

    def __post_init__(self):
        if self.population < 2:
            raise InvalidArgument("population must be >= 2")
        for name in ("p_spin", "p_mat"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise InvalidArgument(f"{name} must be in (0, 1], got {v}")
        if not 0.0 <= self.p_mut <= 1.0:
            raise InvalidArgument(f"p_mut must be in [0, 1], got {self.p_mut}")
        if self.generations < 1:
            raise InvalidArgument("generations must be >= 1")
        if self.num_anneals < 1:
            raise InvalidArgument("num_anneals must be >= 1")
        if self.level not in (QUBIT, CHAIN):
            raise InvalidArgument(f"level must be {QUBIT!r} or {CHAIN!r}")
        if self.tie_break not in ("mean", "index"):
            raise InvalidArgument("tie_break must be 'mean' or 'index'")

    @property
    def parents(self) -> int:
        return min(self.population, max(2, math.ceil(self.p_mat * self.population - 1e-9)))


@dataclass(frozen=True)
class SamplerEvaluator:
    """Binds a problem to one chip and sampler so fitness values are comparable.

    ``model`` is the Hamiltonian actually submitted.  With an ``embedding`` it is
    the physical model in compact qubit order and chain-level masks (one bit per
    logical variable) are expanded before sampling.
    """

    model: IsingModel
    noise: NoiseModel
    sampler: SamplerConfig
    qubit_ids: tuple[int, ...] | None = None
    embedding: Embedding | None = None

    @classmethod
    def for_physical(cls, phys: PhysicalIsing, noise: NoiseModel, sampler: SamplerConfig) -> "SamplerEvaluator":
        return cls(phys.model, noise, sampler, phys.qubits, phys.embedding)

    def mask_length(self, level: str) -> int:
        if level == CHAIN:
            if self.embedding is None:
                raise InvalidArgument("chain-level search needs an embedding")
            return len(self.embedding)
        return self.model.n

    def physical_mask(self, mask: np.ndarray, level: str) -> np.ndarray:
        if level == CHAIN:
            return expand_chain_mask(mask, self.embedding).array
        return np.asarray(mask, dtype=bool)

    def __call__(self, mask: np.ndarray, level: str, num_anneals: int, seed: int) -> SampleSet:
        cfg = replace(self.sampler, num_reads=num_anneals, seed=seed)
        space = PHYSICAL if self.embedding is not None else LOGICAL
        return solve_with_mask(self.model, self.physical_mask(mask, level), self.noise, cfg, self.qubit_ids, space)


@dataclass
class Individual:
    mask: np.ndarray
    fitness: float = math.nan
    score: float = math.nan
    seed: int | None = None
    mean_energy: float = math.nan

    @property
    def popcount(self) -> int:
        return int(self.mask.sum())


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best_fitness: float
    mean_fitness: float
    worst_fitness: float
    best_score: float
    best_popcount: int
    best_mask: str
    best_so_far_fitness: float
    best_so_far_score: float
    best_so_far_popcount: int
    best_so_far_mask: str


@dataclass
class GAHistory:
    records: list[GenerationRecord] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def best_so_far(self) -> np.ndarray:
        return np.array([r.best_so_far_fitness for r in self.records])

    def popcounts(self) -> list[int]:
        """Reversal count of each generation's best mask."""
        return [r.best_popcount for r in self.records]

    CSV_FIELDS = (
        "generation", "best_e", "mean_e", "worst_e", "best_popcount",
        "best_score", "best_so_far_e", "best_so_far_score", "best_so_far_popcount",
    )

    def to_csv(self, seeds: dict | None = None) -> str:
        seeds = seeds or {}
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(self.CSV_FIELDS) + list(seeds))
        for r in self.records:
            w.writerow([
                r.generation, repr(r.best_fitness), repr(r.mean_fitness), repr(r.worst_fitness), r.best_popcount,
                repr(r.best_score), repr(r.best_so_far_fitness), repr(r.best_so_far_score), r.best_so_far_popcount,
                *seeds.values(),
            ])
        return buf.getvalue()


@dataclass
class GAResult:
    best_mask: SpinReversalMask
    best_fitness: float
    best_score: float
    population: list[Individual]
    history: GAHistory


class GAAborted(RuntimeError):
    """Evaluation failed mid-run; ``history`` holds the completed generations."""

    def __init__(self, message: str, history: GAHistory):
        super().__init__(message)
        self.history = history


def _rng(rng) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def crossover(parent_a, parent_b, rng) -> np.ndarray:
    """Uniform crossover: each bit comes from either parent with probability 0.5."""
    a = np.asarray(parent_a, dtype=bool)
    b = np.asarray(parent_b, dtype=bool)
    if a.shape != b.shape:
        raise InvalidArgument("parents must have equal length")
    return np.where(_rng(rng).random(a.shape) < 0.5, a, b)


def mutate(mask, p_mut: float, rng) -> np.ndarray:
    """Flip each bit independently with probability ``p_mut``."""
    m = np.asarray(mask, dtype=bool)
    return m ^ (_rng(rng).random(m.shape) < p_mut)


def initial_population(cfg: GAConfig, length: int) -> np.ndarray:
    rng = np.random.default_rng(derive_seed(cfg.seed, GA_INIT))
    return rng.random((cfg.population, length)) < cfg.p_spin


def evaluate_population(
    masks: np.ndarray,
    evaluator: Callable[..., SampleSet],
    cfg: GAConfig,
    generation: int,
) -> list[Individual]:
    """Fitness of every mask; individual ``i`` is sampled with seed ``(seed, generation, i)``."""
    out = []
    for i, mask in enumerate(masks):
        seed = derive_seed(cfg.seed, GA_EVAL, generation, i)
        ss = evaluator(mask, cfg.level, cfg.num_anneals, seed)
        mean = float(ss.energies @ ss.occurrences / ss.total_reads)
        out.append(Individual(mask.copy(), ss.min_energy, score(ss, cfg.score_fraction), seed, mean))
    return out


def rank(pop: list[Individual], tie_break: str = "mean") -> np.ndarray:
    """Population indices from best to worst.

    Fitness decides; equal fitness falls back to the mean sampled energy
    (``tie_break="mean"``) and then to the lower index.
    """
    fitness = np.array([ind.fitness for ind in pop])
    index = np.arange(len(pop))
    if tie_break == "index":
        return np.lexsort((index, fitness))
    return np.lexsort((index, np.array([ind.mean_energy for ind in pop]), fitness))


def next_generation(pop: list[Individual], cfg: GAConfig, generation: int) -> np.ndarray:
    order = rank(pop, cfg.tie_break)
    parents = [pop[i].mask for i in order[: cfg.parents]]
    elite = pop[int(order[0])].mask
    rng = np.random.default_rng(derive_seed(cfg.seed, GA_VARIATION, generation))
    children = np.empty((cfg.population, elite.size), dtype=bool)
    for c in range(cfg.population):
        a, b = rng.integers(0, len(parents), size=2)
        children[c] = mutate(crossover(parents[a], parents[b], rng), cfg.p_mut, rng)
    children[rng.integers(0, cfg.population)] = elite
    return children


def _mask_str(m: np.ndarray) -> str:
    return "".join("1" if b else "0" for b in m)


def _mask_from_str(s: str) -> np.ndarray:
    return np.array([c == "1" for c in s], dtype=bool)


def _record(generation: int, pop: list[Individual], prev: GenerationRecord | None, tie_break: str) -> GenerationRecord:
    fitness = np.array([ind.fitness for ind in pop])
    best = pop[int(rank(pop, tie_break)[0])]
    if prev is None or best.fitness < prev.best_so_far_fitness:
        bsf = (best.fitness, best.score, best.popcount, _mask_str(best.mask))
    else:
        bsf = (prev.best_so_far_fitness, prev.best_so_far_score, prev.best_so_far_popcount, prev.best_so_far_mask)
    return GenerationRecord(
        generation, best.fitness, float(fitness.mean()), float(fitness.max()), best.score,
        best.popcount, _mask_str(best.mask), *bsf,
    )


def save_checkpoint(path, cfg: GAConfig, generation: int, population: np.ndarray, history: GAHistory):
    doc = {
        "config": asdict(cfg),
        "generation": generation,
        "population": [_mask_str(m) for m in population],
        "history": [asdict(r) for r in history.records],
    }
    tmp = Path(str(path) + ".tmp")
    tmp.write_text(json.dumps(doc))
    tmp.replace(path)


def load_checkpoint(path):
    doc = json.loads(Path(path).read_text())
    cfg = GAConfig(**doc["config"])
    population = np.array([_mask_from_str(s) for s in doc["population"]], dtype=bool)
    history = GAHistory([GenerationRecord(**r) for r in doc["history"]])
    return cfg, doc["generation"], population, history


def run_ga(evaluator, cfg: GAConfig, *, checkpoint=None, resume=None, on_generation=None) -> GAResult:
    """Run ``cfg.generations`` generations, then re-evaluate the last population.

    The returned mask is the best of that final evaluation.  ``checkpoint`` names a
    file rewritten after every generation; ``resume`` continues from such a file.
    """
    length = evaluator.mask_length(cfg.level)
    if resume is not None:
        saved_cfg, start, masks, history = load_checkpoint(resume)
        if saved_cfg != cfg:
            raise InvalidArgument("checkpoint was written with a different configuration")
    else:
        start, masks, history = 0, initial_population(cfg, length), GAHistory()
    for r in range(start, cfg.generations):
        try:
            pop = evaluate_population(masks, evaluator, cfg, r)
        except Exception as exc:
            raise GAAborted(f"evaluation failed in generation {r}: {exc}", history) from exc
        history.records.append(_record(r, pop, history.records[-1] if history.records else None, cfg.tie_break))
        if on_generation is not None:
            on_generation(history.records[-1])
        masks = next_generation(pop, cfg, r)
        if checkpoint is not None:
            save_checkpoint(checkpoint, cfg, r + 1, masks, history)
    try:
        final = evaluate_population(masks, evaluator, cfg, cfg.generations)
    except Exception as exc:
        raise GAAborted(f"final evaluation failed: {exc}", history) from exc
    best = final[int(rank(final, cfg.tie_break)[0])]
    return GAResult(SpinReversalMask.from_array(best.mask), best.fitness, best.score, final, history)
