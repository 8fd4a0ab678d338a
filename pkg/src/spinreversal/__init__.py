"""Spin-reversal (gauge) transforms for Ising problems on an emulated noisy annealer.

The pipeline: graph problem -> QUBO -> Ising -> Chimera clique embedding ->
noisy Metropolis sampler, with random or genetically searched reversal masks.
"""

from .chimera import ChimeraTopology, Embedding, PhysicalIsing, chimera, embed_complete, embed_model, unembed
from .errors import CapacityError, EmbeddingError, InvalidArgument
from .genetic import GAConfig, GAHistory, SamplerEvaluator, run_ga
from .graphs import Graph, erdos_renyi, max_clique_qubo, min_vertex_cover_qubo
from .ising import (
    IsingModel,
    QuboModel,
    SpinReversalMask,
    SpinState,
    apply_spin_reversal,
    brute_force_ground_state,
    energy,
    ising_to_qubo,
    qubo_to_ising,
    transform_state,
)
from .sampler import NoiseModel, SampleSet, SamplerConfig, sample, score, solve_native, solve_with_mask

__version__ = "0.1.0"
