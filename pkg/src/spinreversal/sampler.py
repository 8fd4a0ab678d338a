"""Emulated annealer with a persistent, gauge-dependent noise model.

The annealer is classical Metropolis simulated annealing.  Before sampling, the
submitted coefficients pass through the chip model in :func:`realize_noise`:
rescaling, DAC quantization, per-chip biases, and coupler leakage.  Because the
chip errors are tied to qubits rather than to the problem, the same problem
submitted under different spin-reversal masks sees different effective
Hamiltonians.  Reported energies are always computed on the submitted,
noise-free model.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import _anneal
from .errors import InvalidArgument
from .ising import IsingModel, SpinReversalMask, apply_spin_reversal, rescale
from .seeding import CHIP_BIAS, CHIP_COUPLER, NATIVE_MASK, NATIVE_READS, derive_seed, derive_seeds

LOGICAL = "logical"
PHYSICAL = "physical"
ORIGINAL = "original"
GAUGED = "gauged"


@dataclass(frozen=True)
class NoiseModel:
    chip_seed: int = 0
    bias_sigma: float = 0.02
    coupler_sigma: float = 0.01
    dac_bits: int = 8
    leakage: float = 0.05
    read_sigma: float = 0.005

    def __post_init__(self):
        if min(self.bias_sigma, self.coupler_sigma, self.read_sigma) < 0:
            raise InvalidArgument("noise sigmas must be non-negative")
        if self.dac_bits < 1:
            raise InvalidArgument("dac_bits must be >= 1")

    @classmethod
    def noiseless(cls, chip_seed: int = 0) -> "NoiseModel":
        return cls(chip_seed, 0.0, 0.0, 53, 0.0, 0.0)

    @property
    def is_noiseless(self) -> bool:
        return self.bias_sigma == self.coupler_sigma == self.leakage == self.read_sigma == 0.0

    @classmethod
    def from_file(cls, path) -> "NoiseModel":
        return cls(**json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class SamplerConfig:
    num_reads: int = 200
    num_sweeps: int = 1000
    beta_min: float = 0.1
    beta_max: float = 10.0
    seed: int = 0
    parallel: bool = False

    def __post_init__(self):
        if self.num_reads < 1:
            raise InvalidArgument("num_reads must be >= 1")
        if self.num_sweeps < 1:
            raise InvalidArgument("num_sweeps must be >= 1")
        if not 0 < self.beta_min < self.beta_max:
            raise InvalidArgument("need 0 < beta_min < beta_max")

    def betas(self) -> np.ndarray:
        if self.num_sweeps == 1:
            return np.array([self.beta_max])
        return np.geomspace(self.beta_min, self.beta_max, self.num_sweeps)


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Distinct states with their energy and number of occurrences.

    Rows are sorted by energy, then by state, so equal inputs serialize identically.
    """

    states: np.ndarray
    energies: np.ndarray
    occurrences: np.ndarray
    frame: tuple[str, str] = (LOGICAL, ORIGINAL)
    metadata: dict = field(default_factory=dict)

    @classmethod
    def from_reads(cls, states, energies, frame=(LOGICAL, ORIGINAL), metadata=None, occurrences=None) -> "SampleSet":
        states = np.asarray(states, dtype=np.int8)
        energies = np.asarray(energies, dtype=float)
        occ = np.ones(len(states), dtype=np.int64) if occurrences is None else np.asarray(occurrences, dtype=np.int64)
        if len(states) == 0:
            return cls(states.reshape(0, states.shape[-1] if states.ndim == 2 else 0), energies, occ, frame, dict(metadata or {}))
        uniq, first, inverse = np.unique(states, axis=0, return_index=True, return_inverse=True)
        counts = np.bincount(inverse.ravel(), weights=occ, minlength=len(uniq)).astype(np.int64)
        e = energies[first]
        order = np.lexsort(tuple(uniq.T[::-1]) + (e,))
        return cls(uniq[order], e[order], counts[order], tuple(frame), dict(metadata or {}))

    @property
    def total_reads(self) -> int:
        return int(self.occurrences.sum())

    @property
    def min_energy(self) -> float:
        return float(self.energies.min())

    def __len__(self):
        return len(self.energies)

    def records(self):
        for s, e, c in zip(self.states, self.energies, self.occurrences):
            yield s, float(e), int(c)

    def expanded_energies(self) -> np.ndarray:
        return np.repeat(self.energies, self.occurrences)

    def __eq__(self, other):
        if not isinstance(other, SampleSet):
            return NotImplemented
        return (
            self.frame == other.frame
            and np.array_equal(self.states, other.states)
            and np.array_equal(self.energies, other.energies)
            and np.array_equal(self.occurrences, other.occurrences)
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        header = {"frame": list(self.frame), "total_reads": self.total_reads, **self.metadata}
        buf.write("# " + json.dumps(header, sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["state", "energy", "occurrences"])
        for s, e, c in self.records():
            w.writerow(["".join("1" if v > 0 else "0" for v in s), repr(e), c])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SampleSet":
        lines = text.splitlines()
        header = json.loads(lines[0][2:]) if lines and lines[0].startswith("# ") else {}
        rows = list(csv.DictReader(lines[1:] if header else lines))
        states = np.array([[1 if ch == "1" else -1 for ch in r["state"]] for r in rows], dtype=np.int8)
        energies = np.array([float(r["energy"]) for r in rows])
        occ = np.array([int(r["occurrences"]) for r in rows], dtype=np.int64)
        frame = tuple(header.pop("frame", (LOGICAL, ORIGINAL)))
        header.pop("total_reads", None)
        return cls(states, energies, occ, frame, header)


def merge(sets, frame=None, metadata=None) -> SampleSet:
    sets = list(sets)
    states = np.concatenate([s.states for s in sets])
    energies = np.concatenate([s.energies for s in sets])
    occ = np.concatenate([s.occurrences for s in sets])
    return SampleSet.from_reads(states, energies, frame or sets[0].frame, metadata, occ)


@lru_cache(maxsize=256)
def _chip_offsets(chip_seed: int, tag: int, keys: tuple) -> np.ndarray:
    out = np.empty(len(keys))
    for idx, key in enumerate(keys):
        key = key if isinstance(key, tuple) else (key,)
        out[idx] = np.random.default_rng([chip_seed, tag, *key]).standard_normal()
    out.setflags(write=False)
    return out


def quantize(values: np.ndarray, value_range: float, bits: int) -> np.ndarray:
    """Round onto a uniform grid of step ``2 * value_range / 2**bits`` clipped to the range."""
    step = 2.0 * value_range / 2.0**bits
    return np.clip(np.round(values / step) * step, -value_range, value_range)


def _realize_arrays(model: IsingModel, noise: NoiseModel, qubit_ids=None):
    scaled, _ = rescale(model)
    h = quantize(scaled.h, 2.0, noise.dac_bits)
    J = quantize(scaled.J, 1.0, noise.dac_bits)
    edges = scaled.edges
    ids = tuple(range(model.n)) if qubit_ids is None else tuple(int(q) for q in qubit_ids)
    if len(ids) != model.n:
        raise InvalidArgument("qubit_ids must name every model variable")
    if noise.bias_sigma > 0:
        h = h + noise.bias_sigma * _chip_offsets(noise.chip_seed, CHIP_BIAS, ids)
    if noise.coupler_sigma > 0 and len(edges):
        pairs = tuple((min(ids[u], ids[v]), max(ids[u], ids[v])) for u, v in edges.tolist())
        J = J + noise.coupler_sigma * _chip_offsets(noise.chip_seed, CHIP_COUPLER, pairs)
    if noise.leakage != 0 and len(edges):
        leak = np.zeros(model.n)
        np.add.at(leak, edges[:, 0], J)
        np.add.at(leak, edges[:, 1], J)
        h = h + noise.leakage * leak
    return h, edges, J, scaled.offset


def realize_noise(model: IsingModel, noise: NoiseModel, qubit_ids=None) -> IsingModel:
    """The Hamiltonian the emulated chip actually anneals.

    ``qubit_ids`` names the physical qubit behind each variable; persistent errors
    follow the qubit, not the variable index.  Defaults to ``0..n-1``.
    """
    h, edges, J, offset = _realize_arrays(model, noise, qubit_ids)
    return IsingModel(model.n, dict(enumerate(h.tolist())), dict(zip(map(tuple, edges.tolist()), J.tolist())), offset)


def sample(
    model: IsingModel,
    noise: NoiseModel,
    cfg: SamplerConfig,
    qubit_ids=None,
    frame: tuple[str, str] = (LOGICAL, ORIGINAL),
) -> SampleSet:
    """``cfg.num_reads`` independent anneals of the noisy realization of ``model``."""
    if model.n == 0:
        raise InvalidArgument("cannot sample an empty model")
    h, edges, J, _ = _realize_arrays(model, noise, qubit_ids)
    indptr, nbrs, eidx = _anneal.adjacency(model.n, edges)
    seeds = derive_seeds(cfg.seed, cfg.num_reads, 1).astype(np.int64)
    out = np.empty((cfg.num_reads, model.n), dtype=np.int8)
    kernel = _anneal.anneal_parallel if cfg.parallel else _anneal.anneal_serial
    kernel(
        np.ascontiguousarray(h, dtype=np.float64),
        np.ascontiguousarray(J, dtype=np.float64),
        indptr, nbrs, eidx, cfg.betas(), seeds, float(noise.read_sigma), out,
    )
    energies = model.energies(out)
    meta = {"seed": cfg.seed, "num_sweeps": cfg.num_sweeps, "chip_seed": noise.chip_seed}
    return SampleSet.from_reads(out, energies, frame, meta)


def _mask_signs(mask, n: int) -> np.ndarray:
    m = mask.array if isinstance(mask, SpinReversalMask) else np.asarray(mask, dtype=bool)
    if m.shape != (n,):
        raise InvalidArgument(f"mask length {m.size} does not match n={n}")
    return np.where(m, -1, 1).astype(np.int8)


def solve_with_mask(model: IsingModel, mask, noise: NoiseModel, cfg: SamplerConfig, qubit_ids=None, space=LOGICAL) -> SampleSet:
    """Sample the gauge-transformed model and map states back to the original frame.

    Energies need no correction: the gauged model at the gauged state equals the
    original model at the original state.
    """
    signs = _mask_signs(mask, model.n)
    gauged = apply_spin_reversal(model, signs < 0)
    ss = sample(gauged, noise, cfg, qubit_ids, (space, GAUGED))
    meta = dict(ss.metadata, popcount=int((signs < 0).sum()))
    return SampleSet.from_reads(ss.states * signs, ss.energies, (space, ORIGINAL), meta, ss.occurrences)


def solve_native(
    model: IsingModel,
    num_reads: int,
    num_transforms: int,
    noise: NoiseModel,
    cfg: SamplerConfig,
    qubit_ids=None,
    space=LOGICAL,
) -> SampleSet:
    """Split ``num_reads`` over ``num_transforms`` random gauges drawn with probability 0.5 per spin.

    Reads per gauge are ``num_reads // num_transforms``; the remainder is dropped
    and reported as ``dropped_reads`` in the metadata.
    """
    if num_transforms < 1:
        raise InvalidArgument("need at least one spin-reversal transform")
    if num_transforms > num_reads:
        raise InvalidArgument(f"num_transforms={num_transforms} exceeds num_reads={num_reads}")
    per = num_reads // num_transforms
    parts = []
    for k in range(num_transforms):
        mask = np.random.default_rng(derive_seed(cfg.seed, NATIVE_MASK, k)).random(model.n) < 0.5
        sub = replace(cfg, num_reads=per, seed=derive_seed(cfg.seed, NATIVE_READS, k))
        parts.append(solve_with_mask(model, mask, noise, sub, qubit_ids, space))
    meta = {
        "seed": cfg.seed,
        "num_transforms": num_transforms,
        "reads_per_transform": per,
        "dropped_reads": num_reads - per * num_transforms,
        "chip_seed": noise.chip_seed,
    }
    return merge(parts, (space, ORIGINAL), meta)


def score(samples: SampleSet, fraction: float = 0.01) -> float:
    """Mean of the lowest ``ceil(fraction * reads)`` energies, counting multiplicity."""
    if len(samples) == 0 or samples.total_reads == 0:
        raise InvalidArgument("cannot score an empty sample set")
    if not 0.0 < fraction <= 1.0:
        raise InvalidArgument(f"fraction must be in (0, 1], got {fraction}")
    k = max(1, math.ceil(fraction * samples.total_reads - 1e-9))
    e = np.sort(samples.expanded_energies(), kind="stable")
    return float(e[:k].mean())


def noise_to_dict(noise: NoiseModel) -> dict:
    return asdict(noise)
