"""Chimera topology, complete-graph chain embedding, and chain-level spin reversal.

Qubit ids are cell-major: ``((row * N) + col) * 2t + side * t + k``.  Side 0
qubits couple to the same ``k`` in the cells above and below, side 1 qubits to
the same ``k`` in the cells left and right.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import CapacityError, EmbeddingError, InvalidArgument
from .ising import ISING, IsingModel, SpinReversalMask, SpinState

VERTICAL = 0
HORIZONTAL = 1


@dataclass(frozen=True)
class ChimeraTopology:
    M: int
    N: int
    t: int = 4

    def __post_init__(self):
        if min(self.M, self.N, self.t) < 1:
            raise InvalidArgument(f"Chimera dimensions must be >= 1, got {(self.M, self.N, self.t)}")

    @property
    def num_qubits(self) -> int:
        return self.M * self.N * 2 * self.t

    def qubit(self, row: int, col: int, side: int, k: int) -> int:
        return ((row * self.N) + col) * 2 * self.t + side * self.t + k

    def coordinates(self, q: int) -> tuple[int, int, int, int]:
        cell, rem = divmod(q, 2 * self.t)
        row, col = divmod(cell, self.N)
        side, k = divmod(rem, self.t)
        return row, col, side, k

    @cached_property
    def edges(self) -> frozenset[tuple[int, int]]:
        t = self.t
        out = set()
        for r in range(self.M):
            for c in range(self.N):
                for a in range(t):
                    for b in range(t):
                        out.add((self.qubit(r, c, VERTICAL, a), self.qubit(r, c, HORIZONTAL, b)))
                    if r + 1 < self.M:
                        out.add((self.qubit(r, c, VERTICAL, a), self.qubit(r + 1, c, VERTICAL, a)))
                    if c + 1 < self.N:
                        out.add((self.qubit(r, c, HORIZONTAL, a), self.qubit(r, c + 1, HORIZONTAL, a)))
        return frozenset((min(u, v), max(u, v)) for u, v in out)

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        adj: dict[int, set[int]] = {q: set() for q in range(self.num_qubits)}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return {q: frozenset(s) for q, s in adj.items()}

    def to_dict(self) -> dict:
        return {"M": self.M, "N": self.N, "t": self.t}


def chimera(M: int, N: int | None = None, t: int = 4) -> ChimeraTopology:
    return ChimeraTopology(M, M if N is None else N, t)


def smallest_chimera_for(k: int, t: int = 4) -> ChimeraTopology:
    """Square topology just large enough for a ``K_k`` clique embedding."""
    m = max(1, math.ceil(k / t))
    return ChimeraTopology(m, m, t)


@dataclass(frozen=True)
class Embedding:
    """Logical variable ``i`` is represented by physical qubits ``chains[i]``.

    Physical models built from an embedding index its in-use qubits compactly,
    in ascending qubit-id order (see :attr:`qubits`).
    """

    chains: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "chains", tuple(tuple(int(q) for q in c) for c in self.chains))

    def __len__(self):
        return len(self.chains)

    @cached_property
    def qubits(self) -> tuple[int, ...]:
        return tuple(sorted(q for c in self.chains for q in c))

    @cached_property
    def position(self) -> dict[int, int]:
        """Physical qubit id -> compact index."""
        return {q: i for i, q in enumerate(self.qubits)}

    @cached_property
    def owner(self) -> np.ndarray:
        """Compact physical index -> logical variable."""
        out = np.empty(len(self.qubits), dtype=np.int64)
        for v, chain in enumerate(self.chains):
            for q in chain:
                out[self.position[q]] = v
        return out

    @property
    def max_chain_length(self) -> int:
        return max((len(c) for c in self.chains), default=0)

    def chain_edges(self, topo: ChimeraTopology) -> list[tuple[int, int]]:
        """Topology edges with both endpoints in the same chain (physical ids)."""
        out = []
        for chain in self.chains:
            members = set(chain)
            for q in sorted(chain):
                out.extend((q, r) for r in sorted(topo.adjacency[q]) if r > q and r in members)
        return out

    def bridging_edges(self, topo: ChimeraTopology, i: int, j: int) -> list[tuple[int, int]]:
        cj = set(self.chains[j])
        out = []
        for q in self.chains[i]:
            out.extend((min(q, r), max(q, r)) for r in topo.adjacency[q] if r in cj)
        return sorted(out)

    def validate(self, topo: ChimeraTopology, logical: IsingModel | None = None):
        """Raise :class:`EmbeddingError` unless chains are disjoint, connected, and bridge every coupler."""
        seen: set[int] = set()
        for v, chain in enumerate(self.chains):
            if not chain:
                raise EmbeddingError(f"chain {v} is empty")
            for q in chain:
                if not 0 <= q < topo.num_qubits:
                    raise EmbeddingError(f"qubit {q} not in topology")
                if q in seen:
                    raise EmbeddingError(f"qubit {q} used by more than one chain")
                seen.add(q)
            members = set(chain)
            stack, reached = [chain[0]], {chain[0]}
            while stack:
                q = stack.pop()
                for r in topo.adjacency[q]:
                    if r in members and r not in reached:
                        reached.add(r)
                        stack.append(r)
            if reached != members:
                raise EmbeddingError(f"chain {v} is not connected")
        if logical is not None:
            if logical.n != len(self.chains):
                raise EmbeddingError(f"model has {logical.n} variables but embedding has {len(self)} chains")
            for i, j in logical.quadratic:
                if not self.bridging_edges(topo, i, j):
                    raise EmbeddingError(f"no physical edge between chains {i} and {j}")

    def to_json(self) -> str:
        return json.dumps({str(i): list(c) for i, c in enumerate(self.chains)})

    @classmethod
    def from_json(cls, text: str) -> "Embedding":
        data = json.loads(text)
        if "chains" in data:
            data = data["chains"]
        return cls(tuple(tuple(data[str(i)]) for i in range(len(data))))


def embed_complete(k: int, topo: ChimeraTopology) -> Embedding:
    """Native clique embedding of ``K_k`` in the top-left ``m x m`` block, ``m = ceil(k / t)``.

    Variable ``v = c * t + j`` owns the side-0 qubits ``j`` of column ``c`` in rows
    ``0..c`` and the side-1 qubits ``j`` of row ``c`` in columns ``c..m-1``; the two
    segments meet in cell ``(c, c)``.  Every chain has ``m + 1`` qubits.
    """
    t = topo.t
    if k < 0:
        raise InvalidArgument("clique size must be non-negative")
    if k > t * min(topo.M, topo.N):
        raise CapacityError(f"K_{k} does not fit on Chimera {topo.M}x{topo.N}x{t} (max {t * min(topo.M, topo.N)})")
    if k == 1:
        return Embedding(((topo.qubit(0, 0, VERTICAL, 0),),))
    m = math.ceil(k / t)
    chains = []
    for v in range(k):
        c, j = divmod(v, t)
        chain = [topo.qubit(r, c, VERTICAL, j) for r in range(c + 1)]
        chain += [topo.qubit(c, col, HORIZONTAL, j) for col in range(c, m)]
        chains.append(tuple(chain))
    return Embedding(tuple(chains))


def identity_embedding(n: int) -> Embedding:
    return Embedding(tuple((i,) for i in range(n)))


@dataclass(frozen=True)
class PhysicalIsing:
    """An embedded model over the compact in-use qubits of ``embedding``."""

    model: IsingModel
    logical: IsingModel
    embedding: Embedding
    topology: ChimeraTopology | None
    chain_strength: float

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.embedding.qubits


def default_chain_strength(logical: IsingModel) -> float:
    return 2.0 * logical.max_abs() or 1.0


def embed_model(
    logical: IsingModel,
    emb: Embedding,
    chain_strength: float | None = None,
    topo: ChimeraTopology | None = None,
) -> PhysicalIsing:
    """Expand a logical model onto physical qubits.

    Linear weights are split equally over the chain, each logical coupler sits on
    the lowest-id bridging edge, and chain-internal edges get ``-chain_strength``.
    The offset absorbs the chain couplers, so a state with intact chains has the
    energy of its logical image.
    ``topo=None`` means chains must be single qubits (identity-style embedding).
    """
    if logical.n != len(emb):
        raise EmbeddingError(f"model has {logical.n} variables but embedding has {len(emb)} chains")
    cs = default_chain_strength(logical) if chain_strength is None else float(chain_strength)
    pos = emb.position
    linear: dict[int, float] = {}
    for v, chain in enumerate(emb.chains):
        share = logical.linear.get(v, 0.0) / len(chain)
        for q in chain:
            linear[pos[q]] = share
    quadratic: dict[tuple[int, int], float] = {}
    offset = logical.offset
    if topo is None:
        if emb.max_chain_length > 1:
            raise EmbeddingError("a topology is required for chains longer than one qubit")
        for (i, j), w in logical.quadratic.items():
            quadratic[(pos[emb.chains[i][0]], pos[emb.chains[j][0]])] = w
    else:
        for u, v in emb.chain_edges(topo):
            quadratic[(pos[u], pos[v])] = -cs
            offset += cs
        for (i, j), w in logical.quadratic.items():
            bridges = emb.bridging_edges(topo, i, j)
            if not bridges:
                raise EmbeddingError(f"no physical edge between chains {i} and {j}")
            u, v = bridges[0]
            quadratic[(pos[u], pos[v])] = w
    model = IsingModel(len(emb.qubits), linear, quadratic, offset)
    return PhysicalIsing(model, logical, emb, topo, cs)


def unembed(physical_state: SpinState, emb: Embedding, tie_seed: int = 0) -> SpinState:
    """Majority vote per chain; exact ties go to a seeded fair coin."""
    s = np.asarray(physical_state.values)
    if s.size != len(emb.qubits):
        raise InvalidArgument(f"state length {s.size} does not match {len(emb.qubits)} embedded qubits")
    return SpinState(tuple(unembed_array(s[None, :], emb, tie_seed)[0].tolist()), ISING)


def unembed_array(states: np.ndarray, emb: Embedding, tie_seed: int = 0) -> np.ndarray:
    """Vectorized :func:`unembed` over rows of ``states``."""
    states = np.asarray(states)
    votes = np.zeros((states.shape[0], len(emb)), dtype=np.int64)
    np.add.at(votes.T, emb.owner, states.T.astype(np.int64))
    out = np.sign(votes).astype(np.int8)
    ties = out == 0
    if ties.any():
        rng = np.random.default_rng(tie_seed)
        coin = rng.integers(0, 2, size=out.shape, dtype=np.int8) * 2 - 1
        out[ties] = coin[ties]
    return out


def expand_chain_mask(logical_mask, emb: Embedding) -> SpinReversalMask:
    """Physical mask (compact qubit order) flipping whole chains."""
    bits = logical_mask.array if isinstance(logical_mask, SpinReversalMask) else np.asarray(logical_mask, dtype=bool)
    if bits.shape != (len(emb),):
        raise InvalidArgument(f"logical mask length {bits.size} does not match {len(emb)} chains")
    return SpinReversalMask.from_array(bits[emb.owner])


def random_mask(length: int, p_s: float, seed) -> SpinReversalMask:
    """Each bit set independently with probability ``p_s``."""
    if not 0.0 <= p_s <= 1.0:
        raise InvalidArgument(f"reversal probability must be in [0, 1], got {p_s}")
    rng = np.random.default_rng(seed)
    return SpinReversalMask.from_array(rng.random(length) < p_s)
