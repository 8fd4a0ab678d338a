"""Erdős–Rényi test graphs and QUBO reductions for Maximum Clique and Minimum Vertex Cover."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidArgument
from .ising import BINARY, ISING, QuboModel, SpinState

GENERATOR = f"numpy.random.PCG64 (numpy {np.__version__})"

MAX_CLIQUE = "max-clique"
MIN_VERTEX_COVER = "min-vertex-cover"
PROBLEM_KINDS = (MAX_CLIQUE, MIN_VERTEX_COVER)

MAX_EXHAUSTIVE_VERTICES = 20


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    edges: frozenset[tuple[int, int]]
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        canon = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise InvalidArgument(f"self-loop at vertex {u}")
            if u > v:
                u, v = v, u
            if u < 0 or v >= self.vertex_count:
                raise InvalidArgument(f"edge ({u}, {v}) out of range")
            canon.add((u, v))
        object.__setattr__(self, "edges", frozenset(canon))

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def non_edges(self) -> list[tuple[int, int]]:
        n = self.vertex_count
        return [(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in self.edges]

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def with_edge(self, u: int, v: int) -> "Graph":
        return Graph(self.vertex_count, self.edges | {(min(u, v), max(u, v))})

    def to_edgelist(self) -> str:
        lines = [str(self.vertex_count)] + [f"{u} {v}" for u, v in sorted(self.edges)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edgelist(cls, text: str, metadata: dict | None = None) -> "Graph":
        rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not rows:
            raise InvalidArgument("empty edge list")
        n = int(rows[0][0])
        return cls(n, frozenset((int(u), int(v)) for u, v in rows[1:]), metadata or {})

    def save(self, path: Path):
        path = Path(path)
        path.write_text(self.to_edgelist())
        path.with_suffix(".json").write_text(json.dumps(self.metadata, indent=1, sort_keys=True))

    @classmethod
    def load(cls, path: Path) -> "Graph":
        path = Path(path)
        meta_path = path.with_suffix(".json")
        meta = json.loads(meta_path.read_text()) if meta_path.exists() and meta_path != path else {}
        return cls.from_edgelist(path.read_text(), meta)


def erdos_renyi(vertex_count: int, edge_probability: float, seed: int) -> Graph:
    """G(n, p): each of the C(n, 2) pairs is an edge independently with probability p."""
    if not 0.0 <= edge_probability <= 1.0:
        raise InvalidArgument(f"edge probability must be in [0, 1], got {edge_probability}")
    if vertex_count < 0:
        raise InvalidArgument("vertex count must be non-negative")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(vertex_count, k=1)
    keep = rng.random(iu.size) < edge_probability
    edges = frozenset(zip(iu[keep].tolist(), ju[keep].tolist()))
    meta = {"generator": GENERATOR, "seed": int(seed), "p_G": float(edge_probability), "n": vertex_count}
    return Graph(vertex_count, edges, meta)


@dataclass(frozen=True)
class ProblemReduction:
    kind: str
    qubo: QuboModel
    A: float
    B: float
    graph: Graph

    def metadata(self) -> dict:
        return {"kind": self.kind, "A": self.A, "B": self.B, **{f"graph_{k}": v for k, v in self.graph.metadata.items()}}


def max_clique_qubo(g: Graph, A: float = 1.0, B: float = 2.0) -> ProblemReduction:
    """``H(x) = -A * sum_v x_v + B * sum_{non-edges} x_u x_v``; needs ``B > A > 0``."""
    if not B > A > 0:
        raise InvalidArgument(f"max clique penalty needs B > A > 0, got A={A}, B={B}")
    linear = {v: -A for v in range(g.vertex_count)}
    quadratic = {e: B for e in g.non_edges()}
    return ProblemReduction(MAX_CLIQUE, QuboModel(g.vertex_count, linear, quadratic, 0.0), A, B, g)


def min_vertex_cover_qubo(g: Graph, A: float = 2.0, B: float = 1.0) -> ProblemReduction:
    """``H(x) = A * sum_{(u,v) in E} (1 - x_u)(1 - x_v) + B * sum_v x_v``; needs ``A > B > 0``."""
    if not A > B > 0:
        raise InvalidArgument(f"vertex cover penalty needs A > B > 0, got A={A}, B={B}")
    linear = {v: B for v in range(g.vertex_count)}
    quadratic = {}
    for u, v in g.edges:
        linear[u] -= A
        linear[v] -= A
        quadratic[(u, v)] = A
    offset = A * len(g.edges)
    return ProblemReduction(MIN_VERTEX_COVER, QuboModel(g.vertex_count, linear, quadratic, offset), A, B, g)


def reduce(g: Graph, kind: str, A: float | None = None, B: float | None = None) -> ProblemReduction:
    if kind == MAX_CLIQUE:
        return max_clique_qubo(g, 1.0 if A is None else A, 2.0 if B is None else B)
    if kind == MIN_VERTEX_COVER:
        return min_vertex_cover_qubo(g, 2.0 if A is None else A, 1.0 if B is None else B)
    raise InvalidArgument(f"unknown problem kind {kind!r}")


def is_clique(g: Graph, vertices) -> bool:
    vs = sorted(vertices)
    return all(g.has_edge(u, v) for i, u in enumerate(vs) for v in vs[i + 1:])


def is_vertex_cover(g: Graph, vertices) -> bool:
    vs = set(vertices)
    return all(u in vs or v in vs for u, v in g.edges)


def decode_solution(reduction: ProblemReduction, state: SpinState):
    """Returns ``(vertex_set, feasible, size)``; Ising states are read through x = (s + 1) / 2."""
    if len(state) != reduction.graph.vertex_count:
        raise InvalidArgument("state length does not match the graph")
    if state.domain == ISING:
        state = state.to_binary()
    assert state.domain == BINARY
    chosen = frozenset(v for v, x in enumerate(state.values) if x == 1)
    check = is_clique if reduction.kind == MAX_CLIQUE else is_vertex_cover
    return chosen, check(reduction.graph, chosen), len(chosen)


def _subset_codes(n: int) -> np.ndarray:
    if n > MAX_EXHAUSTIVE_VERTICES:
        raise InvalidArgument(f"exhaustive search limited to {MAX_EXHAUSTIVE_VERTICES} vertices, got {n}")
    return np.arange(1 << n, dtype=np.int64)


def brute_force_max_clique(g: Graph) -> int:
    """Clique number by checking every vertex subset."""
    codes = _subset_codes(g.vertex_count)
    ok = np.ones(codes.size, dtype=bool)
    for u, v in g.non_edges():
        pair = (1 << u) | (1 << v)
        ok &= (codes & pair) != pair
    return int(np.bitwise_count(codes[ok]).max())


def brute_force_min_vertex_cover(g: Graph) -> int:
    """Vertex cover number by checking every vertex subset."""
    codes = _subset_codes(g.vertex_count)
    ok = np.ones(codes.size, dtype=bool)
    for u, v in g.edges:
        ok &= (codes & ((1 << u) | (1 << v))) != 0
    return int(np.bitwise_count(codes[ok]).min())
