"""Ising / QUBO models, energy evaluation and the spin-reversal (gauge) transform.

Both model kinds share one sparse representation::

    H(x) = offset + sum_i linear[i] * x_i + sum_{i<j} quadratic[i, j] * x_i * x_j

with ``x_i`` in {-1, +1} for :class:`IsingModel` and {0, 1} for :class:`QuboModel`.
Quadratic keys are canonical ``(i, j)`` pairs with ``i < j`` and entries that are
exactly zero are not stored.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import ClassVar, Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidArgument

ISING = "ising"
BINARY = "binary"

MAX_BRUTE_FORCE_VARIABLES = 24
_CHUNK_BITS = 16


@dataclass(frozen=True, eq=False)
class _QuadraticModel:
    n: int
    linear: Mapping[int, float]
    quadratic: Mapping[tuple[int, int], float]
    offset: float = 0.0

    kind: ClassVar[str] = ""
    domain: ClassVar[str] = ""

    def __post_init__(self):
        n = int(self.n)
        if n < 0:
            raise InvalidArgument(f"variable count must be non-negative, got {n}")
        linear: dict[int, float] = {}
        for i, v in dict(self.linear).items():
            i = int(i)
            if not 0 <= i < n:
                raise InvalidArgument(f"linear index {i} out of range for n={n}")
            v = float(v)
            if v != 0.0:
                linear[i] = v
        quadratic: dict[tuple[int, int], float] = {}
        for (i, j), v in dict(self.quadratic).items():
            i, j = int(i), int(j)
            if i == j:
                raise InvalidArgument(f"self-coupling ({i}, {i}) is not allowed")
            if i > j:
                i, j = j, i
            if not (0 <= i and j < n):
                raise InvalidArgument(f"coupler ({i}, {j}) out of range for n={n}")
            quadratic[(i, j)] = quadratic.get((i, j), 0.0) + float(v)
        quadratic = {k: v for k, v in sorted(quadratic.items()) if v != 0.0}
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "linear", dict(sorted(linear.items())))
        object.__setattr__(self, "quadratic", quadratic)
        object.__setattr__(self, "offset", float(self.offset))

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        return (
            self.n == other.n
            and self.offset == other.offset
            and self.linear == other.linear
            and self.quadratic == other.quadratic
        )

    def __repr__(self):
        return (
            f"{type(self).__name__}(n={self.n}, linear={len(self.linear)} terms, "
            f"quadratic={len(self.quadratic)} terms, offset={self.offset!r})"
        )

    @classmethod
    def empty(cls, n: int):
        return cls(n, {}, {}, 0.0)

    @cached_property
    def h(self) -> np.ndarray:
        """Dense linear weights, length ``n``."""
        h = np.zeros(self.n)
        for i, v in self.linear.items():
            h[i] = v
        h.setflags(write=False)
        return h

    @cached_property
    def edges(self) -> np.ndarray:
        """Coupler endpoints as an ``(m, 2)`` integer array in canonical order."""
        e = np.array(list(self.quadratic), dtype=np.int64).reshape(-1, 2)
        e.setflags(write=False)
        return e

    @cached_property
    def J(self) -> np.ndarray:
        """Coupler weights aligned with :attr:`edges`."""
        j = np.array(list(self.quadratic.values()), dtype=float)
        j.setflags(write=False)
        return j

    def max_abs(self) -> float:
        vals = [abs(v) for v in self.linear.values()] + [abs(v) for v in self.quadratic.values()]
        return max(vals, default=0.0)

    def energies(self, states) -> np.ndarray:
        """Energies of a ``(k, n)`` array of states (rows in this model's domain)."""
        s = np.asarray(states, dtype=float)
        if s.ndim == 1:
            s = s[None, :]
        if s.shape[1] != self.n:
            raise InvalidArgument(f"state length {s.shape[1]} does not match n={self.n}")
        e = self.offset + s @ self.h
        if len(self.edges):
            e = e + (s[:, self.edges[:, 0]] * s[:, self.edges[:, 1]]) @ self.J
        return e

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "linear": {str(i): v for i, v in self.linear.items()},
            "quadratic": {f"{i},{j}": v for (i, j), v in self.quadratic.items()},
            "offset": self.offset,
        }


class IsingModel(_QuadraticModel):
    """Ising model over spins in {-1, +1}."""

    kind = ISING
    domain = ISING


class QuboModel(_QuadraticModel):
    """QUBO model over binary variables in {0, 1}."""

    kind = "qubo"
    domain = BINARY


def model_from_dict(data: Mapping):
    cls = {"ising": IsingModel, "qubo": QuboModel}.get(data.get("kind"))
    if cls is None:
        raise InvalidArgument(f"unknown model kind {data.get('kind')!r}")
    quadratic = {}
    for key, v in data.get("quadratic", {}).items():
        i, j = (int(p) for p in key.split(","))
        quadratic[(i, j)] = v
    linear = {int(i): v for i, v in data.get("linear", {}).items()}
    return cls(int(data["n"]), linear, quadratic, float(data.get("offset", 0.0)))


def dumps_model(model: _QuadraticModel, metadata: Mapping | None = None) -> str:
    doc = model.to_dict()
    if metadata:
        doc["metadata"] = dict(metadata)
    return json.dumps(doc, indent=1)


def loads_model(text: str):
    return model_from_dict(json.loads(text))


@dataclass(frozen=True)
class SpinState:
    """An assignment to all ``n`` variables, tagged with its domain."""

    values: tuple[int, ...]
    domain: str = ISING

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        allowed = {-1, 1} if self.domain == ISING else {0, 1} if self.domain == BINARY else None
        if allowed is None:
            raise InvalidArgument(f"unknown domain {self.domain!r}")
        bad = [v for v in vals if v not in allowed]
        if bad:
            raise InvalidArgument(f"value {bad[0]} not in {self.domain} domain")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.values, dtype=np.int8)

    def to_binary(self) -> "SpinState":
        if self.domain == BINARY:
            return self
        return SpinState(tuple((v + 1) // 2 for v in self.values), BINARY)

    def to_ising(self) -> "SpinState":
        if self.domain == ISING:
            return self
        return SpinState(tuple(2 * v - 1 for v in self.values), ISING)


@dataclass(frozen=True)
class SpinReversalMask:
    """Indicator vector of the variables to spin-reverse (True = reversed)."""

    bits: tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(bool(b) for b in self.bits))

    @classmethod
    def zeros(cls, n: int) -> "SpinReversalMask":
        return cls((False,) * n)

    @classmethod
    def ones(cls, n: int) -> "SpinReversalMask":
        return cls((True,) * n)

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "SpinReversalMask":
        bits = [False] * n
        for i in indices:
            if not 0 <= i < n:
                raise InvalidArgument(f"index {i} out of range for length {n}")
            bits[i] = True
        return cls(tuple(bits))

    @classmethod
    def from_array(cls, arr) -> "SpinReversalMask":
        return cls(tuple(np.asarray(arr, dtype=bool).tolist()))

    def __len__(self):
        return len(self.bits)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.bits, dtype=bool)

    @property
    def popcount(self) -> int:
        return sum(self.bits)

    def __xor__(self, other: "SpinReversalMask") -> "SpinReversalMask":
        if len(self) != len(other):
            raise InvalidArgument("mask lengths differ")
        return SpinReversalMask(tuple(a != b for a, b in zip(self.bits, other.bits)))

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    @classmethod
    def from_string(cls, text: str) -> "SpinReversalMask":
        text = text.strip()
        if set(text) - {"0", "1"}:
            raise InvalidArgument("mask string must contain only 0 and 1")
        return cls(tuple(c == "1" for c in text))


def _check_state(model: _QuadraticModel, state: SpinState):
    if state.domain != model.domain:
        raise InvalidArgument(f"{model.kind} model needs a {model.domain} state, got {state.domain}")
    if len(state) != model.n:
        raise InvalidArgument(f"state length {len(state)} does not match n={model.n}")


def energy(model: _QuadraticModel, state: SpinState) -> float:
    _check_state(model, state)
    return float(model.energies(state.array)[0])


def _mask_array(mask, n: int) -> np.ndarray:
    m = mask.array if isinstance(mask, SpinReversalMask) else np.asarray(mask, dtype=bool)
    if m.shape != (n,):
        raise InvalidArgument(f"mask length {m.size} does not match n={n}")
    return m


def apply_spin_reversal(model: IsingModel, mask) -> IsingModel:
    """Gauge-transform ``model`` by reversing the masked spins.

    Linear weights of masked variables change sign; a coupler changes sign iff
    exactly one of its endpoints is masked (flipping both endpoints cancels).
    """
    if not isinstance(model, IsingModel):
        raise InvalidArgument("spin reversal is defined on Ising models")
    m = _mask_array(mask, model.n)
    linear = {i: (-v if m[i] else v) for i, v in model.linear.items()}
    quadratic = {(i, j): (-v if m[i] != m[j] else v) for (i, j), v in model.quadratic.items()}
    return IsingModel(model.n, linear, quadratic, model.offset)


def transform_state(state: SpinState, mask) -> SpinState:
    if state.domain != ISING:
        raise InvalidArgument("transform_state needs an Ising state")
    m = _mask_array(mask, len(state))
    return SpinState(tuple(-v if b else v for v, b in zip(state.values, m)), ISING)


def qubo_to_ising(q: QuboModel) -> IsingModel:
    """Substitute ``x = (s + 1) / 2``."""
    h = {i: v / 2.0 for i, v in q.linear.items()}
    offset = q.offset + sum(q.linear.values()) / 2.0
    J = {}
    for (i, j), v in q.quadratic.items():
        J[(i, j)] = v / 4.0
        h[i] = h.get(i, 0.0) + v / 4.0
        h[j] = h.get(j, 0.0) + v / 4.0
        offset += v / 4.0
    return IsingModel(q.n, h, J, offset)


def ising_to_qubo(m: IsingModel) -> QuboModel:
    """Substitute ``s = 2x - 1``."""
    lin = {i: 2.0 * v for i, v in m.linear.items()}
    offset = m.offset - sum(m.linear.values())
    quad = {}
    for (i, j), v in m.quadratic.items():
        quad[(i, j)] = 4.0 * v
        lin[i] = lin.get(i, 0.0) - 2.0 * v
        lin[j] = lin.get(j, 0.0) - 2.0 * v
        offset += v
    return QuboModel(m.n, lin, quad, offset)


def rescale(model: IsingModel, linear_range: float = 2.0, quadratic_range: float = 1.0):
    """Scale uniformly so linear weights fit [-2, 2] and couplers fit [-1, 1].

    One scale factor is shared by both coefficient classes and it never exceeds 1,
    so models already inside the ranges come back unchanged.
    Returns ``(scaled_model, scale)``.
    """
    hmax = max((abs(v) for v in model.linear.values()), default=0.0)
    jmax = max((abs(v) for v in model.quadratic.values()), default=0.0)
    scale = 1.0
    if hmax > 0:
        scale = min(scale, linear_range / hmax)
    if jmax > 0:
        scale = min(scale, quadratic_range / jmax)
    if scale == 1.0:
        return model, 1.0
    scaled = type(model)(
        model.n,
        {i: v * scale for i, v in model.linear.items()},
        {k: v * scale for k, v in model.quadratic.items()},
        model.offset * scale,
    )
    return scaled, scale


def enumerate_states(n: int, domain: str = ISING, start: int = 0, stop: int | None = None) -> np.ndarray:
    """States with integer codes in ``[start, stop)``; bit ``i`` of the code is variable ``i``."""
    stop = 1 << n if stop is None else stop
    codes = np.arange(start, stop, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.int8)
    if domain == ISING:
        return 2 * bits - 1
    return bits


def brute_force_ground_state(model: _QuadraticModel, atol: float = 1e-9):
    """Exhaustive minimum over all ``2**n`` states.

    Returns ``(min_energy, states)`` where ``states`` lists every state within
    ``atol`` of the minimum.
    """
    n = model.n
    if n > MAX_BRUTE_FORCE_VARIABLES:
        raise InvalidArgument(f"brute force limited to n <= {MAX_BRUTE_FORCE_VARIABLES}, got {n}")
    best = math.inf
    found: list[np.ndarray] = []
    total = 1 << n
    chunk = 1 << _CHUNK_BITS
    for start in range(0, total, chunk):
        states = enumerate_states(n, model.domain, start, min(start + chunk, total))
        e = model.energies(states)
        cmin = float(e.min())
        if cmin < best - atol:
            best = cmin
            found = []
        if cmin <= best + atol:
            best = min(best, cmin)
            found.append(states[e <= best + atol])
    rows = np.concatenate(found) if found else np.zeros((0, n), dtype=np.int8)
    rows = rows[model.energies(rows) <= best + atol] if len(rows) else rows
    return best, [SpinState(tuple(r.tolist()), model.domain) for r in rows]


def spectrum(model: _QuadraticModel) -> np.ndarray:
    """Sorted energies of every state (small ``n`` only)."""
    if model.n > MAX_BRUTE_FORCE_VARIABLES:
        raise InvalidArgument("spectrum is limited to brute-forceable models")
    return np.sort(model.energies(enumerate_states(model.n, model.domain)))


def random_ising(n: int, rng: np.random.Generator, density: float = 0.5, scale: float = 1.0) -> IsingModel:
    """Random test model: Gaussian weights on a random coupler subset."""
    linear = {i: scale * rng.standard_normal() for i in range(n)}
    quadratic = {
        (i, j): scale * rng.standard_normal()
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < density
    }
    return IsingModel(n, linear, quadratic, 0.0)


def as_state_array(states: Sequence[SpinState]) -> np.ndarray:
    return np.array([s.values for s in states], dtype=np.int8)
