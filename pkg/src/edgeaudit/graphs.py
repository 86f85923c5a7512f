"""Labeled undirected simple graphs on the vertex set {1, ..., n}.

A graph is stored as an integer bit vector of width C(n, 2).  Edges are
ordered lexicographically, (1,2), (1,3), ..., (1,n), (2,3), ..., and the
first edge occupies the most significant bit.  With that layout the integer
``code`` of a graph is also its position in lexicographic bit-string order,
so arrays indexed by code line up with :func:`enumerate_graphs`.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import CapacityError, InputError

DEFAULT_ENUMERATION_CAP = 6


def enumeration_cap() -> int:
    """Current cap on n for exhaustive enumeration (env ``EDGEAUDIT_ENUM_CAP`` overrides)."""
    value = os.environ.get("EDGEAUDIT_ENUM_CAP")
    return int(value) if value else DEFAULT_ENUMERATION_CAP


def check_cap(n: int, cap: int | None = None) -> None:
    cap = enumeration_cap() if cap is None else cap
    if n > cap:
        raise CapacityError(n, cap)


def num_edges(n: int) -> int:
    """Number of vertex pairs C(n, 2)."""
    return n * (n - 1) // 2


@dataclass(frozen=True, order=True)
class EdgeIndex:
    """Unordered vertex pair {i, j}, stored with i < j (1-based labels)."""

    i: int
    j: int

    def __post_init__(self):
        if not (isinstance(self.i, (int, np.integer)) and isinstance(self.j, (int, np.integer))):
            raise InputError(f"edge endpoints must be integers, got ({self.i!r}, {self.j!r})")
        if self.i == self.j:
            raise InputError(f"self-loop {{{self.i}, {self.j}}} is not a valid edge")
        if self.i > self.j:
            # {i, j} = {j, i}
            i, j = self.j, self.i
            object.__setattr__(self, "i", int(i))
            object.__setattr__(self, "j", int(j))
        if self.i < 1:
            raise InputError(f"vertex labels start at 1, got {self.i}")

    def validate(self, n: int) -> "EdgeIndex":
        if self.j > n:
            raise InputError(f"edge {{{self.i}, {self.j}}} is invalid for n={n}")
        return self

    def position(self, n: int) -> int:
        """Lexicographic position of the edge among the C(n, 2) pairs."""
        self.validate(n)
        i, j = self.i, self.j
        return (i - 1) * (2 * n - i) // 2 + (j - i - 1)

    def to_list(self) -> list[int]:
        return [self.i, self.j]


def as_edge(e) -> EdgeIndex:
    if isinstance(e, EdgeIndex):
        return e
    try:
        i, j = e
    except (TypeError, ValueError):
        raise InputError(f"cannot interpret {e!r} as an edge") from None
    return EdgeIndex(int(i), int(j))


@lru_cache(maxsize=None)
def edge_list(n: int) -> tuple[EdgeIndex, ...]:
    """All C(n, 2) edges in lexicographic order."""
    return tuple(EdgeIndex(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1))


@lru_cache(maxsize=None)
def edge_endpoints(n: int) -> tuple[np.ndarray, np.ndarray]:
    """0-based endpoint arrays (rows, cols) in lexicographic edge order."""
    rows, cols = np.triu_indices(n, 1)
    rows.setflags(write=False)
    cols.setflags(write=False)
    return rows, cols


def edge_bit(n: int, e) -> int:
    """Integer mask of edge ``e`` inside a code."""
    m = num_edges(n)
    return 1 << (m - 1 - as_edge(e).position(n))


@dataclass(frozen=True)
class Graph:
    """Undirected binary simple graph on vertices 1..n.

    Equality is labeled-graph equality: same n and same edge set.
    """

    n: int
    code: int = 0

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InputError(f"vertex count must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "code", int(self.code))
        if self.code < 0 or self.code >> self.width:
            raise InputError(f"code {self.code} does not fit in {self.width} edge bits")

    @property
    def width(self) -> int:
        return num_edges(self.n)

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, 0)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, (1 << num_edges(n)) - 1)

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        code = 0
        for e in edges:
            code |= edge_bit(n, e)
        return cls(n, code)

    @classmethod
    def from_bits(cls, bits: Sequence[int] | np.ndarray) -> "Graph":
        """Build from a 0/1 vector in lexicographic edge order."""
        bits = np.asarray(bits, dtype=np.uint8)
        m = bits.size
        n = int(round((1 + np.sqrt(1 + 8 * m)) / 2))
        if num_edges(n) != m:
            raise InputError(f"bit vector of length {m} is not C(n, 2) for any n")
        return cls(n, bits_to_code(bits))

    @classmethod
    def from_bitstring(cls, n: int, s: str) -> "Graph":
        if len(s) != num_edges(n) or set(s) - {"0", "1"}:
            raise InputError(f"bit string {s!r} is not a graph on {n} vertices")
        return cls(n, int(s, 2) if s else 0)

    def bitstring(self) -> str:
        return format(self.code, f"0{self.width}b") if self.width else ""

    def bits(self) -> np.ndarray:
        m = self.width
        if m == 0:
            return np.zeros(0, dtype=np.uint8)
        nbytes = (m + 7) // 8
        raw = np.frombuffer((self.code << (8 * nbytes - m)).to_bytes(nbytes, "big"), dtype=np.uint8)
        return np.unpackbits(raw)[:m]

    def edges(self) -> list[EdgeIndex]:
        return [e for e, b in zip(edge_list(self.n), self.bits()) if b]

    def has_edge(self, e) -> bool:
        return bool(self.code & edge_bit(self.n, e))

    def edge_count(self) -> int:
        return self.code.bit_count()

    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.n, self.n), dtype=np.uint8)
        rows, cols = edge_endpoints(self.n)
        b = self.bits()
        adj[rows, cols] = b
        adj[cols, rows] = b
        return adj

    def with_edge(self, e) -> "Graph":
        return Graph(self.n, self.code | edge_bit(self.n, e))

    def without_edge(self, e) -> "Graph":
        return Graph(self.n, self.code & ~edge_bit(self.n, e))

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [e.to_list() for e in self.edges()]}

    @classmethod
    def from_json(cls, obj) -> "Graph":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            n = obj["n"]
            edges = obj["edges"]
        except (KeyError, TypeError):
            raise InputError("graph JSON needs keys 'n' and 'edges'") from None
        for e in edges:
            if len(e) != 2 or not e[0] < e[1]:
                raise InputError(f"graph JSON edges must be [i, j] with i < j, got {e!r}")
        return cls.from_edges(n, edges)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={[tuple(e.to_list()) for e in self.edges()]})"


def bits_to_code(bits: np.ndarray) -> int:
    m = bits.size
    if m == 0:
        return 0
    packed = np.packbits(bits.astype(np.uint8))
    return int.from_bytes(packed.tobytes(), "big") >> (8 * packed.size - m)


def edge_flip(g: Graph, e) -> Graph:
    """Toggle edge ``e`` in ``g``."""
    return Graph(g.n, g.code ^ edge_bit(g.n, e))


def neighbors(g: Graph) -> list[Graph]:
    """All graphs at edge distance one from ``g``, in lexicographic edge order."""
    m = g.width
    return [Graph(g.n, g.code ^ (1 << (m - 1 - k))) for k in range(m)]


def symmetric_difference_size(g: Graph, h: Graph) -> int:
    if g.n != h.n:
        raise InputError(f"graphs on different vertex counts ({g.n} vs {h.n})")
    return (g.code ^ h.code).bit_count()


def enumerate_graphs(n: int, cap: int | None = None) -> Iterator[Graph]:
    """Yield all 2^C(n,2) labeled graphs on n vertices in lexicographic bit order."""
    check_cap(n, cap)
    for code in range(1 << num_edges(n)):
        yield Graph(n, code)


def graph_count(n: int) -> int:
    return 1 << num_edges(n)


@lru_cache(maxsize=16)
def all_bits(n: int) -> np.ndarray:
    """(2^m, m) uint8 matrix; row ``c`` holds the edge bits of the graph with code ``c``."""
    m = num_edges(n)
    codes = np.arange(1 << m, dtype=np.int64)
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)
    out = ((codes[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
    out.setflags(write=False)
    return out


def all_adjacency(n: int) -> np.ndarray:
    """(2^m, n, n) adjacency tensor of every graph, indexed by code."""
    bits = all_bits(n)
    rows, cols = edge_endpoints(n)
    adj = np.zeros((bits.shape[0], n, n), dtype=np.uint8)
    adj[:, rows, cols] = bits
    adj[:, cols, rows] = bits
    return adj


def codes_from_adjacency(adj: np.ndarray) -> np.ndarray:
    """Vectorized inverse of :func:`all_adjacency` for n small enough that codes fit in int64."""
    n = adj.shape[-1]
    m = num_edges(n)
    if m > 62:
        raise InputError("codes_from_adjacency only supports n <= 11")
    rows, cols = edge_endpoints(n)
    bits = adj[..., rows, cols].astype(np.int64)
    weights = np.left_shift(1, np.arange(m - 1, -1, -1, dtype=np.int64))
    return bits @ weights
