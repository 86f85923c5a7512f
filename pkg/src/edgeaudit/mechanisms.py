"""Edge-DP release mechanisms with auditable output laws."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Hashable, Sequence

import numpy as np

from .errors import InputError
from .graphs import Graph, all_bits, check_cap, enumerate_graphs, graph_count, num_edges
from .rng import RngLike, as_generator

PMF_TOL = 1e-9


class DiscreteMechanism:
    """Randomized map from graphs on ``n`` vertices to a finite ordered alphabet.

    Subclasses override :meth:`log_pmf`; everything else derives from it.
    """

    n: int
    nominal_epsilon: float

    @property
    def alphabet(self) -> Sequence[Hashable]:
        raise NotImplementedError

    def log_pmf(self, g: Graph) -> np.ndarray:
        raise NotImplementedError

    def pmf(self, g: Graph) -> np.ndarray:
        return np.exp(self.log_pmf(g))

    def log_pmf_matrix(self) -> np.ndarray:
        """Rows indexed by graph code, columns by output position."""
        check_cap(self.n)
        return np.stack([self.log_pmf(g) for g in enumerate_graphs(self.n)])

    def pmf_matrix(self) -> np.ndarray:
        return np.exp(self.log_pmf_matrix())

    def sample(self, g: Graph, rng: RngLike):
        gen = as_generator(rng)
        idx = gen.choice(len(self.alphabet), p=self.pmf(g))
        return self.alphabet[idx]

    def _check_graph(self, g: Graph) -> None:
        if g.n != self.n:
            raise InputError(f"mechanism is defined on n={self.n}, got a graph with n={g.n}")


class RandomizedResponseEdges(DiscreteMechanism):
    """Flip every edge bit independently with probability ``p``.

    Output alphabet is the set of all graphs on ``n`` vertices, in code order.
    Nominal epsilon is ln((1 - p) / p).
    """

    def __init__(self, n: int, p: float, *, allow_degenerate: bool = False):
        if not 0.0 < p < 0.5 and not (allow_degenerate and p == 0.5):
            raise InputError(f"flip probability must lie in (0, 1/2), got {p}")
        self.n = n
        self.p = float(p)
        self.nominal_epsilon = math.log((1 - self.p) / self.p)

    @classmethod
    def from_epsilon(cls, n: int, epsilon: float) -> "RandomizedResponseEdges":
        """Flip probability 1 / (1 + e^epsilon)."""
        if epsilon <= 0:
            raise InputError(f"epsilon must be positive, got {epsilon}")
        return cls(n, 1.0 / (1.0 + math.exp(epsilon)))

    @property
    def alphabet(self) -> list[Graph]:
        return list(enumerate_graphs(self.n))

    def log_pmf(self, g: Graph) -> np.ndarray:
        self._check_graph(g)
        check_cap(self.n)
        m = num_edges(self.n)
        codes = np.arange(graph_count(self.n), dtype=np.int64)
        d = np.bitwise_count(codes ^ g.code).astype(float)
        return d * math.log(self.p) + (m - d) * math.log1p(-self.p)

    def log_pmf_matrix(self) -> np.ndarray:
        check_cap(self.n)
        m = num_edges(self.n)
        codes = np.arange(graph_count(self.n), dtype=np.int64)
        d = np.bitwise_count(codes[:, None] ^ codes[None, :]).astype(float)
        return d * math.log(self.p) + (m - d) * math.log1p(-self.p)

    def sample(self, g: Graph, rng: RngLike) -> Graph:
        gen = as_generator(rng)
        flips = (gen.random(g.width) < self.p).astype(np.uint8)
        return Graph.from_bits(g.bits() ^ flips) if g.width else g

    def __repr__(self) -> str:
        return f"RandomizedResponseEdges(n={self.n}, p={self.p})"


class TabularMechanism(DiscreteMechanism):
    """Mechanism given by an explicit (graphs x outputs) probability table."""

    def __init__(self, n: int, alphabet: Sequence[Hashable], table: np.ndarray,
                 nominal_epsilon: float = math.inf, kind: str = "table"):
        table = np.asarray(table, dtype=float)
        if table.shape != (graph_count(n), len(alphabet)):
            raise InputError(
                f"table shape {table.shape} != ({graph_count(n)}, {len(alphabet)})"
            )
        if np.any(table < 0) or np.any(np.abs(table.sum(axis=1) - 1) > PMF_TOL):
            raise InputError("every table row must be a probability vector")
        self.n = n
        self._alphabet = list(alphabet)
        with np.errstate(divide="ignore"):
            self._log_table = np.log(table)
        self.nominal_epsilon = nominal_epsilon
        self.kind = kind

    @property
    def alphabet(self):
        return self._alphabet

    def log_pmf(self, g: Graph) -> np.ndarray:
        self._check_graph(g)
        return self._log_table[g.code].copy()

    def log_pmf_matrix(self) -> np.ndarray:
        return self._log_table.copy()


def constant_mechanism(n: int, law: Sequence[float] = (1.0,),
                       alphabet: Sequence[Hashable] | None = None) -> TabularMechanism:
    """Ignores its input and emits a fixed law."""
    check_cap(n)
    law = np.asarray(law, dtype=float)
    alphabet = list(range(law.size)) if alphabet is None else list(alphabet)
    return TabularMechanism(n, alphabet, np.tile(law, (graph_count(n), 1)),
                             nominal_epsilon=0.0, kind="constant")


def identity_mechanism(n: int) -> TabularMechanism:
    """Releases the graph itself."""
    check_cap(n)
    return TabularMechanism(n, list(enumerate_graphs(n)), np.eye(graph_count(n)), kind="identity")


def post_process(mech: DiscreteMechanism, f: Callable[[Hashable], Hashable]) -> TabularMechanism:
    """Compose ``mech`` with a deterministic map on its outputs."""
    images = [f(w) for w in mech.alphabet]
    labels = sorted(set(images), key=repr)
    col = {lab: k for k, lab in enumerate(labels)}
    merge = np.zeros((len(images), len(labels)))
    for k, img in enumerate(images):
        merge[k, col[img]] = 1.0
    table = mech.pmf_matrix() @ merge
    return TabularMechanism(mech.n, labels, table, nominal_epsilon=mech.nominal_epsilon)


@dataclass(frozen=True)
class GridSpec:
    """Uniform evaluation grid for a continuous output."""

    lo: float
    hi: float
    points: int = 100_000

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)) or self.hi <= self.lo:
            raise InputError(f"degenerate grid [{self.lo}, {self.hi}]")
        if self.points < 2:
            raise InputError(f"grid needs at least 2 points, got {self.points}")

    @classmethod
    def default(cls, epsilon: float, n: int, points: int = 100_000) -> "GridSpec":
        """[-40/eps, C(n,2) + 40/eps]: wide enough for every Laplace tail that matters."""
        return cls(-40.0 / epsilon, num_edges(n) + 40.0 / epsilon, points)

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class LaplaceEdgeCount:
    """Edge count plus Laplace(1/epsilon) noise; sensitivity of the count is 1."""

    epsilon: float
    sensitivity: float = 1.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InputError(f"epsilon must be positive, got {self.epsilon}")
        if self.sensitivity != 1.0:
            raise InputError("edge-count sensitivity is fixed at 1")

    @property
    def scale(self) -> float:
        return self.sensitivity / self.epsilon

    @property
    def nominal_epsilon(self) -> float:
        return self.epsilon

    def log_density_at_count(self, count, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        count = np.asarray(count, dtype=float)
        return math.log(self.epsilon / 2) - self.epsilon * np.abs(y - count)

    def log_density(self, g: Graph, y) -> np.ndarray:
        return self.log_density_at_count(g.edge_count(), y)

    def density(self, g: Graph, y):
        out = np.exp(self.log_density(g, y))
        return float(out) if out.ndim == 0 else out

    def noise(self, gen: np.random.Generator, size=None):
        """Laplace(0, scale) by inverse CDF of a uniform draw."""
        u = gen.random(size) - 0.5
        return -self.scale * np.sign(u) * np.log1p(-2.0 * np.abs(u))

    def sample(self, g: Graph, rng: RngLike) -> float:
        return float(g.edge_count() + self.noise(as_generator(rng)))

    def sample_counts(self, counts: np.ndarray, rng: RngLike) -> np.ndarray:
        counts = np.asarray(counts, dtype=float)
        return counts + self.noise(as_generator(rng), counts.shape)

    def noisy_density(self, g: Graph, rng: RngLike) -> float:
        if g.n < 2:
            raise InputError("density needs n >= 2")
        return self.sample(g, rng) / g.width


def laplace_density(mech: LaplaceEdgeCount, g: Graph, y):
    return mech.density(g, y)


def laplace_sample(mech: LaplaceEdgeCount, g: Graph, rng: RngLike) -> float:
    return mech.sample(g, rng)


def noisy_density(mech: LaplaceEdgeCount, g: Graph, rng: RngLike) -> float:
    return mech.noisy_density(g, rng)


def rr_pmf(mech: RandomizedResponseEdges, g: Graph) -> np.ndarray:
    return mech.pmf(g)


def edge_counts(n: int) -> np.ndarray:
    """Edge count of every graph, indexed by code."""
    return all_bits(n).sum(axis=1).astype(np.int64)
