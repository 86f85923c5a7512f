"""Probability laws over the graphs on n labeled vertices.

All exact tables are held in log space as a dense array indexed by graph
code (see :mod:`edgeaudit.graphs`), with ``-inf`` marking graphs outside the
support.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.special import logsumexp, xlogy

from .errors import ConditioningError, InputError
from .graphs import (
    EdgeIndex,
    Graph,
    all_bits,
    as_edge,
    bits_to_code,
    check_cap,
    edge_list,
    graph_count,
    num_edges,
)
from .rng import RngLike, as_generator

NORMALIZATION_TOL = 1e-9


class ExactDistribution:
    """Explicit probability table over all graphs on ``n`` vertices."""

    def __init__(self, n: int, log_probs: np.ndarray, *, check: bool = True):
        log_probs = np.asarray(log_probs, dtype=float)
        if log_probs.shape != (graph_count(n),):
            raise InputError(
                f"log-probability table has shape {log_probs.shape}, expected ({graph_count(n)},)"
            )
        if np.any(np.isnan(log_probs)) or np.any(log_probs == np.inf):
            raise InputError("log-probabilities must be finite or -inf")
        if check:
            total = np.exp(logsumexp(log_probs))
            if abs(total - 1.0) > NORMALIZATION_TOL:
                raise InputError(f"probabilities sum to {total!r}, not 1")
        self.n = n
        self.log_probs = log_probs
        self.log_probs.setflags(write=False)

    @classmethod
    def from_log_weights(cls, n: int, log_weights: np.ndarray) -> "ExactDistribution":
        """Normalize unnormalized log-weights with log-sum-exp."""
        log_weights = np.asarray(log_weights, dtype=float)
        log_z = logsumexp(log_weights)
        if not np.isfinite(log_z):
            raise InputError("weights have no finite positive mass")
        return cls(n, log_weights - log_z)

    @classmethod
    def from_table(cls, n: int, table: Mapping[Graph, float]) -> "ExactDistribution":
        """Build from an explicit ``{graph: probability}`` mapping (missing graphs get 0)."""
        check_cap(n)
        probs = np.zeros(graph_count(n))
        for g, p in table.items():
            if g.n != n:
                raise InputError(f"table graph has n={g.n}, expected {n}")
            if p < 0:
                raise InputError(f"negative probability {p} for {g}")
            probs[g.code] += p
        with np.errstate(divide="ignore"):
            return cls(n, np.log(probs))

    @classmethod
    def point_mass(cls, g: Graph) -> "ExactDistribution":
        return cls.from_table(g.n, {g: 1.0})

    @property
    def probs(self) -> np.ndarray:
        return np.exp(self.log_probs)

    def prob(self, g: Graph) -> float:
        return float(np.exp(self.log_probs[g.code]))

    def log_prob(self, g: Graph) -> float:
        return float(self.log_probs[g.code])

    def support(self) -> list[Graph]:
        return [Graph(self.n, int(c)) for c in np.flatnonzero(np.isfinite(self.log_probs))]

    def secret_mask(self, e, present: bool = True) -> np.ndarray:
        k = as_edge(e).position(self.n)
        col = all_bits(self.n)[:, k].astype(bool)
        return col if present else ~col

    def log_mass(self, mask: np.ndarray) -> float:
        if not mask.any():
            return -np.inf
        return float(logsumexp(self.log_probs[mask]))

    def edge_marginal(self, e) -> float:
        """Pr({i, j} in E)."""
        return float(np.exp(self.log_mass(self.secret_mask(e, True))))

    def condition(self, mask: np.ndarray) -> "ExactDistribution":
        """Renormalized restriction to the graphs selected by ``mask``."""
        log_z = self.log_mass(mask)
        if log_z == -np.inf:
            raise ConditioningError("cannot condition on an event of probability zero")
        return ExactDistribution(self.n, np.where(mask, self.log_probs - log_z, -np.inf))

    def sample(self, rng: RngLike) -> Graph:
        gen = as_generator(rng)
        cdf = np.cumsum(self.probs)
        idx = int(np.searchsorted(cdf, gen.random() * cdf[-1], side="right"))
        idx = min(idx, cdf.size - 1)
        # guard against landing on a zero-mass tail entry through rounding
        while not np.isfinite(self.log_probs[idx]):
            idx -= 1
        return Graph(self.n, idx)

    def sample_codes(self, size: int, rng: RngLike) -> np.ndarray:
        """Vectorized inverse-CDF draws returning graph codes."""
        gen = as_generator(rng)
        cdf = np.cumsum(self.probs)
        idx = np.searchsorted(cdf, gen.random(size) * cdf[-1], side="right")
        idx = np.minimum(idx, cdf.size - 1)
        support = np.flatnonzero(np.isfinite(self.log_probs))
        # snap any rounding overshoot onto the last supported code
        bad = ~np.isfinite(self.log_probs[idx])
        if bad.any():
            idx[bad] = support[np.searchsorted(support, idx[bad], side="right") - 1]
        return idx

    def total_variation(self, other: "ExactDistribution | np.ndarray") -> float:
        q = other.probs if isinstance(other, ExactDistribution) else np.asarray(other, dtype=float)
        return 0.5 * float(np.abs(self.probs - q).sum())

    def to_csv(self, fh=None) -> str | None:
        """Write ``bits,probability`` rows in lexicographic order.

        Returns the CSV text when no file handle is given.
        """
        out = io.StringIO() if fh is None else fh
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["graph", "probability"])
        m = num_edges(self.n)
        for code, p in enumerate(self.probs):
            writer.writerow([format(code, f"0{m}b") if m else "", repr(float(p))])
        return out.getvalue() if fh is None else None

    @classmethod
    def from_csv(cls, n: int, text: str) -> "ExactDistribution":
        rows = list(csv.reader(io.StringIO(text)))
        table = {Graph.from_bitstring(n, r[0]): float(r[1]) for r in rows[1:] if r}
        return cls.from_table(n, table)

    def __repr__(self) -> str:
        return f"ExactDistribution(n={self.n}, support={int(np.isfinite(self.log_probs).sum())})"


def _edge_probabilities(n: int, pi) -> np.ndarray:
    m = num_edges(n)
    if isinstance(pi, Mapping):
        arr = np.full(m, np.nan)
        for e, p in pi.items():
            arr[as_edge(e).position(n)] = p
        if np.isnan(arr).any():
            raise InputError("edge-probability map must cover every vertex pair")
    elif np.isscalar(pi):
        arr = np.full(m, float(pi))
    else:
        arr = np.asarray(pi, dtype=float).copy()
    if arr.shape != (m,):
        raise InputError(f"expected {m} edge probabilities, got shape {arr.shape}")
    if np.any(arr < 0) or np.any(arr > 1) or np.any(np.isnan(arr)):
        raise InputError("edge probabilities must lie in [0, 1]")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class IndependentEdgeModel:
    """Each pair {i, j} is present independently with probability ``pi[{i, j}]``.

    ``pi`` may be a scalar, a length-C(n,2) sequence in lexicographic edge
    order, or a mapping from edges to probabilities.
    """

    n: int
    pi: np.ndarray = field(default=0.5)

    def __post_init__(self):
        object.__setattr__(self, "pi", _edge_probabilities(self.n, self.pi))

    def edge_probability(self, e) -> float:
        return float(self.pi[as_edge(e).position(self.n)])

    def sample_bits(self, gen: np.random.Generator, size: int | None = None) -> np.ndarray:
        shape = (num_edges(self.n),) if size is None else (size, num_edges(self.n))
        return (gen.random(shape) < self.pi).astype(np.uint8)

    def sample(self, rng: RngLike) -> Graph:
        return Graph(self.n, bits_to_code(self.sample_bits(as_generator(rng))))


@dataclass(frozen=True)
class TwoQueensModel:
    """Hive model: the queens' edge {1, 2} sets the density of every other pair.

    With probability ``q`` the queens are linked and every other pair is
    present independently with probability ``a``; otherwise the queens are
    not linked and the other pairs appear with probability ``b < a``.
    """

    n: int
    a: float
    b: float
    q: float = 0.5

    QUEENS = EdgeIndex(1, 2)

    def __post_init__(self):
        if self.n <= 2:
            raise InputError(f"two-queens model needs n > 2, got {self.n}")
        if not 0.0 <= self.a <= 1.0:
            raise InputError(f"a must lie in [0, 1], got {self.a}")
        if not 0.0 <= self.b < self.a:
            raise InputError(f"b must lie in [0, a), got b={self.b}, a={self.a}")
        if not 0.0 < self.q < 1.0:
            raise InputError(f"q must lie in (0, 1), got {self.q}")

    def sample_with_truth(self, rng: RngLike) -> tuple[bool, Graph]:
        gen = as_generator(rng)
        linked = bool(gen.random() < self.q)
        rate = self.a if linked else self.b
        bits = (gen.random(num_edges(self.n)) < rate).astype(np.uint8)
        bits[0] = linked  # {1, 2} is the first edge in lexicographic order
        return linked, Graph(self.n, bits_to_code(bits))

    def sample(self, rng: RngLike) -> Graph:
        return self.sample_with_truth(rng)[1]


def exact_from_independent(model: IndependentEdgeModel) -> ExactDistribution:
    check_cap(model.n)
    bits = all_bits(model.n).astype(bool)
    with np.errstate(divide="ignore"):
        log_on = np.log(model.pi)
        log_off = np.log1p(-model.pi)
    log_probs = np.where(bits, log_on, log_off).sum(axis=1)
    return ExactDistribution(model.n, log_probs)


def exact_from_two_queens(model: TwoQueensModel) -> ExactDistribution:
    check_cap(model.n)
    m = num_edges(model.n)
    bits = all_bits(model.n)
    linked = bits[:, 0].astype(bool)
    others = bits[:, 1:].sum(axis=1).astype(float)
    absent = (m - 1) - others
    log_linked = np.log(model.q) + xlogy(others, model.a) + xlogy(absent, 1 - model.a)
    log_unlinked = np.log1p(-model.q) + xlogy(others, model.b) + xlogy(absent, 1 - model.b)
    log_probs = np.where(linked, log_linked, log_unlinked)
    return ExactDistribution(model.n, log_probs)


def to_exact(dist) -> ExactDistribution:
    """Exact table for any enumerable model."""
    if isinstance(dist, ExactDistribution):
        return dist
    if isinstance(dist, IndependentEdgeModel):
        return exact_from_independent(dist)
    if isinstance(dist, TwoQueensModel):
        return exact_from_two_queens(dist)
    from .ergm import ErgmModel, exact_ergm_distribution

    if isinstance(dist, ErgmModel):
        return exact_ergm_distribution(dist)
    raise InputError(f"no exact table for {type(dist).__name__}")


def sample(dist, rng: RngLike) -> Graph:
    """Draw one graph from any supported law (ERGMs use a Gibbs chain)."""
    from .ergm import ErgmModel, gibbs_sample

    if isinstance(dist, ErgmModel):
        return gibbs_sample(dist, rng=rng)
    return dist.sample(rng)


def condition_on_secret(dist: ExactDistribution, e, present: bool = True) -> ExactDistribution:
    """Condition on the edge-presence secret sigma_e (or its negation)."""
    e = as_edge(e).validate(dist.n)
    try:
        return dist.condition(dist.secret_mask(e, present))
    except ConditioningError:
        side = "present" if present else "absent"
        raise ConditioningError(f"Pr(edge {e.to_list()} {side}) = 0; skip this secret pair") from None


def edge_marginals(dist: ExactDistribution) -> np.ndarray:
    """Pr(e in E) for every edge, lexicographic order."""
    return dist.probs @ all_bits(dist.n)


def witness_two_point(g0: Graph, g1: Graph) -> IndependentEdgeModel:
    """Independent-edge law supported exactly on the neighbor pair {g0, g1}.

    The differing edge gets probability 1/2; every other edge is fixed to its
    state in ``g0``.
    """
    diff = g0.code ^ g1.code
    if diff.bit_count() != 1 or g0.n != g1.n:
        raise InputError("witness construction needs a neighboring pair")
    pi = g0.bits().astype(float)
    pi[g0.width - diff.bit_length()] = 0.5
    return IndependentEdgeModel(g0.n, pi)


def differing_edge(g0: Graph, g1: Graph) -> EdgeIndex:
    diff = g0.code ^ g1.code
    if diff.bit_count() != 1:
        raise InputError("graphs are not neighbors")
    return edge_list(g0.n)[g0.width - diff.bit_length()]


def random_independent_model(n: int, rng: RngLike) -> IndependentEdgeModel:
    """Independent-edge model with every pi_e drawn uniformly from (0, 1)."""
    return IndependentEdgeModel(n, as_generator(rng).random(num_edges(n)))


__all__: Sequence[str] = [
    "ExactDistribution",
    "IndependentEdgeModel",
    "TwoQueensModel",
    "exact_from_independent",
    "exact_from_two_queens",
    "condition_on_secret",
    "sample",
    "to_exact",
    "witness_two_point",
]
