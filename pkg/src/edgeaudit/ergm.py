"""Exponential random graph models over edge-based statistics.

Supported statistics are the edge count, the two-star count
sum_v C(deg v, 2), and the triangle count.  The change statistic of an edge
{i, j} has the closed form

    edges      1
    two_stars  deg(i) + deg(j)          (degrees with {i, j} removed)
    triangles  |N(i) & N(j)|

which the sampler and the slack computation use directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import expit, logsumexp

from ._core import gibbs_sweep
from .distributions import ExactDistribution
from .errors import InputError
from .graphs import (
    EdgeIndex,
    Graph,
    all_adjacency,
    as_edge,
    check_cap,
    codes_from_adjacency,
    edge_endpoints,
    edge_list,
    graph_count,
    num_edges,
)
from .rng import RngLike, as_generator

STATISTICS = ("edges", "two_stars", "triangles")
_ALIASES = {
    "edges": "edges", "edge_count": "edges",
    "two_stars": "two_stars", "two_star_count": "two_stars", "2stars": "two_stars",
    "triangles": "triangles", "triangle_count": "triangles",
}

DEFAULT_SWEEPS = 100


@dataclass(frozen=True)
class ErgmModel:
    """Pr(G = g) proportional to exp(beta . u(g))."""

    n: int
    statistics: tuple[str, ...]
    beta: tuple[float, ...]

    def __post_init__(self):
        if self.n < 2:
            raise InputError(f"ERGM needs n >= 2, got {self.n}")
        try:
            stats = tuple(_ALIASES[s] for s in self.statistics)
        except KeyError as exc:
            raise InputError(f"unknown statistic {exc.args[0]!r}; choose from {STATISTICS}") from None
        if len(set(stats)) != len(stats):
            raise InputError(f"duplicate statistics in {self.statistics}")
        beta = tuple(float(b) for b in self.beta)
        if len(beta) != len(stats):
            raise InputError(f"{len(beta)} parameters for {len(stats)} statistics")
        if not all(np.isfinite(beta)):
            raise InputError("ERGM parameters must be finite")
        object.__setattr__(self, "statistics", stats)
        object.__setattr__(self, "beta", beta)

    @classmethod
    def edges_only(cls, n: int, theta: float) -> "ErgmModel":
        return cls(n, ("edges",), (theta,))

    @property
    def beta_vector(self) -> np.ndarray:
        return np.asarray(self.beta)

    def full_beta(self) -> np.ndarray:
        """Parameters laid out over (edges, two_stars, triangles), zeros for unused terms."""
        out = np.zeros(3)
        for s, b in zip(self.statistics, self.beta):
            out[STATISTICS.index(s)] = b
        return out

    def _columns(self) -> list[int]:
        return [STATISTICS.index(s) for s in self.statistics]

    def to_json(self) -> dict:
        return {"type": "ergm", "n": self.n, "statistics": list(self.statistics), "beta": list(self.beta)}


@dataclass(frozen=True)
class ChangeStatistic:
    statistics: tuple[str, ...]
    delta: np.ndarray = field(compare=False)

    def dot(self, beta) -> float:
        return float(np.dot(self.delta, beta))


@dataclass
class AlphaResult:
    """Pufferfish slack of an ERGM family and its 2 * zeta bound.

    Witnesses are ``(model index, graph, edge)`` triples.
    """

    alpha_exact: float
    zeta: float
    alpha_witness: tuple[int, Graph, EdgeIndex] | None = None
    zeta_witness: tuple[int, Graph, EdgeIndex] | None = None

    @property
    def alpha_upper(self) -> float:
        return 2.0 * self.zeta

    def to_json(self) -> dict:
        from .audit import json_number

        def wit(w):
            if w is None:
                return None
            return {"model": w[0], "graph": w[1].to_json(), "edge": w[2].to_list()}

        return {
            "alpha_exact": json_number(self.alpha_exact),
            "zeta": json_number(self.zeta),
            "alpha_upper": json_number(self.alpha_upper),
            "alpha_witness": wit(self.alpha_witness),
            "zeta_witness": wit(self.zeta_witness),
        }


# ---------------------------------------------------------------------------
# statistics


def _stats_from_adjacency(adj: np.ndarray) -> np.ndarray:
    """(..., 3) array of (edges, two_stars, triangles) by direct counting."""
    a = adj.astype(np.int64)
    deg = a.sum(axis=-1)
    edges = deg.sum(axis=-1) // 2
    two_stars = (deg * (deg - 1) // 2).sum(axis=-1)
    triangles = np.einsum("...ij,...jk,...ki->...", a, a, a) // 6
    return np.stack([edges, two_stars, triangles], axis=-1).astype(float)


def statistics_vector(model: ErgmModel, g: Graph) -> np.ndarray:
    """u(g) for the model's statistics."""
    if g.n != model.n:
        raise InputError(f"model has n={model.n}, graph has n={g.n}")
    return _stats_from_adjacency(g.adjacency())[model._columns()]


def _change_from_adjacency(adj: np.ndarray, i: int, j: int) -> np.ndarray:
    """(..., 3) change statistics of 0-based pair (i, j) for a stack of adjacencies."""
    a = adj.astype(np.int64)
    ai = a[..., i, :]
    aj = a[..., j, :]
    cur = a[..., i, j]
    two = ai.sum(axis=-1) + aj.sum(axis=-1) - 2 * cur
    tri = (ai * aj).sum(axis=-1)
    return np.stack([np.ones_like(two), two, tri], axis=-1).astype(float)


def change_statistic(model: ErgmModel, g: Graph, e) -> ChangeStatistic:
    """u(g with e) - u(g without e); does not depend on whether e is in g."""
    e = as_edge(e).validate(model.n)
    delta = _change_from_adjacency(g.adjacency(), e.i - 1, e.j - 1)[model._columns()]
    return ChangeStatistic(model.statistics, delta)


@lru_cache(maxsize=8)
def _all_statistics(n: int) -> np.ndarray:
    out = _stats_from_adjacency(all_adjacency(n))
    out.setflags(write=False)
    return out


@lru_cache(maxsize=8)
def _all_change_statistics(n: int) -> np.ndarray:
    """(edges, graphs, 3) change statistics of every edge in every graph."""
    adj = all_adjacency(n)
    out = np.stack([_change_from_adjacency(adj, e.i - 1, e.j - 1) for e in edge_list(n)])
    out.setflags(write=False)
    return out


# ---------------------------------------------------------------------------
# exact law


def exact_ergm_distribution(model: ErgmModel) -> ExactDistribution:
    check_cap(model.n)
    log_weights = _all_statistics(model.n) @ model.full_beta()
    return ExactDistribution.from_log_weights(model.n, log_weights)


def conditional_edge_probability(model: ErgmModel, g: Graph, e) -> float:
    """Pr(e in E | all other edges as in g) = logistic(beta . Delta(g, e))."""
    return float(expit(change_statistic(model, g, e).dot(model.beta_vector)))


def marginal_edge_log_odds(model: ErgmModel, e, dist: ExactDistribution | None = None) -> float:
    """log Pr(e in E) - log Pr(e not in E) from the exact table (+/- inf if a side is empty)."""
    dist = exact_ergm_distribution(model) if dist is None else dist
    mask = dist.secret_mask(as_edge(e).validate(model.n), True)
    return float(logsumexp(dist.log_probs[mask]) - logsumexp(dist.log_probs[~mask]))


def compute_alpha(models: Sequence[ErgmModel]) -> AlphaResult:
    """Slack alpha = sup |beta . Delta(g, e) - marginal log-odds of e| over the
    family, graphs and edges, together with zeta = sup |beta . Delta(g, e)|."""
    if not models:
        raise InputError("compute_alpha needs at least one model")
    alpha, zeta = 0.0, 0.0
    alpha_w = zeta_w = None
    for idx, model in enumerate(models):
        check_cap(model.n)
        dist = exact_ergm_distribution(model)
        # (edges, graphs) conditional log-odds
        log_odds = _all_change_statistics(model.n) @ model.full_beta()
        for k, e in enumerate(edge_list(model.n)):
            cond = log_odds[k]
            z_at = int(np.argmax(np.abs(cond)))
            if zeta_w is None or abs(cond[z_at]) > zeta:
                zeta, zeta_w = float(abs(cond[z_at])), (idx, Graph(model.n, z_at).with_edge(e), e)
            marginal = marginal_edge_log_odds(model, e, dist)
            if not np.isfinite(marginal):
                gap = np.full(cond.shape, np.inf)
            else:
                gap = np.abs(cond - marginal)
            a_at = int(np.argmax(gap))
            if alpha_w is None or gap[a_at] > alpha:
                alpha, alpha_w = float(gap[a_at]), (idx, Graph(model.n, a_at).with_edge(e), e)
    return AlphaResult(alpha, zeta, alpha_w, zeta_w)


# ---------------------------------------------------------------------------
# Gibbs sampling


def logistic_table(model: ErgmModel) -> np.ndarray:
    """Pr(edge on | rest) for every attainable (two-star change, triangle change)."""
    b_edge, b_two, b_tri = model.full_beta()
    n = model.n
    s = np.arange(2 * (n - 2) + 1, dtype=float)[:, None]
    t = np.arange(n - 1, dtype=float)[None, :]
    return np.ascontiguousarray(expit(b_edge + b_two * s + b_tri * t))


class GibbsChains:
    """A batch of independent single-edge Gibbs chains advanced in lockstep.

    Each sweep visits the edges in lexicographic order and redraws each one
    from its conditional law given the rest of the graph.
    """

    def __init__(self, model: ErgmModel, chains: int, rng: RngLike, sweep=None):
        if chains < 1:
            raise InputError(f"need at least one chain, got {chains}")
        self.model = model
        self.gen = as_generator(rng)
        self.table = logistic_table(model)
        rows, cols = edge_endpoints(model.n)
        self.rows = np.ascontiguousarray(rows, dtype=np.int64)
        self.cols = np.ascontiguousarray(cols, dtype=np.int64)
        self._sweep = gibbs_sweep if sweep is None else sweep
        m = num_edges(model.n)
        init = (self.gen.random((chains, m)) < 0.5).astype(np.uint8)
        self.adj = np.zeros((chains, model.n, model.n), dtype=np.uint8)
        self.adj[:, self.rows, self.cols] = init
        self.adj[:, self.cols, self.rows] = init

    @property
    def chains(self) -> int:
        return self.adj.shape[0]

    def step(self, sweeps: int = 1) -> None:
        m = self.rows.shape[0]
        for _ in range(sweeps):
            u = self.gen.random((self.chains, m))
            self._sweep(self.adj, self.rows, self.cols, self.table, u)

    def codes(self) -> np.ndarray:
        return codes_from_adjacency(self.adj)

    def graphs(self) -> list[Graph]:
        return [Graph.from_bits(a[self.rows, self.cols]) for a in self.adj]


def gibbs_sample(model: ErgmModel, sweeps: int = DEFAULT_SWEEPS, rng: RngLike = 0) -> Graph:
    """Final state of one Gibbs chain after ``sweeps`` full sweeps."""
    if sweeps < 1:
        raise InputError(f"sweeps must be >= 1, got {sweeps}")
    chain = GibbsChains(model, 1, rng)
    chain.step(sweeps)
    return chain.graphs()[0]


def gibbs_final_codes(model: ErgmModel, sweeps: int, chains: int, rng: RngLike) -> np.ndarray:
    """Codes of the final states of ``chains`` independent chains."""
    if sweeps < 1:
        raise InputError(f"sweeps must be >= 1, got {sweeps}")
    batch = GibbsChains(model, chains, rng)
    batch.step(sweeps)
    return batch.codes()


def gibbs_histogram(model: ErgmModel, sweeps: int, chains: int, rng: RngLike,
                    burn_in: int = DEFAULT_SWEEPS) -> np.ndarray:
    """Empirical law over graph codes: every chain's state after each sweep
    past ``burn_in`` is counted once.  Returns normalized frequencies."""
    check_cap(model.n)
    if not 0 <= burn_in < sweeps:
        raise InputError(f"burn-in {burn_in} must be in [0, sweeps={sweeps})")
    batch = GibbsChains(model, chains, rng)
    batch.step(burn_in)
    counts = np.zeros(graph_count(model.n), dtype=np.int64)
    for _ in range(sweeps - burn_in):
        batch.step(1)
        counts += np.bincount(batch.codes(), minlength=counts.size)
    return counts / counts.sum()
