"""Exact privacy audits: realized edge-DP loss, Pufferfish leakage for edge
secrets, optimal-test power curves, and the dependence-slack condition.

Log-ratio conventions used throughout:

* both probabilities zero -> the output imposes no constraint (skipped);
* exactly one probability zero -> the loss is unbounded (``math.inf``);
* otherwise -> ``|log p - log q|``.

Realized losses are suprema over singleton outputs.  For discrete laws this
equals the supremum over events, because the log of a ratio of sums never
exceeds the largest termwise log-ratio.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np
from scipy.special import logsumexp

from .distributions import ExactDistribution, witness_two_point, exact_from_independent
from .errors import InputError
from .graphs import (
    EdgeIndex,
    Graph,
    all_bits,
    as_edge,
    check_cap,
    edge_list,
    graph_count,
    num_edges,
)
from .mechanisms import DiscreteMechanism, GridSpec, LaplaceEdgeCount, edge_counts

UNBOUNDED = math.inf


def _abs_log_ratio(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise |a - b| of log-probabilities; -inf where both sides vanish."""
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    both = np.isneginf(a) & np.isneginf(b)
    with np.errstate(invalid="ignore"):
        r = np.abs(a - b)
    r[both] = -np.inf
    return r


def _sup(r: np.ndarray) -> tuple[float, tuple | None]:
    """Max of a log-ratio array (0 when nothing is constrained) and its argmax."""
    if r.size == 0:
        return 0.0, None
    flat = int(np.argmax(r))
    value = float(r.flat[flat])
    if value == -np.inf:
        return 0.0, None
    return value, np.unravel_index(flat, r.shape)


def json_number(x: float):
    """Serialize an unbounded loss as the string "unbounded"."""
    if x == math.inf:
        return "unbounded"
    return float(x)


def _output_json(w):
    if isinstance(w, Graph):
        return w.to_json()
    if isinstance(w, (np.floating, float)):
        return float(w)
    if isinstance(w, np.integer):
        return int(w)
    return w


# ---------------------------------------------------------------------------
# reports


@dataclass
class DpReport:
    realized_epsilon: float
    witness: tuple[Graph, Graph, Hashable] | None
    grid_based: bool = False
    nominal_epsilon: float | None = None
    analytic_bound: float | None = None

    def __post_init__(self):
        assert self.realized_epsilon >= 0

    @property
    def unbounded(self) -> bool:
        return self.realized_epsilon == UNBOUNDED

    def to_json(self) -> dict:
        out = {
            "realized_epsilon": json_number(self.realized_epsilon),
            "grid_based": self.grid_based,
            "nominal_epsilon": None if self.nominal_epsilon is None else json_number(self.nominal_epsilon),
            "witness": None,
        }
        if self.analytic_bound is not None:
            out["analytic_bound"] = json_number(self.analytic_bound)
        if self.witness is not None:
            g, h, w = self.witness
            out["witness"] = {"graph": g.to_json(), "neighbor": h.to_json(), "output": _output_json(w)}
        return out


@dataclass
class PufferfishReport:
    leakage: dict[Hashable, float]
    witnesses: dict[Hashable, Hashable]
    skipped: list[Hashable]
    grid_based: bool = False

    @property
    def overall(self) -> float:
        return max(self.leakage.values(), default=0.0)

    @property
    def worst_pair(self) -> Hashable | None:
        if not self.leakage:
            return None
        return max(self.leakage, key=lambda k: self.leakage[k])

    def to_json(self) -> dict:
        def key(k):
            return k.to_list() if isinstance(k, EdgeIndex) else repr(k)

        return {
            "overall_leakage": json_number(self.overall),
            "grid_based": self.grid_based,
            "pairs": [
                {"secret": key(k), "leakage": json_number(v), "witness_output": _output_json(self.witnesses.get(k))}
                for k, v in self.leakage.items()
            ],
            "skipped": [key(k) for k in self.skipped],
        }


@dataclass
class PowerCurve:
    """Vertices of the exact Neyman-Pearson ROC, from (0, 0) to (1, 1).

    Randomized tests achieve every point on the segments between vertices.
    """

    alpha: np.ndarray
    beta: np.ndarray

    def beta_at(self, alpha) -> np.ndarray | float:
        """Maximal power at level ``alpha`` (upper envelope at repeated levels)."""
        a, idx = np.unique(self.alpha, return_index=True)
        # np.unique keeps the first occurrence; the envelope wants the last (largest beta)
        last = np.r_[idx[1:] - 1, self.alpha.size - 1]
        out = np.interp(alpha, a, self.beta[last])
        return float(out) if np.ndim(out) == 0 else out

    def max_excess(self, epsilon: float) -> float:
        """max over the curve of beta - e^eps * alpha (attained at a vertex)."""
        return float(np.max(self.beta - math.exp(epsilon) * self.alpha))

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["alpha", "beta"])
        for a, b in zip(self.alpha, self.beta):
            writer.writerow([repr(float(a)), repr(float(b))])
        return out.getvalue()

    def to_json(self) -> dict:
        return {"alpha": [float(a) for a in self.alpha], "beta": [float(b) for b in self.beta]}


# ---------------------------------------------------------------------------
# edge DP


def audit_edge_dp(mech: DiscreteMechanism, n: int | None = None) -> DpReport:
    """Exhaustive realized edge-DP loss of a discrete mechanism."""
    n = mech.n if n is None else n
    if n != mech.n:
        raise InputError(f"mechanism is defined on n={mech.n}, audit requested for n={n}")
    check_cap(n)
    L = mech.log_pmf_matrix()
    codes = np.arange(graph_count(n))
    m = num_edges(n)
    best, witness = 0.0, None
    for k in range(m):
        bit = 1 << (m - 1 - k)
        lower = codes[(codes & bit) == 0]
        value, where = _sup(_abs_log_ratio(L[lower], L[lower | bit]))
        if where is not None and (witness is None or value > best):
            best = value
            g = Graph(n, int(lower[where[0]]))
            witness = (g, Graph(n, g.code | bit), mech.alphabet[where[1]])
    return DpReport(best, witness, nominal_epsilon=mech.nominal_epsilon)


_GRID_BLOCK = 1 << 22  # float64 entries per block of the count x grid table


def audit_edge_dp_grid(mech: LaplaceEdgeCount, n: int, grid: GridSpec | None = None) -> DpReport:
    """Grid lower bound on the realized edge-DP loss of the Laplace edge count.

    Neighboring graphs have edge counts k and k+1 for some k, so it suffices
    to compare consecutive counts.
    """
    grid = GridSpec.default(mech.epsilon, n) if grid is None else grid
    y = grid.values()
    m = num_edges(n)
    if m == 0:
        return DpReport(0.0, None, grid_based=True, nominal_epsilon=mech.epsilon,
                        analytic_bound=mech.epsilon)
    # Laplace densities never vanish and share the normalizing constant, so the
    # log ratio of counts k and k+1 is eps * (|y - k - 1| - |y - k|).  Counts are
    # walked in blocks so memory stays bounded for large n.
    block = max(1, _GRID_BLOCK // y.size)
    value, where = 0.0, None
    for start in range(0, m, block):
        stop = min(m, start + block)
        dist = np.abs(y[None, :] - np.arange(start, stop + 1, dtype=float)[:, None])
        r = np.subtract(dist[:-1], dist[1:], out=dist[:-1])
        np.abs(r, out=r)
        r *= mech.epsilon
        v, w = _sup(r)
        if w is not None and (where is None or v > value):
            value, where = v, (start + w[0], w[1])
    witness = None
    if where is not None:
        k = int(where[0])
        g = Graph(n, ((1 << k) - 1) << (m - k))  # first k edges in lexicographic order
        h = Graph(n, ((1 << (k + 1)) - 1) << (m - k - 1))
        witness = (g, h, float(y[where[1]]))
    return DpReport(value, witness, grid_based=True, nominal_epsilon=mech.epsilon,
                    analytic_bound=mech.epsilon)


# ---------------------------------------------------------------------------
# secrets and conditional output laws


@dataclass(frozen=True)
class EdgeSecret:
    """sigma_e (edge present) or its negation."""

    edge: EdgeIndex
    present: bool = True

    def mask(self, n: int) -> np.ndarray:
        col = all_bits(n)[:, self.edge.position(n)].astype(bool)
        return col if self.present else ~col


@dataclass(frozen=True)
class GraphSecret:
    """The whole database equals ``graph``."""

    graph: Graph

    def mask(self, n: int) -> np.ndarray:
        out = np.zeros(graph_count(n), dtype=bool)
        out[self.graph.code] = True
        return out


class OutputLaws:
    """Caches a mechanism's per-graph log-law so mixtures are cheap to form.

    Discrete mechanisms contribute a (graphs x outputs) table.  The Laplace
    edge count is evaluated on a grid and depends on the graph only through
    its edge count, so it is stored as a (counts x grid) table.
    """

    def __init__(self, mech, n: int, grid: GridSpec | None = None):
        check_cap(n)
        self.n = n
        self.mech = mech
        if isinstance(mech, LaplaceEdgeCount):
            self.grid = GridSpec.default(mech.epsilon, n) if grid is None else grid
            self.outputs = self.grid.values()
            counts = np.arange(num_edges(n) + 1)
            self._table = mech.log_density_at_count(counts[:, None], self.outputs[None, :])
            self._row_of = edge_counts(n)
            self.grid_based = True
        elif isinstance(mech, DiscreteMechanism):
            if mech.n != n:
                raise InputError(f"mechanism is defined on n={mech.n}, distribution on n={n}")
            self.grid = None
            self.outputs = mech.alphabet
            self._table = mech.log_pmf_matrix()
            self._row_of = np.arange(graph_count(n))
            self.grid_based = False
        else:
            raise InputError(f"cannot audit mechanism of type {type(mech).__name__}")

    def log_law(self, dist: ExactDistribution) -> np.ndarray:
        """log of sum_g Pr(M(g) = w) Pr(G = g) for every output w."""
        lp = dist.log_probs
        support = np.flatnonzero(np.isfinite(lp))
        rows = self._row_of[support]
        # collapse graphs that share a table row (e.g. equal edge counts)
        uniq, inv = np.unique(rows, return_inverse=True)
        weights = np.full(uniq.size, -np.inf)
        for r in range(uniq.size):
            weights[r] = logsumexp(lp[support[inv == r]])
        return logsumexp(weights[:, None] + self._table[uniq], axis=0)


def output_law_given_secret(mech, dist: ExactDistribution, secret, grid: GridSpec | None = None,
                            *, laws: OutputLaws | None = None, log: bool = False) -> np.ndarray:
    """Output law of ``mech`` when G is drawn from ``dist`` conditioned on ``secret``.

    ``secret`` is an :class:`EdgeSecret`, a :class:`GraphSecret`, or an edge
    (meaning "edge present").  Grid-based laws are densities on the grid.
    """
    laws = OutputLaws(mech, dist.n, grid) if laws is None else laws
    secret = _as_secret(secret)
    cond = dist.condition(secret.mask(dist.n))
    out = laws.log_law(cond)
    return out if log else np.exp(out)


def _as_secret(s):
    if isinstance(s, (EdgeSecret, GraphSecret)):
        return s
    if isinstance(s, Graph):
        return GraphSecret(s)
    return EdgeSecret(as_edge(s), True)


def audit_pufferfish(mech, dist: ExactDistribution, pairs: Sequence[tuple], grid: GridSpec | None = None,
                     *, labels: Sequence[Hashable] | None = None,
                     laws: OutputLaws | None = None) -> PufferfishReport:
    """Realized Pufferfish leakage for arbitrary discriminative secret pairs."""
    laws = OutputLaws(mech, dist.n, grid) if laws is None else laws
    labels = list(range(len(pairs))) if labels is None else list(labels)
    leakage, witnesses, skipped = {}, {}, []
    for label, (s0, s1) in zip(labels, pairs):
        s0, s1 = _as_secret(s0), _as_secret(s1)
        m0, m1 = s0.mask(dist.n), s1.mask(dist.n)
        if dist.log_mass(m0) == -np.inf or dist.log_mass(m1) == -np.inf:
            skipped.append(label)
            continue
        l0 = laws.log_law(dist.condition(m0))
        l1 = laws.log_law(dist.condition(m1))
        value, where = _sup(_abs_log_ratio(l0, l1))
        leakage[label] = value
        witnesses[label] = None if where is None else laws.outputs[where[0]]
    return PufferfishReport(leakage, witnesses, skipped, grid_based=laws.grid_based)


def audit_pufferfish_edges(mech, dist: ExactDistribution, grid: GridSpec | None = None,
                           *, laws: OutputLaws | None = None) -> PufferfishReport:
    """Leakage for every edge secret pair (sigma_e, not sigma_e).

    Edges whose presence has probability 0 or 1 are reported as skipped.
    """
    edges = edge_list(dist.n)
    pairs = [(EdgeSecret(e, True), EdgeSecret(e, False)) for e in edges]
    return audit_pufferfish(mech, dist, pairs, grid, labels=edges, laws=laws)


# ---------------------------------------------------------------------------
# hypothesis tests


def power_curve(law0, law1) -> PowerCurve:
    """Exact ROC of the most powerful randomized tests of law0 (H0) vs law1 (H1).

    Outputs are sorted by decreasing likelihood ratio law1/law0; outputs with
    tied ratios are merged into one step, and randomizing between adjacent
    thresholds fills in the segments between vertices.
    """
    p0 = np.asarray(law0, dtype=float)
    p1 = np.asarray(law1, dtype=float)
    if p0.shape != p1.shape or p0.ndim != 1:
        raise InputError(f"laws must be vectors over the same alphabet, got {p0.shape} and {p1.shape}")
    if np.any(p0 < 0) or np.any(p1 < 0):
        raise InputError("laws must be nonnegative")
    keep = (p0 > 0) | (p1 > 0)
    p0, p1 = p0[keep], p1[keep]
    with np.errstate(divide="ignore"):
        ratio = np.where(p0 > 0, p1 / np.where(p0 > 0, p0, 1.0), np.inf)
    uniq, inv = np.unique(-ratio, return_inverse=True)  # ascending in -ratio = descending ratio
    a_steps = np.bincount(inv, weights=p0, minlength=uniq.size)
    b_steps = np.bincount(inv, weights=p1, minlength=uniq.size)
    alpha = np.r_[0.0, np.cumsum(a_steps) / p0.sum()]
    beta = np.r_[0.0, np.cumsum(b_steps) / p1.sum()]
    alpha[-1] = beta[-1] = 1.0
    return PowerCurve(alpha, beta)


def neighbor_power_curves(mech: DiscreteMechanism) -> list[tuple[Graph, Graph, PowerCurve]]:
    """Power curves for H0: G = g vs H1: G = g' over every ordered neighbor pair."""
    check_cap(mech.n)
    P = mech.pmf_matrix()
    m = num_edges(mech.n)
    out = []
    for code in range(graph_count(mech.n)):
        for k in range(m):
            other = code ^ (1 << (m - 1 - k))
            out.append((Graph(mech.n, code), Graph(mech.n, other), power_curve(P[code], P[other])))
    return out


# ---------------------------------------------------------------------------
# dependence slack


@dataclass
class Lemma6Result:
    """Outcome of checking the conditional-law closeness condition at slack ``alpha``."""

    holds: bool
    alpha: float
    min_alpha: float
    witness: tuple[Graph, EdgeIndex] | None
    per_edge: dict[EdgeIndex, float] = field(default_factory=dict)
    skipped: list[EdgeIndex] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "alpha": json_number(self.alpha),
            "min_alpha": json_number(self.min_alpha),
            "witness": None if self.witness is None else {
                "graph": self.witness[0].to_json(), "edge": self.witness[1].to_list()},
            "per_edge": [{"edge": e.to_list(), "alpha": json_number(v)} for e, v in self.per_edge.items()],
            "skipped": [e.to_list() for e in self.skipped],
        }


def verify_lemma6_condition(dist: ExactDistribution, alpha: float = 0.0, *, tol: float = 1e-12) -> Lemma6Result:
    """Check that Pr(G = g+e | e in E) and Pr(G = g-e | e not in E) are within
    a factor e^alpha for every graph g and edge e.

    ``tol`` absorbs floating-point noise in the comparison.  Also returns the
    smallest feasible alpha (possibly ``inf``) and the
    (graph, edge) attaining it; the witness graph is reported with ``e`` present.
    """
    n = dist.n
    m = num_edges(n)
    lp = dist.log_probs
    codes = np.arange(graph_count(n))
    best, witness = 0.0, None
    per_edge, skipped = {}, []
    for k, e in enumerate(edge_list(n)):
        bit = 1 << (m - 1 - k)
        on = codes[(codes & bit) != 0]
        off = on ^ bit
        log_on = logsumexp(lp[on])
        log_off = logsumexp(lp[off])
        if not (np.isfinite(log_on) and np.isfinite(log_off)):
            skipped.append(e)
            continue
        value, where = _sup(_abs_log_ratio(lp[on] - log_on, lp[off] - log_off))
        per_edge[e] = value
        if where is not None and (witness is None or value > best):
            best = value
            witness = (Graph(n, int(on[where[0]])), e)
    return Lemma6Result(best <= alpha + tol, alpha, best, witness, per_edge, skipped)


# ---------------------------------------------------------------------------
# DP as Pufferfish


@dataclass
class Cor4Result:
    """Agreement between realized edge-DP loss and complete-database Pufferfish leakage."""

    agree: bool
    dp_epsilon: float
    pufferfish_epsilon: float
    witness: tuple[Graph, Graph] | None = None

    def __bool__(self) -> bool:
        return self.agree


def _close(a: float, b: float, tol: float) -> bool:
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= tol


def crosscheck_cor4(mech: DiscreteMechanism, n: int | None = None, *, tol: float = 1e-9) -> Cor4Result:
    """Compare audit_edge_dp with the Pufferfish leakage of complete-database
    secrets under the two-point law {g0: 1/2, g1: 1/2}, maximized over all
    neighbor pairs."""
    n = mech.n if n is None else n
    dp = audit_edge_dp(mech, n)
    laws = OutputLaws(mech, n)
    m = num_edges(n)
    best, witness = 0.0, None
    for code in range(graph_count(n)):
        g0 = Graph(n, code)
        for k in range(m):
            bit = 1 << (m - 1 - k)
            if code & bit:
                continue
            g1 = Graph(n, code | bit)
            dist = ExactDistribution.from_table(n, {g0: 0.5, g1: 0.5})
            rep = audit_pufferfish(mech, dist, [(GraphSecret(g0), GraphSecret(g1))], laws=laws)
            value = rep.overall
            if witness is None or value > best:
                best, witness = value, (g0, g1)
    return Cor4Result(_close(best, dp.realized_epsilon, tol), dp.realized_epsilon, best, witness)


def witness_family_leakage(mech: DiscreteMechanism) -> tuple[float, tuple[Graph, Graph] | None]:
    """Sup of edge-secret leakage over the independent-edge two-point laws
    supported on each neighbor pair (the converse construction)."""
    n = mech.n
    laws = OutputLaws(mech, n)
    m = num_edges(n)
    best, witness = 0.0, None
    for code in range(graph_count(n)):
        for k in range(m):
            bit = 1 << (m - 1 - k)
            if code & bit:
                continue
            g0, g1 = Graph(n, code), Graph(n, code | bit)
            dist = exact_from_independent(witness_two_point(g0, g1))
            e = edge_list(n)[k]
            rep = audit_pufferfish(mech, dist, [(EdgeSecret(e, True), EdgeSecret(e, False))], laws=laws)
            if witness is None or rep.overall > best:
                best, witness = rep.overall, (g0, g1)
    return best, witness
