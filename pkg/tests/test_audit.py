import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from edgeaudit.audit import (
    EdgeSecret,
    GraphSecret,
    OutputLaws,
    audit_edge_dp,
    audit_edge_dp_grid,
    audit_pufferfish,
    audit_pufferfish_edges,
    crosscheck_cor4,
    json_number,
    neighbor_power_curves,
    output_law_given_secret,
    power_curve,
    verify_lemma6_condition,
    witness_family_leakage,
)
from edgeaudit.distributions import (
    ExactDistribution,
    IndependentEdgeModel,
    TwoQueensModel,
    exact_from_independent,
    exact_from_two_queens,
    random_independent_model,
)
from edgeaudit.graphs import EdgeIndex, Graph, enumerate_graphs, neighbors, symmetric_difference_size
from edgeaudit.mechanisms import (
    GridSpec,
    LaplaceEdgeCount,
    RandomizedResponseEdges,
    constant_mechanism,
    identity_mechanism,
    post_process,
)
from edgeaudit.rng import SeededRng

Q = EdgeIndex(1, 2)


def queens_prob(g, a, b, q):
    """Two-queens law written out by hand: mixture over the queens' link."""
    total = 0.0
    for linked, w in ((True, q), (False, 1 - q)):
        if g.has_edge((1, 2)) != linked:
            continue
        r = a if linked else b
        prod = w
        for (i, j) in itertools.combinations(range(1, g.n + 1), 2):
            if (i, j) == (1, 2):
                continue
            prod *= r if g.has_edge((i, j)) else 1 - r
        total += prod
    return total


def rr_prob(g, h, p):
    d = symmetric_difference_size(g, h)
    return p**d * (1 - p) ** (g.width - d)


# ---- edge DP


def test_rr_audit_matches_log_odds():
    for p in (0.1, 0.3, 0.45):
        rep = audit_edge_dp(RandomizedResponseEdges(3, p))
        assert rep.realized_epsilon == pytest.approx(math.log((1 - p) / p), abs=1e-12)
        g, h, _ = rep.witness
        assert symmetric_difference_size(g, h) == 1


def test_constant_and_identity_audits():
    assert audit_edge_dp(constant_mechanism(3, [0.3, 0.7])).realized_epsilon == 0.0
    rep = audit_edge_dp(identity_mechanism(3))
    assert rep.unbounded
    assert rep.to_json()["realized_epsilon"] == "unbounded"
    json.dumps(rep.to_json(), allow_nan=False)


@pytest.mark.parametrize("eps", [1.0, 0.1])
def test_laplace_grid_audit(eps):
    rep = audit_edge_dp_grid(LaplaceEdgeCount(eps), 4)
    assert rep.grid_based
    assert rep.realized_epsilon == pytest.approx(eps, abs=1e-6)
    assert rep.realized_epsilon <= eps + 1e-6
    g, h, _ = rep.witness
    assert symmetric_difference_size(g, h) == 1


def test_grid_audit_matches_explicit_neighbor_densities():
    mech = LaplaceEdgeCount(0.8)
    grid = GridSpec(-10, 15, 2001)
    y = grid.values()
    oracle = 0.0
    for g in enumerate_graphs(4):
        for h in neighbors(g):
            oracle = max(oracle, np.max(np.abs(mech.log_density(g, y) - mech.log_density(h, y))))
    assert audit_edge_dp_grid(mech, 4, grid).realized_epsilon == pytest.approx(oracle, abs=1e-12)


def test_json_number():
    assert json_number(math.inf) == "unbounded"
    assert json_number(0.5) == 0.5


# ---- output laws


def test_output_law_matches_joint_enumeration():
    a, b, q, p = 0.9, 0.1, 0.5, 0.3
    n = 4
    mech = RandomizedResponseEdges(n, p)
    dist = exact_from_two_queens(TwoQueensModel(n, a, b, q))
    graphs = list(enumerate_graphs(n))
    for present in (True, False):
        law = output_law_given_secret(mech, dist, EdgeSecret(Q, present))
        mass = sum(queens_prob(g, a, b, q) for g in graphs if g.has_edge((1, 2)) == present)
        for w in graphs:
            joint = sum(queens_prob(g, a, b, q) * rr_prob(g, w, p)
                        for g in graphs if g.has_edge((1, 2)) == present)
            assert law[w.code] == pytest.approx(joint / mass, abs=1e-12)


def test_laplace_law_is_count_mixture():
    mech = LaplaceEdgeCount(0.7)
    n = 3
    dist = exact_from_independent(IndependentEdgeModel(n, [0.2, 0.5, 0.9]))
    grid = GridSpec(-5, 8, 101)
    law = output_law_given_secret(mech, dist, EdgeSecret(EdgeIndex(1, 3), False), grid)
    y = grid.values()
    # conditioning on edge (1,3) absent leaves edges (1,2), (2,3) independent
    expected = np.zeros_like(y)
    for b12, b23 in itertools.product((0, 1), repeat=2):
        w = (0.2 if b12 else 0.8) * (0.9 if b23 else 0.1)
        expected += w * 0.35 * np.exp(-0.7 * np.abs(y - (b12 + b23)))
    np.testing.assert_allclose(law, expected, rtol=1e-12)


# ---- Pufferfish


def test_independent_edges_leakage_bounded():
    mech = RandomizedResponseEdges.from_epsilon(4, 0.5)
    laws = OutputLaws(mech, 4)
    rng = SeededRng(2024)
    for _ in range(5):
        dist = exact_from_independent(random_independent_model(4, rng))
        assert audit_pufferfish_edges(mech, dist, laws=laws).overall <= 0.5 + 1e-9


def test_witness_family_attains_epsilon():
    mech = RandomizedResponseEdges.from_epsilon(3, 0.5)
    best, (g0, g1) = witness_family_leakage(mech)
    assert best == pytest.approx(0.5, abs=1e-9)
    assert symmetric_difference_size(g0, g1) == 1


def test_deterministic_edges_are_skipped():
    mech = RandomizedResponseEdges(3, 0.2)
    dist = exact_from_independent(IndependentEdgeModel(3, [1.0, 0.5, 0.0]))
    rep = audit_pufferfish_edges(mech, dist)
    assert rep.skipped == [EdgeIndex(1, 2), EdgeIndex(2, 3)]
    assert list(rep.leakage) == [EdgeIndex(1, 3)]
    json.dumps(rep.to_json(), allow_nan=False)


def test_two_queens_laplace_leaks_more_than_epsilon():
    eps = 0.5
    dist = exact_from_two_queens(TwoQueensModel(5, 0.9, 0.1, 0.5))
    rep = audit_pufferfish(LaplaceEdgeCount(eps), dist, [(EdgeSecret(Q, True), EdgeSecret(Q, False))])
    assert rep.grid_based
    assert rep.overall > eps


def test_two_queens_rr_closed_form():
    # leakage is maximized at the all-ones / all-zeros output, where the product
    # over the nine non-queen edges gives a closed form
    eps, a, b = 0.5, 0.9, 0.1
    mech = RandomizedResponseEdges.from_epsilon(5, eps)
    dist = exact_from_two_queens(TwoQueensModel(5, a, b, 0.5))
    rep = audit_pufferfish(mech, dist, [(EdgeSecret(Q, True), EdgeSecret(Q, False))])
    r = math.exp(eps)
    expected = eps + 9 * math.log((a * r + 1 - a) / (b * r + 1 - b))
    assert rep.overall == pytest.approx(expected, abs=1e-9)


def test_post_processing_cannot_increase_leakage():
    mech = RandomizedResponseEdges(4, 0.25)
    dist = exact_from_two_queens(TwoQueensModel(4, 0.8, 0.3, 0.4))
    coarse = post_process(mech, lambda h: h.edge_count())
    fine = audit_pufferfish_edges(mech, dist)
    merged = audit_pufferfish_edges(coarse, dist)
    for e, v in merged.leakage.items():
        assert v <= fine.leakage[e] + 1e-12


@settings(max_examples=15, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.0, 0.95), st.floats(0.1, 0.9), st.floats(0.1, 2.0))
def test_leakage_within_eps_plus_alpha(a, frac, q, eps):
    b = a * frac
    dist = exact_from_two_queens(TwoQueensModel(4, a, b, q))
    mech = RandomizedResponseEdges.from_epsilon(4, eps)
    alpha = verify_lemma6_condition(dist).min_alpha
    rep = audit_pufferfish_edges(mech, dist)
    assert rep.overall <= eps + alpha + 1e-9


def test_graph_secrets_reduce_to_mechanism_ratio():
    mech = RandomizedResponseEdges(3, 0.3)
    g0, g1 = Graph.from_edges(3, [(1, 2)]), Graph.from_edges(3, [(1, 2), (2, 3)])
    dist = ExactDistribution.from_table(3, {g0: 0.2, g1: 0.3, Graph.empty(3): 0.5})
    rep = audit_pufferfish(mech, dist, [(GraphSecret(g0), GraphSecret(g1))])
    assert rep.overall == pytest.approx(math.log(7 / 3), abs=1e-12)


# ---- power curves


def test_identical_laws_give_diagonal():
    law = np.array([0.1, 0.4, 0.5])
    curve = power_curve(law, law)
    grid = np.linspace(0, 1, 11)
    np.testing.assert_allclose(curve.beta_at(grid), grid, atol=1e-12)


def test_disjoint_supports_give_perfect_test():
    curve = power_curve([0.5, 0.5, 0, 0], [0, 0, 0.3, 0.7])
    assert curve.beta_at(0.0) == 1.0


def test_rr_neighbor_curves_respect_dp_bound():
    eps = 1.0
    for g, h, curve in neighbor_power_curves(RandomizedResponseEdges.from_epsilon(3, eps)):
        assert curve.max_excess(eps) <= 1e-9
        assert np.all(np.diff(curve.alpha) >= 0) and np.all(np.diff(curve.beta) >= 0)


def test_curve_symmetry_under_swapping_hypotheses():
    rng = np.random.default_rng(5)
    p0, p1 = rng.dirichlet(np.ones(6)), rng.dirichlet(np.ones(6))
    fwd, back = power_curve(p0, p1), power_curve(p1, p0)
    # the optimal tests for the swapped problem are the complements
    a = np.linspace(0, 1, 41)
    np.testing.assert_allclose(back.beta_at(a), 1 - np.interp(1 - a, fwd.beta, fwd.alpha), atol=1e-12)


def test_power_curve_bruteforce_vertices():
    # every deterministic test's (alpha, beta) lies on or under the curve
    p0 = np.array([0.1, 0.2, 0.3, 0.4])
    p1 = np.array([0.4, 0.3, 0.2, 0.1])
    curve = power_curve(p0, p1)
    for mask in itertools.product((0, 1), repeat=4):
        m = np.array(mask, dtype=bool)
        assert p1[m].sum() <= curve.beta_at(p0[m].sum()) + 1e-12
    assert curve.to_csv().splitlines()[0] == "alpha,beta"


# ---- dependence slack


def test_slack_of_independent_law_is_zero():
    dist = exact_from_independent(IndependentEdgeModel(4, 0.3))
    res = verify_lemma6_condition(dist)
    assert res.holds and res.min_alpha == pytest.approx(0.0, abs=1e-12)


def test_slack_of_two_queens():
    dist = exact_from_two_queens(TwoQueensModel(4, 0.9, 0.1, 0.5))
    res = verify_lemma6_condition(dist, alpha=1.0)
    assert not res
    # conditioning on the queens' edge swaps a for b on the other five edges
    assert res.per_edge[Q] == pytest.approx(5 * math.log(9), abs=1e-9)
    assert res.min_alpha == pytest.approx(5 * math.log(9), abs=1e-9)
    assert res.witness[1] == Q and res.witness[0].has_edge((1, 2))
    assert verify_lemma6_condition(dist, alpha=11.0).holds


def test_slack_unbounded_when_support_differs():
    g = Graph.from_edges(3, [(1, 2)])
    dist = ExactDistribution.from_table(3, {g: 0.5, Graph.empty(3): 0.25, Graph.complete(3): 0.25})
    res = verify_lemma6_condition(dist)
    assert res.min_alpha == math.inf
    assert res.to_json()["min_alpha"] == "unbounded"


# ---- DP as Pufferfish


@pytest.mark.parametrize("mech, expected", [
    (RandomizedResponseEdges(3, 0.3), math.log(7 / 3)),
    (constant_mechanism(3), 0.0),
    (identity_mechanism(3), math.inf),
])
def test_dp_matches_complete_database_secrets(mech, expected):
    res = crosscheck_cor4(mech)
    assert res
    if math.isinf(expected):
        assert res.dp_epsilon == res.pufferfish_epsilon == math.inf
    else:
        assert res.dp_epsilon == pytest.approx(expected, abs=1e-9)
