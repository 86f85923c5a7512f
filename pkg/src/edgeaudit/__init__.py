"""Audit what edge differential privacy actually guarantees on network data.

Exact, enumeration-based audits of edge-DP mechanisms: realized edge-DP loss,
Pufferfish leakage of individual edge secrets under a graph distribution,
optimal-test power curves, and the dependence slack of ERGMs.
"""

__version__ = "0.1.0"

from ._core import BACKEND
from .audit import (
    DpReport,
    PowerCurve,
    PufferfishReport,
    audit_edge_dp,
    audit_edge_dp_grid,
    audit_pufferfish_edges,
    crosscheck_cor4,
    output_law_given_secret,
    power_curve,
    verify_lemma6_condition,
)
from .distributions import (
    ExactDistribution,
    IndependentEdgeModel,
    TwoQueensModel,
    condition_on_secret,
    exact_from_independent,
    exact_from_two_queens,
    sample,
)
from .ergm import ErgmModel, compute_alpha, exact_ergm_distribution, gibbs_sample
from .errors import CapacityError, ConditioningError, EdgeAuditError, InputError
from .graphs import EdgeIndex, Graph, edge_flip, enumerate_graphs, neighbors, symmetric_difference_size
from .mechanisms import LaplaceEdgeCount, RandomizedResponseEdges
from .rng import SeededRng
