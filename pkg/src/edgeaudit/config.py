"""JSON model and mechanism configs.

Distributions::

    {"type": "independent", "n": 4, "pi": 0.3}            # or a list, or [[i, j, p], ...]
    {"type": "two_queens", "n": 5, "a": 0.9, "b": 0.1, "q": 0.5}
    {"type": "ergm", "n": 4, "statistics": ["edges", "triangles"], "beta": [-0.5, 0.2]}
    {"type": "table", "n": 3, "probs": {"000": 0.5, "111": 0.5}}

Mechanisms::

    {"type": "laplace_edge_count", "epsilon": 1.0}
    {"type": "rr_edges", "p": 0.25, "n": 4}                # or "epsilon" instead of "p"
    {"type": "constant", "n": 3}
    {"type": "identity", "n": 3}
"""

from __future__ import annotations

from .distributions import ExactDistribution, IndependentEdgeModel, TwoQueensModel
from .ergm import ErgmModel
from .errors import InputError
from .graphs import Graph, num_edges
from .mechanisms import (
    GridSpec,
    LaplaceEdgeCount,
    RandomizedResponseEdges,
    constant_mechanism,
    identity_mechanism,
)


def _get(cfg: dict, key: str, kind=None, default=...):
    if not isinstance(cfg, dict):
        raise InputError(f"expected a JSON object, got {type(cfg).__name__}")
    if key not in cfg:
        if default is ...:
            raise InputError(f"config {cfg.get('type', '')!r} is missing required key {key!r}")
        return default
    value = cfg[key]
    if isinstance(value, bool) and kind in (int, float):
        raise InputError(f"key {key!r} should be {kind.__name__}, got {value!r}")
    if kind is float and isinstance(value, (int, float)):
        return float(value)
    if kind is not None and not isinstance(value, kind):
        raise InputError(f"key {key!r} should be {kind.__name__}, got {value!r}")
    return value


def distribution_from_config(cfg: dict):
    kind = _get(cfg, "type", str)
    n = _get(cfg, "n", int)
    if kind == "independent":
        pi = _get(cfg, "pi", default=0.5)
        if isinstance(pi, list) and pi and isinstance(pi[0], list):
            pi = {(int(i), int(j)): float(p) for i, j, p in pi}
        return IndependentEdgeModel(n, pi)
    if kind == "two_queens":
        return TwoQueensModel(n, _get(cfg, "a", float), _get(cfg, "b", float), _get(cfg, "q", float, 0.5))
    if kind == "ergm":
        return ergm_from_config(cfg)
    if kind == "table":
        probs = _get(cfg, "probs", dict)
        return ExactDistribution.from_table(n, {Graph.from_bitstring(n, k): float(v) for k, v in probs.items()})
    raise InputError(f"unknown distribution type {kind!r}")


def ergm_from_config(cfg: dict) -> ErgmModel:
    if cfg.get("type", "ergm") != "ergm":
        raise InputError(f"expected an ergm config, got type {cfg.get('type')!r}")
    return ErgmModel(_get(cfg, "n", int), tuple(_get(cfg, "statistics", list)), tuple(_get(cfg, "beta", list)))


def distribution_to_config(dist) -> dict:
    if isinstance(dist, IndependentEdgeModel):
        return {"type": "independent", "n": dist.n, "pi": [float(p) for p in dist.pi]}
    if isinstance(dist, TwoQueensModel):
        return {"type": "two_queens", "n": dist.n, "a": dist.a, "b": dist.b, "q": dist.q}
    if isinstance(dist, ErgmModel):
        return dist.to_json()
    if isinstance(dist, ExactDistribution):
        m = num_edges(dist.n)
        return {"type": "table", "n": dist.n,
                "probs": {format(g.code, f"0{m}b"): dist.prob(g) for g in dist.support()}}
    raise InputError(f"cannot serialize {type(dist).__name__}")


def mechanism_from_config(cfg: dict, n: int | None = None):
    kind = _get(cfg, "type", str)
    if kind == "laplace_edge_count":
        return LaplaceEdgeCount(_get(cfg, "epsilon", float))
    n = _get(cfg, "n", int, n)
    if n is None:
        raise InputError(f"mechanism {kind!r} needs 'n'")
    if kind == "rr_edges":
        if "p" in cfg:
            return RandomizedResponseEdges(n, _get(cfg, "p", float))
        return RandomizedResponseEdges.from_epsilon(n, _get(cfg, "epsilon", float))
    if kind == "constant":
        return constant_mechanism(n)
    if kind == "identity":
        return identity_mechanism(n)
    raise InputError(f"unknown mechanism type {kind!r}")


def mechanism_to_config(mech) -> dict:
    if isinstance(mech, LaplaceEdgeCount):
        return {"type": "laplace_edge_count", "epsilon": mech.epsilon}
    if isinstance(mech, RandomizedResponseEdges):
        return {"type": "rr_edges", "n": mech.n, "p": mech.p}
    kind = getattr(mech, "kind", None)
    if kind not in ("constant", "identity"):
        raise InputError(f"cannot serialize mechanism {mech!r}")
    return {"type": kind, "n": mech.n}


def grid_from_config(cfg: dict | None, epsilon: float, n: int, points: int | None = None) -> GridSpec:
    if cfg is None:
        grid = GridSpec.default(epsilon, n)
    else:
        grid = GridSpec(_get(cfg, "lo", float), _get(cfg, "hi", float), _get(cfg, "points", int, 100_000))
    if points is not None:
        grid = GridSpec(grid.lo, grid.hi, points)
    return grid


def grid_to_config(grid: GridSpec) -> dict:
    return {"lo": grid.lo, "hi": grid.hi, "points": grid.points}

