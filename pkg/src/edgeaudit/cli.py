"""``edgeaudit`` command line.

Every subcommand reads one JSON config (``--config``), writes a JSON report
(``--out``, stdout when omitted) and, for tabular results, a CSV next to it
with the same stem.  Reports embed the fully resolved config.

Exit codes: 0 success, 1 internal error, 2 usage/schema error, 3 capacity.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .attacks import accuracy_vs_n_sweep, sweep_to_csv
from .audit import (
    audit_edge_dp,
    audit_edge_dp_grid,
    audit_pufferfish_edges,
    power_curve,
    output_law_given_secret,
    EdgeSecret,
    OutputLaws,
    verify_lemma6_condition,
)
from .config import (
    distribution_from_config,
    distribution_to_config,
    ergm_from_config,
    grid_from_config,
    grid_to_config,
    mechanism_from_config,
    mechanism_to_config,
)
from .distributions import to_exact
from .ergm import compute_alpha
from .errors import CapacityError, InputError
from .graphs import Graph, as_edge
from .mechanisms import LaplaceEdgeCount

SCHEMA_VERSION = 1
COMMANDS = ("audit-dp", "audit-pufferfish", "lemma6", "ergm-alpha", "attack-queens", "power-curve")
STOCHASTIC = {"attack-queens"}


class UsageError(InputError):
    pass


def _need(cfg: dict, key: str):
    if key not in cfg:
        raise UsageError(f"config is missing required key {key!r}")
    return cfg[key]


def _cmd_audit_dp(cfg, args):
    mech = mechanism_from_config(_need(cfg, "mechanism"), cfg.get("n"))
    if isinstance(mech, LaplaceEdgeCount):
        n = _need(cfg, "n")
        grid = grid_from_config(cfg.get("grid"), mech.epsilon, n, args.grid_points)
        report = audit_edge_dp_grid(mech, n, grid)
        resolved = {"mechanism": mechanism_to_config(mech), "n": n, "grid": grid_to_config(grid)}
    else:
        report = audit_edge_dp(mech)
        resolved = {"mechanism": mechanism_to_config(mech), "n": mech.n}
    return resolved, report.to_json(), None


def _dist_and_grid(cfg, args):
    model = distribution_from_config(_need(cfg, "distribution"))
    dist = to_exact(model)
    mech = mechanism_from_config(_need(cfg, "mechanism"), dist.n)
    grid = None
    if isinstance(mech, LaplaceEdgeCount):
        grid = grid_from_config(cfg.get("grid"), mech.epsilon, dist.n, args.grid_points)
    resolved = {"mechanism": mechanism_to_config(mech), "distribution": distribution_to_config(model)}
    if grid is not None:
        resolved["grid"] = grid_to_config(grid)
    return mech, dist, grid, resolved


def _cmd_audit_pufferfish(cfg, args):
    mech, dist, grid, resolved = _dist_and_grid(cfg, args)
    return resolved, audit_pufferfish_edges(mech, dist, grid).to_json(), None


def _cmd_lemma6(cfg, args):
    model = distribution_from_config(_need(cfg, "distribution"))
    alpha = float(cfg.get("alpha", 0.0))
    result = verify_lemma6_condition(to_exact(model), alpha)
    return {"distribution": distribution_to_config(model), "alpha": alpha}, result.to_json(), None


def _cmd_ergm_alpha(cfg, args):
    raw = cfg.get("models")
    if raw is None:
        raw = [_need(cfg, "model")]
    if not isinstance(raw, list) or not raw:
        raise UsageError("'models' must be a non-empty list of ergm configs")
    models = [ergm_from_config(m) for m in raw]
    return {"models": [m.to_json() for m in models]}, compute_alpha(models).to_json(), None


def _cmd_attack_queens(cfg, args):
    n_list = cfg.get("n_list")
    if n_list is None:
        n_list = [_need(cfg, "n")]
    a, b = float(_need(cfg, "a")), float(_need(cfg, "b"))
    q = float(cfg.get("q", 0.5))
    eps = float(_need(cfg, "epsilon"))
    trials = int(_need(cfg, "trials"))
    rows = accuracy_vs_n_sweep(a, b, q, eps, n_list, trials, args.seed, threads=args.threads)
    resolved = {"a": a, "b": b, "q": q, "epsilon": eps, "n_list": list(n_list), "trials": trials}
    return resolved, {"rows": [r.to_json() for r in rows]}, sweep_to_csv(rows)


def _cmd_power_curve(cfg, args):
    if "graphs" in cfg:
        g0, g1 = (Graph.from_json(g) for g in cfg["graphs"])
        mech = mechanism_from_config(_need(cfg, "mechanism"), g0.n)
        if isinstance(mech, LaplaceEdgeCount):
            raise UsageError("power curves need a discrete mechanism")
        law0, law1 = mech.pmf(g0), mech.pmf(g1)
        resolved = {"mechanism": mechanism_to_config(mech), "graphs": [g0.to_json(), g1.to_json()]}
    else:
        mech, dist, grid, resolved = _dist_and_grid(cfg, args)
        if grid is not None:
            raise UsageError("power curves need a discrete mechanism")
        e = as_edge(_need(cfg, "edge")).validate(dist.n)
        laws = OutputLaws(mech, dist.n)
        law0 = output_law_given_secret(mech, dist, EdgeSecret(e, False), laws=laws)
        law1 = output_law_given_secret(mech, dist, EdgeSecret(e, True), laws=laws)
        resolved["edge"] = e.to_list()
    curve = power_curve(law0, law1)
    return resolved, curve.to_json(), curve.to_csv()


HANDLERS = {
    "audit-dp": _cmd_audit_dp,
    "audit-pufferfish": _cmd_audit_pufferfish,
    "lemma6": _cmd_lemma6,
    "ergm-alpha": _cmd_ergm_alpha,
    "attack-queens": _cmd_attack_queens,
    "power-curve": _cmd_power_curve,
}


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edgeaudit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path, help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="root seed (unsigned 64-bit)")
        p.add_argument("--out", type=Path, default=None, help="report JSON path (stdout if omitted)")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        p.add_argument("--grid-points", type=int, default=None, help="override grid resolution")
    return parser


def _error(kind: str, message: str, code: int) -> int:
    sys.stderr.write(dumps({"error": kind, "message": message, "exit_code": code}))
    return code


def run(args: argparse.Namespace) -> int:
    try:
        try:
            cfg = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        if args.command in STOCHASTIC and args.seed is None:
            raise UsageError(f"{args.command} is stochastic and requires --seed")
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        resolved, result, table = HANDLERS[args.command](cfg, args)
    except CapacityError as exc:
        return _error("capacity", str(exc), 3)
    except InputError as exc:
        return _error("usage", str(exc), 2)
    except Exception as exc:  # noqa: BLE001 - reported as machine-readable JSON
        return _error("internal", f"{type(exc).__name__}: {exc}", 1)

    report = {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "config": resolved,
        "seed": args.seed,
        "result": result,
    }
    text = dumps(report)
    if args.out is None:
        sys.stdout.write(text)
        if table is not None:
            sys.stdout.write(table)
    else:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text)
        if table is not None:
            args.out.with_suffix(".csv").write_text(table)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    np.seterr(all="ignore")
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
