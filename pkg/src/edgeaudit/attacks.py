"""Density-threshold attack on the queens' edge of the two-queens hive.

The released statistic is the Laplace-noised edge count divided by C(n, 2).
That release is epsilon-edge DP, yet thresholding it at (a + b) / 2 recovers
whether the queens are linked with accuracy tending to one as n grows.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .distributions import TwoQueensModel
from .errors import InputError
from .mechanisms import LaplaceEdgeCount
from .rng import RngLike, as_seeded

CSV_COLUMNS = ("n", "trials", "accuracy", "mean_density_truth1", "mean_density_truth0", "epsilon", "seed")


@dataclass
class AttackResult:
    n: int
    a: float
    b: float
    q: float
    epsilon: float
    seed: int | None
    trials: int
    accuracy: float
    trials_truth1: int
    trials_truth0: int
    mean_density_truth1: float
    mean_density_truth0: float

    def __post_init__(self):
        if self.trials <= 0 or not 0.0 <= self.accuracy <= 1.0:
            raise InputError("invalid attack result")

    @property
    def standard_error(self) -> float:
        return float(np.sqrt(self.accuracy * (1 - self.accuracy) / self.trials))

    def to_json(self) -> dict:
        out = asdict(self)
        for key in ("mean_density_truth1", "mean_density_truth0"):
            if np.isnan(out[key]):
                out[key] = None
        return out


def threshold(model: TwoQueensModel) -> float:
    return (model.a + model.b) / 2


def queens_attack_trial(model: TwoQueensModel, eps: float, rng: RngLike) -> tuple[bool, bool, float]:
    """Draw a hive, release its noisy density, guess the queens' edge.

    Returns ``(truth, guess, noisy_density)``.
    """
    mech = LaplaceEdgeCount(eps)
    rng = as_seeded(rng)
    truth, g = model.sample_with_truth(rng)
    d = mech.noisy_density(g, rng)
    return truth, bool(d > threshold(model)), d


def queens_attack_experiment(model: TwoQueensModel, eps: float, trials: int, rng: RngLike,
                             threads: int = 1) -> AttackResult:
    """Run ``trials`` independent attacks; trial k uses the k-th child stream of ``rng``."""
    if trials < 1:
        raise InputError(f"trials must be >= 1, got {trials}")
    root = as_seeded(rng)
    streams = root.spawn(trials)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(lambda s: queens_attack_trial(model, eps, s), streams))
    else:
        outcomes = [queens_attack_trial(model, eps, s) for s in streams]
    truth = np.array([o[0] for o in outcomes])
    guess = np.array([o[1] for o in outcomes])
    dens = np.array([o[2] for o in outcomes])
    with np.errstate(invalid="ignore"):
        mean1 = float(dens[truth].mean()) if truth.any() else float("nan")
        mean0 = float(dens[~truth].mean()) if (~truth).any() else float("nan")
    return AttackResult(
        n=model.n, a=model.a, b=model.b, q=model.q, epsilon=eps, seed=root.seed,
        trials=trials, accuracy=float((truth == guess).mean()),
        trials_truth1=int(truth.sum()), trials_truth0=int((~truth).sum()),
        mean_density_truth1=mean1, mean_density_truth0=mean0,
    )


def accuracy_vs_n_sweep(a: float, b: float, q: float, eps: float, n_list: Sequence[int], trials: int,
                        rng: RngLike, threads: int = 1) -> list[AttackResult]:
    """One experiment per vertex count; every n reuses the same root seed."""
    root = as_seeded(rng)
    rows = []
    for n in n_list:
        model = TwoQueensModel(int(n), a, b, q)
        rows.append(queens_attack_experiment(model, eps, trials, root.fresh(), threads=threads))
    return rows


def sweep_to_csv(rows: Sequence[AttackResult]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([r.n, r.trials, repr(r.accuracy), repr(r.mean_density_truth1),
                         repr(r.mean_density_truth0), repr(r.epsilon), r.seed])
    return out.getvalue()
