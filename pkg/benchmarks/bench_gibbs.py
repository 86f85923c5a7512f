"""Compare the compiled and numpy Gibbs sweep kernels.

    python benchmarks/bench_gibbs.py [--repeat 3]

Both kernels are fed the same uniforms, so the final states are also checked
for equality.  Two regimes are timed: many chains on a small graph (the
sampler-fidelity workload) and a single chain on a larger graph.
"""

import argparse
import time

import numpy as np

from edgeaudit._core import _fallback
from edgeaudit.ergm import ErgmModel, GibbsChains

try:
    from edgeaudit._core import _gibbs
except ImportError:  # extension not built
    _gibbs = None

CASES = [
    ("n=4, 10000 chains, 200 sweeps", ErgmModel(4, ("edges", "triangles"), (-0.5, 0.2)), 10_000, 200),
    ("n=30, 100 chains, 50 sweeps", ErgmModel(30, ("edges", "two_stars", "triangles"), (-2.0, 0.01, 0.1)), 100, 50),
    ("n=60, 1 chain, 50 sweeps", ErgmModel(60, ("edges", "two_stars", "triangles"), (-2.0, 0.01, 0.1)), 1, 50),
]


def run(model, chains, sweeps, kernel, seed=0):
    batch = GibbsChains(model, chains, seed, sweep=kernel)
    start = time.perf_counter()
    batch.step(sweeps)
    return time.perf_counter() - start, batch.adj


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if _gibbs is None:
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation` first")

    print(f"{'case':34s} {'compiled':>10s} {'numpy':>10s} {'speedup':>8s}  same")
    for label, model, chains, sweeps in CASES:
        fast = [run(model, chains, sweeps, _gibbs.gibbs_sweep) for _ in range(args.repeat)]
        slow = [run(model, chains, sweeps, _fallback.gibbs_sweep) for _ in range(args.repeat)]
        t_fast = min(t for t, _ in fast)
        t_slow = min(t for t, _ in slow)
        same = np.array_equal(fast[0][1], slow[0][1])
        print(f"{label:34s} {t_fast:9.3f}s {t_slow:9.3f}s {t_slow / t_fast:7.1f}x  {same}")


if __name__ == "__main__":
    main()
