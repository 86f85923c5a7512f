import os
import subprocess
import sys

import numpy as np
import pytest

from edgeaudit import _core
from edgeaudit._core import _fallback
from edgeaudit.ergm import ErgmModel, GibbsChains

compiled = pytest.importorskip("edgeaudit._core._gibbs")

MODELS = [
    ErgmModel(4, ("edges", "triangles"), (-0.5, 0.2)),
    ErgmModel(7, ("edges", "two_stars", "triangles"), (-1.0, 0.15, 0.4)),
    ErgmModel(12, ("edges", "two_stars"), (0.3, -0.2)),
]


@pytest.mark.parametrize("model", MODELS, ids=lambda m: f"n{m.n}")
def test_compiled_matches_fallback_bitwise(model):
    a = GibbsChains(model, 64, 42, sweep=compiled.gibbs_sweep)
    b = GibbsChains(model, 64, 42, sweep=_fallback.gibbs_sweep)
    np.testing.assert_array_equal(a.adj, b.adj)
    for _ in range(5):
        a.step(3)
        b.step(3)
        np.testing.assert_array_equal(a.adj, b.adj)
    assert np.array_equal(a.adj, a.adj.transpose(0, 2, 1))
    assert not a.adj[:, np.arange(model.n), np.arange(model.n)].any()


def test_default_backend_is_compiled():
    if os.environ.get("EDGEAUDIT_PURE_PYTHON", "") in ("", "0"):
        assert _core.BACKEND == "cython"


def test_env_var_forces_fallback():
    code = "from edgeaudit._core import BACKEND; print(BACKEND)"
    env = dict(os.environ, EDGEAUDIT_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
