"""Hot loops, with a compiled extension and a pure-Python/numpy fallback.

The compiled module ``_gibbs`` is built from ``_gibbs.pyx`` by ``setup.py``.
If it is missing, or ``EDGEAUDIT_PURE_PYTHON=1`` is set, the numpy version in
:mod:`._fallback` is used instead.  Both consume identical uniform draws and a
shared probability table, so they produce bit-identical chains.
"""

import os

from . import _fallback

if os.environ.get("EDGEAUDIT_PURE_PYTHON", "") not in ("", "0"):
    gibbs_sweep = _fallback.gibbs_sweep
    BACKEND = "python"
else:
    try:
        from ._gibbs import gibbs_sweep
        BACKEND = "cython"
    except ImportError:  # extension not built
        gibbs_sweep = _fallback.gibbs_sweep
        BACKEND = "python"

__all__ = ["gibbs_sweep", "BACKEND"]
