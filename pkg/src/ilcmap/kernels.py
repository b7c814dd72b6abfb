"""Kernel dispatch: compiled extension and numpy fallback.

The backend is picked once at import time.  By default (``auto``) each
kernel uses whichever implementation benchmarks faster: the compiled
loop for the frequency-response grid, and the numpy/BLAS path for the
renormalized power iteration, where ``m @ x`` is a blocked dgemm no
simple compiled loop beats (see benchmarks/bench_kernels.py).  Set
``ILCMAP_KERNELS`` to ``python`` or ``compiled`` to force one side
everywhere; ``compiled`` raises if the extension was not built.
"""

from __future__ import annotations

import os

from . import _kernels_py

_choice = os.environ.get("ILCMAP_KERNELS", "auto")
if _choice not in ("auto", "python", "compiled"):
    raise RuntimeError(
        f"ILCMAP_KERNELS must be auto, python or compiled, got {_choice!r}")

_cy = None
if _choice in ("auto", "compiled"):
    try:
        from . import _kernels_cy as _cy
    except ImportError:
        if _choice == "compiled":
            raise

if _choice == "compiled":
    BACKEND = "compiled"
    t_grid = _cy.t_grid
    iterate_lognorms = _cy.iterate_lognorms
elif _choice == "auto" and _cy is not None:
    BACKEND = "mixed (t_grid compiled, iterate numpy)"
    t_grid = _cy.t_grid
    iterate_lognorms = _kernels_py.iterate_lognorms
else:
    BACKEND = "python"
    t_grid = _kernels_py.t_grid
    iterate_lognorms = _kernels_py.iterate_lognorms

__all__ = ["BACKEND", "t_grid", "iterate_lognorms"]
