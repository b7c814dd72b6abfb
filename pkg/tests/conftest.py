"""Shared fixtures: the canonical acceptance grid and a sweep cache.

Several acceptance criteria probe the same (kind, gain) sweeps; the
session-scoped cache runs each configuration once.
"""

import pytest

from ilcmap.learning import named_learning
from ilcmap.sweep import SweepConfig, run_sweep

# canonical interior grid: 21 x 21, cells 0.045 x 0.09
GRID21_A = (0.05, 0.95, 21)
GRID21_B = (-0.9, 0.9, 21)
ACC_SEED = 11
ACC_N = 256
ACC_JMAX = 200


@pytest.fixture(scope="session")
def sweeps():
    cache = {}

    def get(kind, v, methods, n=ACC_N, j_max=ACC_JMAX, a_range=GRID21_A,
            b_range=GRID21_B, seed=ACC_SEED, grid_size=1024):
        key = (kind, v, tuple(methods), n, j_max, a_range, b_range, seed,
               grid_size)
        if key not in cache:
            config = SweepConfig(a_range=a_range, b_range=b_range,
                                 learning=named_learning(kind, v), n=n,
                                 j_max=j_max, methods=tuple(methods),
                                 seed=seed, grid_size=grid_size)
            cache[key] = run_sweep(config)
        return cache[key]

    return get
