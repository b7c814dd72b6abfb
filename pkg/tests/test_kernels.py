"""Backend equivalence and dispatch of the hot kernels."""

import os
import subprocess
import sys

import numpy as np
import pytest

from ilcmap import _kernels_py, kernels

try:
    from ilcmap import _kernels_cy
except ImportError:
    _kernels_cy = None

needs_compiled = pytest.mark.skipif(_kernels_cy is None,
                                    reason="compiled kernels not built")


@needs_compiled
def test_t_grid_backends_agree():
    rng = np.random.default_rng(1)
    thetas = np.linspace(0.0, np.pi, 777)
    for _ in range(10):
        shifts = np.unique(rng.integers(-4, 5, size=3)).astype(np.int64)
        coeffs = rng.standard_normal(len(shifts))
        a = rng.uniform(0.05, 0.95)
        b = rng.uniform(-0.9, 0.9)
        v = rng.uniform(0.0, 2.5)
        ref = _kernels_py.t_grid(a, b, v, shifts, coeffs, thetas)
        out = np.asarray(_kernels_cy.t_grid(a, b, v, shifts, coeffs, thetas))
        assert np.allclose(out, ref, rtol=0, atol=1e-12)


@needs_compiled
def test_iterate_backends_agree():
    rng = np.random.default_rng(2)
    for _ in range(8):
        n = int(rng.integers(3, 50))
        s = int(rng.integers(1, 8))
        m = rng.standard_normal((n, n)) * 0.5
        x0 = rng.standard_normal((n, s))
        ref = _kernels_py.iterate_lognorms(m, x0, 60)
        out = np.asarray(_kernels_cy.iterate_lognorms(m, x0, 60))
        assert np.allclose(out, ref, rtol=0, atol=1e-9)


def test_iterate_zero_column_rejected():
    m = np.eye(3)
    x0 = np.zeros((3, 2))
    x0[0, 0] = 1.0
    with pytest.raises(ValueError):
        _kernels_py.iterate_lognorms(m, x0, 4)
    if _kernels_cy is not None:
        with pytest.raises(ValueError):
            _kernels_cy.iterate_lognorms(m, x0, 4)


def test_iterate_annihilation_floors_norm():
    m = np.zeros((2, 2))
    m[1, 0] = 1.0
    out = _kernels_py.iterate_lognorms(m, np.array([[1.0], [0.0]]), 4)
    assert np.all(np.isfinite(out))
    assert out[2, 0] < -700.0  # floored at the smallest normal double


def test_dispatch_reports_backend():
    assert kernels.BACKEND in ("python", "compiled",
                               "mixed (t_grid compiled, iterate numpy)")
    assert callable(kernels.t_grid)
    assert callable(kernels.iterate_lognorms)


def test_forced_python_backend_subprocess():
    code = ("import ilcmap.kernels as k; "
            "print(k.BACKEND); "
            "print(k.t_grid.__module__, k.iterate_lognorms.__module__)")
    env = dict(os.environ, ILCMAP_KERNELS="python")
    proc = subprocess.run([sys.executable, "-c", code], env=env,
                          capture_output=True, text=True)
    assert proc.returncode == 0
    lines = proc.stdout.splitlines()
    assert lines[0] == "python"
    assert lines[1] == "ilcmap._kernels_py ilcmap._kernels_py"


@needs_compiled
def test_forced_compiled_backend_subprocess():
    code = ("import ilcmap.kernels as k; "
            "print(k.BACKEND); "
            "print(k.t_grid.__module__, k.iterate_lognorms.__module__)")
    env = dict(os.environ, ILCMAP_KERNELS="compiled")
    proc = subprocess.run([sys.executable, "-c", code], env=env,
                          capture_output=True, text=True)
    assert proc.returncode == 0
    lines = proc.stdout.splitlines()
    assert lines[0] == "compiled"
    assert lines[1] == "ilcmap._kernels_cy ilcmap._kernels_cy"
