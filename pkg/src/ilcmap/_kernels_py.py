"""Pure numpy implementations of the hot kernels.

Reference implementations for ``ilcmap.kernels``; the compiled module
``ilcmap._kernels_cy`` mirrors these signatures exactly.
"""

from __future__ import annotations

import numpy as np

# smallest positive normal double; floors vector norms so a trajectory
# that hits exactly zero keeps a finite log
_TINY = float(np.finfo(np.float64).tiny)


def t_grid(a: float, b: float, v: float, shifts: np.ndarray,
           coeffs: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """Learning-loop frequency response 1 - v*L(w)*w*A/(w - B) on w=e^(i theta)."""
    w = np.exp(1j * np.asarray(thetas, dtype=float))
    l_vals = np.zeros_like(w)
    for s, c in zip(np.asarray(shifts, dtype=np.int64),
                    np.asarray(coeffs, dtype=float)):
        l_vals += c * w ** int(s)
    return 1.0 - v * l_vals * w * a / (w - b)


def iterate_lognorms(m: np.ndarray, x0: np.ndarray, j_max: int) -> np.ndarray:
    """Renormalized power trajectory log-norms.

    Repeats x <- m @ x for ``j_max`` steps on each column of ``x0``,
    rescaling every column to unit norm after each multiply and
    accumulating the log of the scale factors.  Returns an array of shape
    (j_max + 1, n_columns) whose row j holds ln||x_j|| per column, exact
    in log space no matter how large the transients grow.
    """
    m = np.ascontiguousarray(m, dtype=float)
    x = np.array(x0, dtype=float, copy=True)
    if x.ndim == 1:
        x = x[:, None]
    norms = np.sqrt(np.einsum("ij,ij->j", x, x))
    if np.any(norms == 0.0):
        raise ValueError("initial vectors must be nonzero")
    out = np.empty((j_max + 1, x.shape[1]), dtype=float)
    out[0] = np.log(norms)
    x /= norms
    for j in range(j_max):
        x = m @ x
        norms = np.sqrt(np.einsum("ij,ij->j", x, x))
        np.maximum(norms, _TINY, out=norms)
        out[j + 1] = out[j] + np.log(norms)
        x /= norms
    return out
