"""Finite-trial lifted operators and their spectral tests.

Stacking one trial into a supervector turns the held plant into the
lower-triangular Toeplitz matrix P with first column A*B^k (the impulse
response of A/(1 - B z^-1)), the learning filter into its banded
Toeplitz matrix L, and the trial-to-trial update into

    x_{j+1} = M x_j,    M = I - P L.

Asymptotic convergence is rho(M) < 1; monotonic convergence of the
2-norm is sigma_max(M) < 1, computed here as the largest eigenvalue of
M^T M.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .learning import LearningFunction, toeplitz_of
from .plant import ABPoint

__all__ = [
    "LiftedOperators",
    "SpectralSummary",
    "min_trial_length",
    "build_lifted",
    "eigenvalues",
    "spectral_radius",
    "max_sv_sq",
    "top_singular_seed",
    "gelfand_radius",
    "spectral_summary",
]


@dataclass(eq=False)
class LiftedOperators:
    """The N x N matrices of one lifted configuration."""

    n: int
    point: ABPoint
    learning: LearningFunction
    p_lift: np.ndarray
    l_mat: np.ndarray
    m: np.ndarray


@dataclass(frozen=True)
class SpectralSummary:
    """Spectral radius and largest squared singular value of M."""

    rho: float
    sigma_sq_max: float
    method_note: str


def min_trial_length(lf: LearningFunction) -> int:
    """Smallest trial length at which every tap still has an active row.

    Below max|shift| + 1 the edge truncation deletes the farthest tap
    from the lifted filter entirely, so the configuration no longer
    represents the requested learning function.
    """
    return lf.max_abs_shift + 1


def build_lifted(point: ABPoint, lf: LearningFunction, n: int) -> LiftedOperators:
    """Assemble P, L and M = I - P L for trial length n."""
    n_min = min_trial_length(lf)
    if n < n_min:
        raise ValueError(
            f"trial length {n} too small for taps reaching {lf.max_abs_shift} "
            f"steps; need n >= {n_min} so every tap is represented")
    first_col = point.a_gain * point.b_pole ** np.arange(n, dtype=float)
    p = np.zeros((n, n), dtype=float)
    for j in range(n):
        p[j:, j] = first_col[:n - j]
    l_mat = toeplitz_of(lf, n)
    m = np.eye(n) - p @ l_mat
    return LiftedOperators(n=n, point=point, learning=lf,
                           p_lift=p, l_mat=l_mat, m=m)


def _check_matrix(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def is_triangular(m: np.ndarray) -> bool:
    """Exact-zero triangularity test (either orientation)."""
    return not np.any(np.triu(m, 1)) or not np.any(np.tril(m, -1))


def eigenvalues(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of m; triangular matrices short-circuit to the diagonal.

    The short-circuit matters: the causal lifted matrices are triangular
    with a single repeated eigenvalue, a configuration where a dense QR
    eigensolve scatters the computed spectrum catastrophically.
    """
    m = _check_matrix(m)
    if is_triangular(m):
        return np.diag(m).astype(complex)
    return np.linalg.eigvals(m)


def spectral_radius(m: np.ndarray) -> float:
    """Largest eigenvalue modulus (asymptotic-convergence test)."""
    return float(np.max(np.abs(eigenvalues(m))))


def max_sv_sq(m: np.ndarray) -> float:
    """Largest eigenvalue of M^T M = squared largest singular value."""
    m = _check_matrix(m)
    w = np.linalg.eigvalsh(m.T @ m)
    return float(max(w[-1], 0.0))


def top_singular_seed(m: np.ndarray) -> np.ndarray:
    """Unit right singular vector of the largest singular value.

    This is the worst-case initial vector for single-step norm growth:
    ||M x|| over unit x is maximized here.
    """
    m = _check_matrix(m)
    _, vecs = np.linalg.eigh(m.T @ m)
    v = vecs[:, -1]
    # deterministic sign convention
    nz = np.nonzero(v)[0]
    if nz.size and v[nz[0]] < 0:
        v = -v
    return v / np.linalg.norm(v)


def gelfand_radius(m: np.ndarray, k_max: int = 12) -> float:
    """Spectral-radius estimate ||M^(2^k)||^(1/2^k) by repeated squaring.

    Each squaring renormalizes by the spectral norm and accumulates the
    scale in log space, so the estimate cannot overflow however large
    the powers grow.  Serves as an independent oracle for
    :func:`spectral_radius` on diagonalizable matrices; for heavily
    defective matrices the power 2^k_max may be far from the limit.
    """
    m = _check_matrix(m)
    if k_max < 4:
        raise ValueError(f"k_max must be >= 4, got {k_max}")
    if k_max > 50:
        raise ValueError("k_max > 50 exceeds the exponent range of floats")
    f = float(np.linalg.norm(m, 2))
    if f == 0.0:
        return 0.0
    s = m / f
    log_scale = np.log(f)
    for _ in range(k_max):
        s = s @ s
        f = float(np.linalg.norm(s, 2))
        if f == 0.0:
            return 0.0
        s = s / f
        log_scale = 2.0 * log_scale + np.log(f)
    return float(np.exp(log_scale / 2.0 ** k_max))


def spectral_summary(ops: LiftedOperators) -> SpectralSummary:
    """Both spectral tests for one lifted configuration."""
    tri = is_triangular(ops.m)
    note = ("rho: diagonal of triangular M; sigma: symmetric eigensolve of M^T M"
            if tri else
            "rho: dense eigensolve; sigma: symmetric eigensolve of M^T M")
    return SpectralSummary(rho=spectral_radius(ops.m),
                           sigma_sq_max=max_sv_sq(ops.m),
                           method_note=note)
