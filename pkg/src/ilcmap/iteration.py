"""Direct iteration of the lifted update with overflow-safe norm tracking.

The protocol: iterate x_{j+1} = M x_j from a small ensemble of initial
vectors, renormalizing after every multiply and accumulating log scale
factors (transients before convergence can reach astronomically large
norms, so the trace is kept exact in log space).  Per trace we record
the step on which monotone decrease started, the step on which it
stopped again, and the final-to-initial log ratio; monotonic convergence
requires decrease from the very first step, never interrupted, for every
seed, and asymptotic convergence requires a negative log ratio for every
seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .lifted import LiftedOperators, top_singular_seed

__all__ = [
    "MONO_TOL",
    "IterationTrace",
    "IterationVerdict",
    "SeedEnsemble",
    "iterate",
    "iteration_verdict",
]

# a step counts as an increase only beyond this log-norm tolerance, so
# rounding noise at machine precision cannot flip a verdict
MONO_TOL = 1e-12

_LOG10 = float(np.log(10.0))


@dataclass(frozen=True)
class SeedEnsemble:
    """Which initial vectors to iterate.

    The defaults follow the test protocol: the top right singular vector
    of M (worst case for first-step growth), the impulse e_0, the
    all-ones vector, and n_random pseudo-random unit vectors drawn from
    the recorded seed.
    """

    include_singular: bool = True
    include_impulse: bool = True
    include_ones: bool = True
    n_random: int = 4
    rng_seed: int | tuple[int, ...] = 0

    def describe(self) -> tuple[str, ...]:
        labels: list[str] = []
        if self.include_singular:
            labels.append("singular-vector")
        if self.include_impulse:
            labels.append("impulse")
        if self.include_ones:
            labels.append("ones")
        labels += [f"random-{i}(seed={self.rng_seed})"
                   for i in range(self.n_random)]
        return tuple(labels)


@dataclass(eq=False)
class IterationTrace:
    """Log-norm history of one iterated initial vector.

    log_norms    : ln||x_j||, j = 0..j_max.
    mc_start     : first step index with a non-increasing norm, or None.
    mc_stop      : first step index after mc_start where the norm grows
                   again, or None.
    ac_log_ratio : log10(||x_end|| / ||x_0||).
    """

    log_norms: np.ndarray
    mc_start: int | None
    mc_stop: int | None
    ac_log_ratio: float

    @property
    def monotone_from_start(self) -> bool:
        return self.mc_start == 0 and self.mc_stop is None

    @property
    def has_transient(self) -> bool:
        """Growth before decay: decrease starts late or is interrupted."""
        return (self.mc_start is None or self.mc_start > 0
                or self.mc_stop is not None)


@dataclass(eq=False)
class IterationVerdict:
    """Ensemble verdict of the direct-iteration protocol."""

    mc: bool
    ac: bool
    trace: IterationTrace
    seed_info: tuple[str, ...]
    traces: tuple[IterationTrace, ...] = field(default=())

    @property
    def any_transient(self) -> bool:
        return any(t.has_transient for t in self.traces)


def _trace_from_lognorms(log_norms: np.ndarray) -> IterationTrace:
    diffs = np.diff(log_norms)
    increasing = diffs > MONO_TOL
    non_increasing = ~increasing
    mc_start: int | None = None
    mc_stop: int | None = None
    idx = np.nonzero(non_increasing)[0]
    if idx.size:
        mc_start = int(idx[0])
        later = np.nonzero(increasing[mc_start:])[0]
        if later.size:
            mc_stop = int(mc_start + later[0])
    ac_log_ratio = float((log_norms[-1] - log_norms[0]) / _LOG10)
    return IterationTrace(log_norms=log_norms, mc_start=mc_start,
                          mc_stop=mc_stop, ac_log_ratio=ac_log_ratio)


def iterate(ops: LiftedOperators, x0: np.ndarray, j_max: int) -> IterationTrace:
    """Iterate one initial vector for j_max steps."""
    x0 = np.asarray(x0, dtype=float)
    if j_max < 1:
        raise ValueError(f"j_max must be >= 1, got {j_max}")
    if x0.shape != (ops.n,):
        raise ValueError(f"expected seed of shape ({ops.n},), got {x0.shape}")
    if not np.linalg.norm(x0) > 0.0:
        raise ValueError("initial vector must be nonzero")
    log_norms = np.asarray(kernels.iterate_lognorms(ops.m, x0[:, None], j_max))
    return _trace_from_lognorms(log_norms[:, 0])


def seed_matrix(ops: LiftedOperators,
                seeds: SeedEnsemble) -> tuple[np.ndarray, tuple[str, ...]]:
    """Materialize the seed ensemble as unit columns."""
    n = ops.n
    cols: list[np.ndarray] = []
    if seeds.include_singular:
        cols.append(top_singular_seed(ops.m))
    if seeds.include_impulse:
        e0 = np.zeros(n)
        e0[0] = 1.0
        cols.append(e0)
    if seeds.include_ones:
        cols.append(np.full(n, 1.0 / np.sqrt(n)))
    if seeds.n_random:
        rng = np.random.default_rng(seeds.rng_seed)
        r = rng.standard_normal((n, seeds.n_random))
        r /= np.sqrt(np.einsum("ij,ij->j", r, r))
        cols.extend(r[:, k] for k in range(seeds.n_random))
    if not cols:
        raise ValueError("seed ensemble is empty")
    return np.column_stack(cols), seeds.describe()


def iteration_verdict(ops: LiftedOperators, j_max: int = 800,
                      seeds: SeedEnsemble | int = 0) -> IterationVerdict:
    """Run the detection protocol over the whole seed ensemble.

    ``seeds`` may be a SeedEnsemble or just an integer random seed for
    the default ensemble.  All seeds are iterated in one blocked kernel
    call; the representative ``trace`` is the first seed's (the
    singular-vector seed under the defaults).
    """
    if isinstance(seeds, (int, tuple)):
        seeds = SeedEnsemble(rng_seed=seeds)
    x, labels = seed_matrix(ops, seeds)
    if j_max < 1:
        raise ValueError(f"j_max must be >= 1, got {j_max}")
    log_norms = np.asarray(kernels.iterate_lognorms(ops.m, x, j_max))
    traces = tuple(_trace_from_lognorms(log_norms[:, k])
                   for k in range(x.shape[1]))
    mc = all(t.monotone_from_start for t in traces)
    ac = all(t.ac_log_ratio < 0.0 for t in traces)
    return IterationVerdict(mc=mc, ac=ac, trace=traces[0],
                            seed_info=labels, traces=traces)
