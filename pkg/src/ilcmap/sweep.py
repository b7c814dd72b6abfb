"""Grid sweeps over the (A, B) rectangle running all tests per point.

Each grid point can be probed by up to five methods: the unit-circle
supremum (zsup), the largest squared singular value of the lifted
iteration matrix (sigma), its spectral radius (rho), the direct
iteration protocol (iterate), and the closed-form region inequalities
(analytic).  Verdicts are tri-state: true, false, or marginal when a
numeric quantity sits within ``EPS_BAND`` of the threshold.

Grid points are independent work units; evaluation may be spread over a
process pool and results are always assembled in row-major (A outer,
B inner) order, so identical configurations produce identical output no
matter how many workers ran them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from multiprocessing import get_context

import numpy as np

from .iteration import SeedEnsemble, iteration_verdict
from .learning import (LearningFunction, LearningKind, UnsupportedKindError,
                       named_learning)
from .lifted import build_lifted, max_sv_sq, spectral_radius
from .plant import ABPoint
from .zdomain import (EPS_BAND, PoleError, RegionVerdict, ac_region_analytic,
                      mc_region_analytic, sup_T)

__all__ = [
    "Tri",
    "METHODS",
    "SweepConfig",
    "PointReport",
    "PairCounts",
    "AgreementStats",
    "evaluate_point",
    "run_sweep",
    "compare_methods",
    "near_boundary_mask",
    "extract_boundary",
    "audit_printed_bounds",
    "MC_FIELDS",
    "AC_FIELDS",
]

METHODS = ("analytic", "zsup", "sigma", "rho", "iterate")

MC_FIELDS = ("mc_z", "mc_sigma", "mc_iter", "mc_analytic")
AC_FIELDS = ("ac_rho", "ac_iter", "ac_analytic")

FLAG_SLOW = "slow-converging"
FLAG_NECESSARY_ONLY = "necessary-only"
FLAG_EMPIRICAL_FIT = "empirical-fit"
FLAG_TRANSIENT = "transient"
FLAG_NUMERIC_ERROR = "numeric-error"


class Tri(Enum):
    """Tri-state verdict; CSV spelling is 1 / 0 / m."""

    TRUE = "1"
    FALSE = "0"
    MARGINAL = "m"

    @staticmethod
    def of_bool(b: bool) -> "Tri":
        return Tri.TRUE if b else Tri.FALSE

    @staticmethod
    def below_one(x: float, band: float = EPS_BAND) -> "Tri":
        """Compare a nonnegative quantity against 1 with a marginal band."""
        if x < 1.0 - band:
            return Tri.TRUE
        if x > 1.0 + band:
            return Tri.FALSE
        return Tri.MARGINAL

    @staticmethod
    def of_verdict(v: RegionVerdict) -> "Tri":
        if v.marginal:
            return Tri.MARGINAL
        return Tri.of_bool(v.mc)


@dataclass(frozen=True)
class SweepConfig:
    """One sweep campaign: grid, filter, trial length, budgets, methods.

    a_range / b_range are (min, max, steps) with steps >= 2 and the
    ranges strictly inside (0, 1) x (-1, 1); the rectangle edges are
    singular by construction and never probed.
    """

    a_range: tuple[float, float, int]
    b_range: tuple[float, float, int]
    learning: LearningFunction
    n: int = 128
    j_max: int = 800
    methods: tuple[str, ...] = METHODS
    seed: int = 0
    grid_size: int = 1024

    def __post_init__(self):
        amin, amax, asteps = self.a_range
        bmin, bmax, bsteps = self.b_range
        if asteps < 2 or bsteps < 2:
            raise ValueError("each grid axis needs at least 2 steps")
        if not (0.0 < amin <= amax < 1.0):
            raise ValueError(f"A range must lie strictly inside (0, 1), "
                             f"got ({amin}, {amax})")
        if not (-1.0 < bmin <= bmax < 1.0):
            raise ValueError(f"B range must lie strictly inside (-1, 1), "
                             f"got ({bmin}, {bmax})")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ValueError(f"unknown methods {bad}; known: {METHODS}")
        if not self.methods:
            raise ValueError("at least one method required")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        object.__setattr__(self, "methods", tuple(self.methods))

    @property
    def a_values(self) -> np.ndarray:
        return np.linspace(*self.a_range[:2], self.a_range[2])

    @property
    def b_values(self) -> np.ndarray:
        return np.linspace(*self.b_range[:2], self.b_range[2])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.a_range[2], self.b_range[2])

    def point_at(self, index: int) -> ABPoint:
        na, nb = self.shape
        i, j = divmod(index, nb)
        return ABPoint(float(self.a_values[i]), float(self.b_values[j]))

    def as_dict(self) -> dict:
        lf = self.learning
        return {
            "a_range": list(self.a_range),
            "b_range": list(self.b_range),
            "learning": {"kind": lf.kind.token,
                         "taps": [list(t) for t in lf.taps],
                         "v": lf.gain_v},
            "n": self.n,
            "j_max": self.j_max,
            "methods": list(self.methods),
            "seed": self.seed,
            "grid_size": self.grid_size,
        }


@dataclass(eq=False)
class PointReport:
    """Everything measured at one grid point.

    Verdict fields are Tri or None when the method did not run; numeric
    fields are floats or None likewise.  ``sup_t`` is the plain refined
    supremum of |T| (it saturates at 1 on structural touch phases);
    ``sup_t_strict`` discounts those touches and is what mc_z compares
    against 1.
    """

    point: ABPoint
    sup_t: float | None = None
    sup_t_strict: float | None = None
    sigma_sq: float | None = None
    rho: float | None = None
    mc_z: Tri | None = None
    mc_sigma: Tri | None = None
    ac_rho: Tri | None = None
    mc_iter: Tri | None = None
    ac_iter: Tri | None = None
    mc_analytic: Tri | None = None
    ac_analytic: Tri | None = None
    flags: tuple[str, ...] = ()
    iter_mc_start: int | None = None
    iter_mc_stop: int | None = None

    def get(self, name: str):
        return getattr(self, name)


@dataclass(frozen=True)
class PairCounts:
    """Confusion counts for one method pair over a full grid."""

    both_true: int = 0
    both_false: int = 0
    disagree: int = 0
    either_marginal: int = 0
    near_boundary: int = 0
    unpopulated: int = 0

    @property
    def total(self) -> int:
        return (self.both_true + self.both_false + self.disagree
                + self.either_marginal + self.near_boundary + self.unpopulated)


@dataclass(eq=False)
class AgreementStats:
    """Pairwise agreement over a sweep, with marginal and near-boundary
    points excluded from the disagreement accounting."""

    pairs: dict
    boundary_exclusion: float
    grid_shape: tuple[int, int]
    ac_true_mc_false: int = 0
    ac_true_mc_false_with_transient: int = 0


def _mc_tri_from_locus(locus, band: float = EPS_BAND) -> Tri:
    """Monotonic-convergence verdict from the supremum pair.

    Anything above 1 + band anywhere fails; otherwise the touch-
    discounted supremum decides, with the band marking marginal points.
    """
    if locus.sup_abs > 1.0 + band:
        return Tri.FALSE
    if locus.sup_strict < 1.0 - band:
        return Tri.TRUE
    return Tri.MARGINAL


def evaluate_point(point: ABPoint, lf: LearningFunction, *, n: int = 128,
                   j_max: int = 800, methods: tuple[str, ...] = METHODS,
                   grid_size: int = 1024,
                   rng_seed: int | tuple[int, ...] = 0,
                   band: float = EPS_BAND) -> PointReport:
    """Run the requested methods at a single plant point.

    Numeric failures (pole hits, eigensolver breakdowns) are recorded as
    flags and leave the affected fields absent; they never raise.
    """
    rep = PointReport(point=point)
    flags: list[str] = []

    verdict_analytic_mc: RegionVerdict | None = None
    if "analytic" in methods:
        try:
            verdict_analytic_mc = mc_region_analytic(lf.kind, point, lf.gain_v)
            rep.mc_analytic = Tri.of_verdict(verdict_analytic_mc)
            if verdict_analytic_mc.qualifier == "necessary-only":
                flags.append(FLAG_NECESSARY_ONLY)
        except UnsupportedKindError:
            pass
        try:
            v_ac = ac_region_analytic(lf.kind, point, lf.gain_v)
            rep.ac_analytic = Tri.of_verdict(v_ac)
            if v_ac.qualifier == "empirical-fit":
                flags.append(FLAG_EMPIRICAL_FIT)
        except UnsupportedKindError:
            pass

    if "zsup" in methods:
        try:
            locus = sup_T(point, lf, grid_size)
            rep.sup_t = locus.sup_abs
            rep.sup_t_strict = locus.sup_strict
            rep.mc_z = _mc_tri_from_locus(locus, band)
        except PoleError:
            flags.append(FLAG_NUMERIC_ERROR)

    ops = None
    need_lift = any(m in methods for m in ("sigma", "rho", "iterate"))
    if need_lift:
        try:
            ops = build_lifted(point, lf, n)
        except ValueError:
            flags.append(FLAG_NUMERIC_ERROR)

    if ops is not None and "sigma" in methods:
        try:
            rep.sigma_sq = max_sv_sq(ops.m)
            rep.mc_sigma = Tri.below_one(rep.sigma_sq, band)
        except (ValueError, np.linalg.LinAlgError):
            flags.append(FLAG_NUMERIC_ERROR)

    if ops is not None and "rho" in methods:
        try:
            rep.rho = spectral_radius(ops.m)
            rep.ac_rho = Tri.below_one(rep.rho, band)
        except (ValueError, np.linalg.LinAlgError):
            flags.append(FLAG_NUMERIC_ERROR)

    if ops is not None and "iterate" in methods:
        try:
            iv = iteration_verdict(ops, j_max=j_max,
                                   seeds=SeedEnsemble(rng_seed=rng_seed))
            rep.mc_iter = Tri.of_bool(iv.mc)
            rep.ac_iter = Tri.of_bool(iv.ac)
            rep.iter_mc_start = iv.trace.mc_start
            rep.iter_mc_stop = iv.trace.mc_stop
            if iv.any_transient:
                flags.append(FLAG_TRANSIENT)
            if (rep.rho is not None and rep.rho < 1.0 - band and not iv.ac):
                # contraction in the limit but the budget ran out: the
                # point converges, just extremely slowly
                flags.append(FLAG_SLOW)
        except (ValueError, np.linalg.LinAlgError):
            flags.append(FLAG_NUMERIC_ERROR)

    rep.flags = tuple(dict.fromkeys(flags))
    return rep


def _eval_index(args) -> PointReport:
    config, index = args
    return evaluate_point(config.point_at(index), config.learning,
                          n=config.n, j_max=config.j_max,
                          methods=config.methods,
                          grid_size=config.grid_size,
                          rng_seed=(config.seed, index))


def run_sweep(config: SweepConfig, workers: int = 1,
              eps_boundary: float = 1.5):
    """Evaluate the whole grid; returns (reports, stats).

    Reports come back row-major in (A, B) regardless of worker count;
    per-point random seeds derive from (config.seed, grid index) so the
    ensemble draw does not depend on scheduling either.
    """
    na, nb = config.shape
    tasks = [(config, k) for k in range(na * nb)]
    if workers <= 1:
        reports = [_eval_index(t) for t in tasks]
    else:
        ctx = get_context("fork")
        chunk = max(1, len(tasks) // (workers * 4))
        with ctx.Pool(processes=workers) as pool:
            reports = pool.map(_eval_index, tasks, chunksize=chunk)
    try:
        stats = compare_methods(reports, eps_boundary=eps_boundary)
    except ValueError:
        stats = AgreementStats(pairs={}, boundary_exclusion=eps_boundary,
                               grid_shape=(na, nb))
    return reports, stats


def _grid_shape(reports: list[PointReport]) -> tuple[int, int]:
    a_vals = sorted({r.point.a_gain for r in reports})
    b_vals = sorted({r.point.b_pole for r in reports})
    na, nb = len(a_vals), len(b_vals)
    if na * nb != len(reports):
        raise ValueError(
            f"reports do not form a complete rectangular grid: "
            f"{len(reports)} points vs {na} x {nb} coordinates")
    return na, nb


def near_boundary_mask(reports: list[PointReport],
                       eps_boundary: float = 1.5) -> np.ndarray:
    """Mark grid points within eps_boundary cells of the analytic edge.

    A point is near the boundary when the analytic verdict is marginal
    there or differs somewhere in its neighborhood of radius
    eps_boundary (measured in grid cells).  All False when the sweep has
    no analytic verdicts.
    """
    na, nb = _grid_shape(reports)
    mask = np.zeros((na, nb), dtype=bool)
    tri = np.empty((na, nb), dtype=object)
    for k, r in enumerate(reports):
        tri[divmod(k, nb)] = r.mc_analytic
    if all(t is None for t in tri.flat):
        return mask
    reach = int(math.floor(eps_boundary))
    offsets = [(di, dj)
               for di in range(-reach, reach + 1)
               for dj in range(-reach, reach + 1)
               if (di, dj) != (0, 0) and math.hypot(di, dj) <= eps_boundary]
    for i in range(na):
        for j in range(nb):
            if tri[i, j] is Tri.MARGINAL or tri[i, j] is None:
                mask[i, j] = True
                continue
            for di, dj in offsets:
                ii, jj = i + di, j + dj
                if 0 <= ii < na and 0 <= jj < nb and tri[ii, jj] is not tri[i, j]:
                    mask[i, j] = True
                    break
    return mask


def compare_methods(reports: list[PointReport],
                    eps_boundary: float = 1.5) -> AgreementStats:
    """Pairwise confusion counts between all populated verdict methods.

    Marginal points and points near the analytic boundary never count as
    disagreements; every grid point lands in exactly one bucket per
    pair, so the bucket counts always sum to the grid size.  The stats
    also tally the learning-transient population: points that pass the
    eigenvalue AC test but fail the singular-value MC test, and how many
    of those show growth before decay in the iteration trace.
    """
    na, nb = _grid_shape(reports)
    populated = [f for f in MC_FIELDS + AC_FIELDS
                 if any(r.get(f) is not None for r in reports)]
    if len(populated) < 2:
        raise ValueError("need at least two populated methods to compare")
    near = near_boundary_mask(reports, eps_boundary)

    pairs: dict[tuple[str, str], PairCounts] = {}
    families = [[f for f in MC_FIELDS if f in populated],
                [f for f in AC_FIELDS if f in populated]]
    for fam in families:
        for x in range(len(fam)):
            for y in range(x + 1, len(fam)):
                fa, fb = fam[x], fam[y]
                bt = bf = dis = marg = nb_cnt = unpop = 0
                for k, r in enumerate(reports):
                    va, vb = r.get(fa), r.get(fb)
                    if va is None or vb is None:
                        unpop += 1
                    elif near[divmod(k, nb)]:
                        nb_cnt += 1
                    elif Tri.MARGINAL in (va, vb):
                        marg += 1
                    elif va is vb is Tri.TRUE:
                        bt += 1
                    elif va is vb is Tri.FALSE:
                        bf += 1
                    else:
                        dis += 1
                pairs[(fa, fb)] = PairCounts(
                    both_true=bt, both_false=bf, disagree=dis,
                    either_marginal=marg, near_boundary=nb_cnt,
                    unpopulated=unpop)

    acmc = sum(1 for r in reports
               if r.ac_rho is Tri.TRUE and r.mc_sigma is Tri.FALSE)
    trans = sum(1 for r in reports
                if r.ac_rho is Tri.TRUE and r.mc_sigma is Tri.FALSE
                and FLAG_TRANSIENT in r.flags)
    return AgreementStats(pairs=pairs, boundary_exclusion=eps_boundary,
                          grid_shape=(na, nb),
                          ac_true_mc_false=acmc,
                          ac_true_mc_false_with_transient=trans)


_BOUNDARY_FIELDS = {
    "zsup": "sup_t_strict",
    "sup_T": "sup_t",
    "sup_T_strict": "sup_t_strict",
    "sigma": "sigma_sq",
    "sigma_sq": "sigma_sq",
    "rho": "rho",
}


def extract_boundary(reports: list[PointReport], which: str,
                     level: float = 1.0) -> list[list[tuple[float, float]]]:
    """Iso-contour polylines of a numeric field at the given level.

    Standard marching squares over the rectangular sweep grid with
    linear interpolation along cell edges; saddle cells are resolved by
    the cell-center average.  Returns polylines as lists of (A, B)
    vertices.  The ``zsup`` field token contours the touch-discounted
    supremum, whose unit level is the monotonic-convergence edge.
    """
    field_name = _BOUNDARY_FIELDS.get(which)
    if field_name is None:
        raise ValueError(
            f"no numeric field for {which!r}; choose from "
            f"{sorted(_BOUNDARY_FIELDS)}")
    na, nb = _grid_shape(reports)
    grid = np.empty((na, nb), dtype=float)
    for k, r in enumerate(reports):
        val = r.get(field_name)
        if val is None:
            raise ValueError(
                f"field {field_name!r} missing at grid point {r.point}; "
                "sweep must populate the chosen method everywhere")
        grid[divmod(k, nb)] = val
    a_vals = np.array(sorted({r.point.a_gain for r in reports}))
    b_vals = np.array(sorted({r.point.b_pole for r in reports}))

    def interp(p1, p2, v1, v2):
        t = (level - v1) / (v2 - v1)
        return (p1[0] + t * (p2[0] - p1[0]), p1[1] + t * (p2[1] - p1[1]))

    segments: list[tuple[tuple[float, float], tuple[float, float]]] = []
    for i in range(na - 1):
        for j in range(nb - 1):
            corners = [
                ((a_vals[i], b_vals[j]), grid[i, j]),
                ((a_vals[i + 1], b_vals[j]), grid[i + 1, j]),
                ((a_vals[i + 1], b_vals[j + 1]), grid[i + 1, j + 1]),
                ((a_vals[i], b_vals[j + 1]), grid[i, j + 1]),
            ]
            above = [v > level for _, v in corners]
            if all(above) or not any(above):
                continue
            crossings = []
            for e in range(4):
                (p1, v1), (p2, v2) = corners[e], corners[(e + 1) % 4]
                if (v1 > level) != (v2 > level):
                    crossings.append((e, interp(p1, p2, v1, v2)))
            if len(crossings) == 2:
                segments.append((crossings[0][1], crossings[1][1]))
            elif len(crossings) == 4:
                center_above = np.mean([v for _, v in corners]) > level
                # pair edges so the contour separates the center correctly
                if above[0] == center_above:
                    segments.append((crossings[0][1], crossings[1][1]))
                    segments.append((crossings[2][1], crossings[3][1]))
                else:
                    segments.append((crossings[3][1], crossings[0][1]))
                    segments.append((crossings[1][1], crossings[2][1]))

    return _chain_segments(segments)


def _chain_segments(segments):
    """Join shared-endpoint segments into polylines (order-stable)."""
    def key(p):
        return (round(p[0], 12), round(p[1], 12))

    unused = list(range(len(segments)))
    by_end: dict[tuple, list[int]] = {}
    for idx, (p, q) in enumerate(segments):
        by_end.setdefault(key(p), []).append(idx)
        by_end.setdefault(key(q), []).append(idx)

    taken = [False] * len(segments)
    polylines = []
    for start in unused:
        if taken[start]:
            continue
        taken[start] = True
        p, q = segments[start]
        line = [p, q]
        for head in (1, 0):
            while True:
                endpoint = line[-1] if head else line[0]
                nxt = None
                for idx in by_end.get(key(endpoint), ()):
                    if not taken[idx]:
                        nxt = idx
                        break
                if nxt is None:
                    break
                taken[nxt] = True
                a, b = segments[nxt]
                far = b if key(a) == key(endpoint) else a
                if head:
                    line.append(far)
                else:
                    line.insert(0, far)
        polylines.append(line)
    return polylines


def audit_printed_bounds(kind: LearningKind, v: float = 1.0,
                         a_range: tuple[float, float, int] = (0.05, 0.95, 41),
                         b_range: tuple[float, float, int] = (-0.95, 0.95, 41),
                         grid_size: int = 1024):
    """Compare the printed 3-term inequality bounds against sup-based truth.

    The printed conditions for the one-sided 3-term filters are
    necessary-but-possibly-insufficient endpoint conditions; this audit
    tabulates them against the numeric supremum verdict on a grid and
    reports both failure directions.  Returns (rows, stats) where each
    row is (A, B, printed_mc, sup_strict, sup_abs, numeric_tri).
    """
    if kind not in (LearningKind.L3_AHEAD, LearningKind.L3_BACK):
        raise UnsupportedKindError(
            f"audit applies to the 3-term one-sided kinds, not {kind.token!r}")
    lf = named_learning(kind, v)
    a_vals = np.linspace(*a_range[:2], a_range[2])
    b_vals = np.linspace(*b_range[:2], b_range[2])
    rows = []
    n_numeric_true = 0
    violations_necessary = 0   # numeric MC-true but printed condition false
    insufficiency = 0          # printed condition true but numeric MC-false
    for a in a_vals:
        for b in b_vals:
            pt = ABPoint(float(a), float(b))
            printed = mc_region_analytic(kind, pt, v)
            locus = sup_T(pt, lf, grid_size)
            tri = _mc_tri_from_locus(locus)
            if tri is Tri.TRUE:
                n_numeric_true += 1
                if not printed.mc:
                    violations_necessary += 1
            if printed.mc and tri is Tri.FALSE:
                insufficiency += 1
            rows.append((float(a), float(b), printed.mc,
                         locus.sup_strict, locus.sup_abs, tri))
    stats = {
        "grid": (a_range[2], b_range[2]),
        "numeric_mc_true": n_numeric_true,
        "numeric_true_printed_false": violations_necessary,
        "printed_true_numeric_false": insufficiency,
        "printed_bounds_suspect": bool(violations_necessary or insufficiency),
    }
    return rows, stats
