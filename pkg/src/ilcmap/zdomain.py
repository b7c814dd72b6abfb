"""Unit-circle analysis of the learning loop.

The trial-to-trial update has the frequency response

    T(theta) = 1 - v * L(w) * w * A / (w - B),   w = e^(i theta),

with the extra factor w compensating the one-step hold delay.  Monotonic
convergence of the trial-error norm is governed by the supremum of |T|
over theta in [0, pi] (conjugate symmetry covers the rest of the circle).

One structural subtlety drives the verdict logic here: every multi-tap
filter has phases where its tap polynomial vanishes on the unit circle
(theta = pi for the 2-term filters, 2*pi/3 for the 3-term ones).  At
those phases T = 1 exactly for every plant point, at any gain.  When the
locus merely touches the circle there tangentially the iteration is
still monotonically contractive at every other frequency, and finite
trials contract strictly; only a crossing (|T| > 1 on a neighborhood)
breaks monotonic convergence.  ``sup_T`` therefore reports both the
plain supremum (``sup_abs``, which saturates at 1 on a touch) and the
supremum over maxima away from the structural touch phases
(``sup_strict``), and verdicts are drawn from the pair.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .learning import (LearningFunction, LearningKind, UnsupportedKindError,
                       eval_L, unit_circle_zero_phases)
from .plant import ABPoint, PlantParams

__all__ = [
    "EPS_BAND",
    "PoleError",
    "TLocus",
    "RegionVerdict",
    "closed_loop_P",
    "T_of_theta",
    "sup_T",
    "mc_region_analytic",
    "ac_region_analytic",
    "analytic_curves",
]

EPS_BAND = 1e-6          # marginal band around |T| = 1 and region edges
STRUCT_PHASE_TOL = 1e-5  # radians: maxima this close to a tap-polynomial
                         # zero are treated as structural touch points
_GOLDEN_TOL = 1e-10
_DEFAULT_GRID = 1024


class PoleError(ValueError):
    """Evaluation requested exactly at a pole of the transfer function."""


@dataclass(eq=False)
class TLocus:
    """Sampled locus of T on the upper unit semicircle.

    thetas / values : the uniform grid and T there.
    sup_abs         : refined maximum of |T| (includes structural touches).
    argmax_theta    : phase achieving sup_abs.
    sup_strict      : refined maximum over maxima away from touch phases.
    argmax_strict   : phase achieving sup_strict.
    touch_phases    : unit-circle zeros of the tap polynomial in [0, pi].
    """

    thetas: np.ndarray
    values: np.ndarray
    sup_abs: float
    argmax_theta: float
    sup_strict: float
    argmax_strict: float
    touch_phases: tuple[float, ...]


@dataclass(frozen=True)
class RegionVerdict:
    """Outcome of a closed-form region test at one plant point.

    marginal reports proximity to a region edge (within EPS_BAND) and is
    carried alongside the boolean verdict, never instead of it.
    qualifier is None, "necessary-only" or "empirical-fit".
    """

    mc: bool
    marginal: bool
    detail: str
    qualifier: str | None = None


def closed_loop_P(z: complex, params: PlantParams) -> complex:
    """Closed-loop transfer function G/(1 + C G) of the sampled plant.

    C(z) = kp + ki*tau_s*z/(z-1) and G(z) = (e^U - 1)/(z e^U - 1); the
    quotient is evaluated in a pole-safe combined form.  For ki = 0 this
    equals A/(z - B).
    """
    z = complex(z)
    eu = math.exp(params.u_product)
    if params.ki != 0.0:
        if z == 1:
            raise PoleError("controller pole: z = 1 with ki != 0")
        c = params.kp + params.ki * params.sample_period * z / (z - 1.0)
    else:
        c = complex(params.kp)
    num = eu - 1.0
    den = (z * eu - 1.0) + c * num
    if abs(den) < 1e-12 * max(1.0, abs(z) * eu):
        raise PoleError(f"z = {z} is a pole of the closed loop")
    return num / den


def T_of_theta(point: ABPoint, lf: LearningFunction, theta: float) -> complex:
    """T at a single phase; the learning filter is applied with unit Q."""
    w = cmath.exp(1j * theta)
    den = w - point.b_pole
    if abs(den) < 1e-12:
        raise PoleError(
            f"e^(i {theta}) hits the plant pole B = {point.b_pole}")
    return 1.0 - eval_L(lf, w) * w * point.a_gain / den


def _abs_t_scalar(point: ABPoint, lf: LearningFunction, theta: float) -> float:
    return abs(T_of_theta(point, lf, theta))


def _golden_max(f, lo: float, hi: float, tol: float = _GOLDEN_TOL):
    """Golden-section maximization on [lo, hi]; returns (x, f(x)).

    Ends are probed explicitly so maxima sitting exactly on the bracket
    boundary are not lost to the interior contraction.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    candidates = [((a + b) / 2.0, f((a + b) / 2.0)), (lo, f(lo)), (hi, f(hi))]
    return max(candidates, key=lambda p: p[1])


def sup_T(point: ABPoint, lf: LearningFunction,
          grid_size: int = _DEFAULT_GRID) -> TLocus:
    """Locus of T over [0, pi] with a refined supremum.

    |T| is sampled on a uniform grid, then every discrete local maximum
    (grid endpoints included) is polished by golden-section search to
    1e-10 in theta.  ``sup_abs`` is the overall refined maximum;
    ``sup_strict`` discards maxima that sit on structural touch phases
    of the tap polynomial and is the quantity a monotonic-convergence
    verdict should compare against 1.
    """
    if grid_size < 64:
        raise ValueError(f"grid_size must be >= 64, got {grid_size}")
    thetas = np.linspace(0.0, math.pi, grid_size)
    shifts = np.asarray(lf.shifts, dtype=np.int64)
    coeffs = np.asarray(lf.coefficients, dtype=float)
    if abs(abs(point.b_pole) - 1.0) < 1e-12:
        # theta = 0 or pi would land exactly on the plant pole
        raise PoleError(
            f"plant pole B = {point.b_pole} lies on the unit circle")
    values = np.asarray(kernels.t_grid(point.a_gain, point.b_pole, lf.gain_v,
                                       shifts, coeffs, thetas))
    r = np.abs(values)

    # discrete local maxima, run-compressed, endpoints always candidates
    cand_idx: list[int] = [0, grid_size - 1]
    for i in range(1, grid_size - 1):
        if r[i] >= r[i - 1] and r[i] >= r[i + 1]:
            if r[i] == r[i - 1] and (i - 1) in cand_idx:
                continue
            cand_idx.append(i)

    def f(theta: float) -> float:
        return _abs_t_scalar(point, lf, theta)

    refined: list[tuple[float, float]] = []
    seen: set[int] = set()
    for i in cand_idx:
        if i in seen:
            continue
        seen.add(i)
        lo = thetas[max(0, i - 1)]
        hi = thetas[min(grid_size - 1, i + 1)]
        refined.append(_golden_max(f, lo, hi))

    grid_best = int(np.argmax(r))
    all_cands = refined + [(float(thetas[grid_best]), float(r[grid_best]))]
    argmax_theta, sup_abs = max(all_cands, key=lambda p: p[1])

    touches = unit_circle_zero_phases(lf)
    strict = [(t, v) for t, v in all_cands
              if all(abs(t - phi) > STRUCT_PHASE_TOL for phi in touches)]
    if strict:
        argmax_strict, sup_strict = max(strict, key=lambda p: p[1])
    else:
        argmax_strict, sup_strict = argmax_theta, sup_abs

    return TLocus(thetas=thetas, values=values,
                  sup_abs=float(sup_abs), argmax_theta=float(argmax_theta),
                  sup_strict=float(sup_strict),
                  argmax_strict=float(argmax_strict),
                  touch_phases=touches)


def _verdict(margins: list[tuple[float, str]], qualifier: str | None = None,
             band: float = EPS_BAND) -> RegionVerdict:
    """Combine signed margins (>0 means satisfied) into a RegionVerdict."""
    mc = all(m > 0.0 for m, _ in margins)
    marginal = any(abs(m) <= band for m, _ in margins)
    failed = [d for m, d in margins if m <= 0.0]
    if failed:
        detail = "violated: " + "; ".join(failed)
    else:
        worst = min(margins, key=lambda p: p[0])
        detail = f"inside region (tightest margin {worst[0]:.3g} at {worst[1]})"
    return RegionVerdict(mc=mc, marginal=marginal, detail=detail,
                         qualifier=qualifier)


def mc_region_analytic(kind: LearningKind, point: ABPoint,
                       v: float) -> RegionVerdict:
    """Closed-form monotonic-convergence test for the named filters.

    The inequality sets are evaluated exactly as printed for each filter;
    for the 3-term one-sided filters they are necessary-but-possibly-
    insufficient endpoint conditions and the verdict says so.
    """
    a, b = point.a_gain, point.b_pole
    av = a * v
    if kind is LearningKind.L1:
        return _verdict([
            (av, "0 < Av"),
            (2.0 - av, "Av < 2"),
            (b - (-1.0 + 0.5 * av), "B > -1 + Av/2"),
            ((1.0 - 0.5 * av) - b, "B < 1 - Av/2"),
        ])
    if kind is LearningKind.L2_BACK:
        return _verdict([
            (av, "0 < Av"),
            (2.0 - av, "Av < 2"),
            (b + 1.0, "B > -1"),
            ((1.0 - av) - b, "B < 1 - Av"),
        ])
    if kind is LearningKind.L2_AHEAD:
        return _verdict([
            (av, "0 < Av"),
            (1.0 - av, "Av < 1"),
            (b - (av - 1.0) / 3.0, "B >= (-1 + Av)/3"),
            ((1.0 - av) - b, "B <= 1 - Av"),
        ])
    if kind is LearningKind.L3_SYMMETRIC:
        return RegionVerdict(
            mc=False, marginal=False,
            detail="no MC domain: endpoint conditions contradict at any gain")
    if kind is LearningKind.L3_AHEAD:
        return _verdict([
            ((1.0 - 1.5 * av) - b, "B < 1 - 3Av/2"),
            (b - 0.5 * (1.0 + 0.5 * av), "B > (1 + Av/2)/2"),
        ], qualifier="necessary-only")
    if kind is LearningKind.L3_BACK:
        # printed for unit learning gain; bounds depend on A only
        return _verdict([
            ((-16.0 - 7.0 * a) / 42.0 - b, "B < (-16 - 7A)/42"),
            (b - (-28.0 + 7.0 * a) / 42.0, "B > (-28 + 7A)/42"),
        ], qualifier="necessary-only")
    raise UnsupportedKindError(
        f"no closed-form MC region for kind {kind.token!r}; use sup_T")


def ac_region_analytic(kind: LearningKind, point: ABPoint,
                       v: float) -> RegionVerdict:
    """Closed-form asymptotic-convergence test.

    Causal filters have every iteration-matrix eigenvalue equal to
    1 - v*A, so AC holds on 0 < A < 2/v independent of B.  The look-ahead
    filters use fitted boundary curves stated for v = 1 and the verdict
    is labeled as an empirical fit.
    """
    a, b = point.a_gain, point.b_pole
    if kind in (LearningKind.L1, LearningKind.L2_BACK, LearningKind.L3_BACK):
        return _verdict([
            (v * a, "0 < vA"),
            (2.0 - v * a, "vA < 2"),
        ])
    if kind in (LearningKind.L2_AHEAD, LearningKind.L3_AHEAD):
        if v != 1.0:
            raise UnsupportedKindError(
                f"AC curves for {kind.token!r} are stated for v = 1 only")
        if kind is LearningKind.L2_AHEAD:
            lo = 0.5 * (-1.0 + a / 2.0)
            hi = (2.0 - a) ** 2 / (8.0 * a)
            return _verdict([
                (b - lo, "B > (-1 + A/2)/2"),
                (hi - b, "B < (2 - A)^2/(8A)"),
            ], qualifier="empirical-fit")
        lo = -0.6 * (1.0 - a / 2.0) ** 0.8
        hi = (2.0 - a) ** 2 / (12.0 * a ** (2.0 / 3.0))
        return _verdict([
            (b - lo, "B > -0.6(1 - A/2)^0.8"),
            (hi - b, "B < (2 - A)^2/(12 A^(2/3))"),
        ], qualifier="empirical-fit")
    raise UnsupportedKindError(
        f"no closed-form AC region for kind {kind.token!r}")


def analytic_curves(kind: LearningKind, v: float):
    """Boundary curves B(A) of the closed-form regions, for overlays.

    Returns a list of (name, callable) pairs; raises UnsupportedKindError
    for kinds without closed forms.
    """
    curves: list[tuple[str, object]] = []
    if kind is LearningKind.L1:
        curves = [("mc-upper", lambda a: 1.0 - 0.5 * a * v),
                  ("mc-lower", lambda a: -1.0 + 0.5 * a * v)]
    elif kind is LearningKind.L2_BACK:
        curves = [("mc-upper", lambda a: 1.0 - a * v),
                  ("mc-lower", lambda a: -1.0)]
    elif kind is LearningKind.L2_AHEAD:
        curves = [("mc-upper", lambda a: 1.0 - a * v),
                  ("mc-lower", lambda a: (a * v - 1.0) / 3.0)]
        if v == 1.0:
            curves += [("ac-upper", lambda a: (2.0 - a) ** 2 / (8.0 * a)),
                       ("ac-lower", lambda a: 0.5 * (-1.0 + a / 2.0))]
    elif kind is LearningKind.L3_AHEAD:
        curves = [("mc-upper", lambda a: 1.0 - 1.5 * a * v),
                  ("mc-lower", lambda a: 0.5 * (1.0 + 0.5 * a * v))]
        if v == 1.0:
            curves += [
                ("ac-upper", lambda a: (2.0 - a) ** 2 / (12.0 * a ** (2 / 3))),
                ("ac-lower", lambda a: -0.6 * (1.0 - a / 2.0) ** 0.8)]
    elif kind is LearningKind.L3_BACK:
        curves = [("mc-upper", lambda a: (-16.0 - 7.0 * a) / 42.0),
                  ("mc-lower", lambda a: (-28.0 + 7.0 * a) / 42.0)]
    else:
        raise UnsupportedKindError(
            f"no closed-form region curves for kind {kind.token!r}")
    return curves
