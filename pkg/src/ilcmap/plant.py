"""First-order sampled plant under proportional control.

A single-lag process (rate ``a``) sits behind a zero-order hold sampled
every ``tau_s`` seconds, with proportional gain ``kp`` and optional
integral gain ``ki``.  The dimensionless product ``U = a * tau_s`` drives
everything; for ``ki = 0`` the closed loop reduces to the one-pole map
``y -> A/(z - B)`` with

    A = 1 - exp(-U)
    B = exp(-U) * (1 + kp) - kp

and all region analysis downstream happens in the (A, B) plane, where
valid plants occupy 0 < A < 1, -1 < B < 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PlantParams",
    "ABPoint",
    "GainLimits",
    "TrialResponse",
    "MONOTONE",
    "DAMPED_OSCILLATION",
    "GROWING_OSCILLATION",
    "MONOTONE_DIVERGENT",
    "MARGINAL",
    "ab_from_plant",
    "plant_from_ab",
    "no_ilc_gain_limits",
    "classify_pole",
    "classify_gain",
    "is_divergent",
    "simulate_trial",
]

MONOTONE = "monotone"
DAMPED_OSCILLATION = "damped-oscillation"
GROWING_OSCILLATION = "growing-oscillation"
MONOTONE_DIVERGENT = "monotone-divergent"
MARGINAL = "marginal"


@dataclass(frozen=True)
class PlantParams:
    """Physical/controller parameters of the sampled loop.

    u_product : U = a * tau_s, lag rate times sample period (> 0).
    kp        : proportional gain.
    ki        : integral gain per second (0 disables integral action).
    sample_period : seconds (> 0); only enters when ki != 0.
    """

    u_product: float
    kp: float
    ki: float = 0.0
    sample_period: float = 1.0

    def __post_init__(self):
        if not (self.u_product > 0.0):
            raise ValueError(f"u_product must be > 0, got {self.u_product}")
        if not (self.sample_period > 0.0):
            raise ValueError(
                f"sample_period must be > 0, got {self.sample_period}")


@dataclass(frozen=True)
class ABPoint:
    """A point of the transformed gain/pole plane.

    Arbitrary coordinates are accepted (sweep grids probe the whole
    rectangle); ``in_plant_range`` tells whether the point corresponds to
    a realizable proportional-control plant.
    """

    a_gain: float
    b_pole: float

    @property
    def in_plant_range(self) -> bool:
        return 0.0 < self.a_gain < 1.0 and -1.0 < self.b_pole < 1.0


@dataclass(frozen=True)
class GainLimits:
    """Proportional-gain bounds of the loop without learning control.

    kp_limit_divergence  : kp below this keeps the pole above -1 (stable).
    kp_limit_oscillation : kp below this keeps the pole positive
                           (monotone step response); always the tighter
                           of the two upper bounds.
    kp_floor             : kp above this keeps the pole below +1.
    """

    kp_limit_divergence: float
    kp_limit_oscillation: float
    kp_floor: float = -1.0

    @property
    def stable_interval(self) -> tuple[float, float]:
        return (self.kp_floor, self.kp_limit_divergence)

    @property
    def oscillation_free_interval(self) -> tuple[float, float]:
        return (self.kp_floor, self.kp_limit_oscillation)


@dataclass(eq=False)
class TrialResponse:
    """Within-trial step response: samples y_0 .. y_steps plus a label."""

    samples: np.ndarray
    classification: str


def ab_from_plant(params: PlantParams) -> ABPoint:
    """Map (U, kp) to the transformed coordinates (A, B).

    Only defined for the one-pole problem, i.e. ki must be zero.
    """
    if params.ki != 0.0:
        raise ValueError(
            "the (A, B) transform is defined for ki = 0 only; "
            f"got ki={params.ki}")
    emu = math.exp(-params.u_product)
    return ABPoint(a_gain=1.0 - emu, b_pole=emu * (1.0 + params.kp) - params.kp)


def plant_from_ab(point: ABPoint, sample_period: float = 1.0) -> PlantParams:
    """Invert the (A, B) transform back to (U, kp).

    Requires 0 < A < 1; round-trips with :func:`ab_from_plant` to within
    1e-12 relative.
    """
    a = point.a_gain
    if not (0.0 < a < 1.0):
        raise ValueError(f"A must lie in (0, 1) to invert, got {a}")
    emu = 1.0 - a
    u = -math.log(emu)
    kp = (emu - point.b_pole) / a
    return PlantParams(u_product=u, kp=kp, sample_period=sample_period)


def no_ilc_gain_limits(u_product: float) -> GainLimits:
    """Proportional-gain bounds keeping the no-learning loop stable.

    The pole constraints B > -1, B > 0, B < 1 translate to
    kp < (1+e^U)/(e^U-1), kp < 1/(e^U-1) and kp > -1 respectively; the
    second upper bound always lies below the first.
    """
    if not (u_product > 0.0):
        raise ValueError(f"u_product must be > 0, got {u_product}")
    eu = math.exp(u_product)
    return GainLimits(
        kp_limit_divergence=(1.0 + eu) / (eu - 1.0),
        kp_limit_oscillation=1.0 / (eu - 1.0),
    )


def classify_pole(b: float) -> str:
    """Label the step-response shape of the one-pole map by its pole B."""
    if b == 1.0 or b == -1.0:
        return MARGINAL
    if b > 1.0:
        return MONOTONE_DIVERGENT
    if b < -1.0:
        return GROWING_OSCILLATION
    if b >= 0.0:
        return MONOTONE
    return DAMPED_OSCILLATION


def classify_gain(u_product: float, kp: float) -> str:
    """Human-readable stability label for a (U, kp) pair without learning."""
    b = ab_from_plant(PlantParams(u_product=u_product, kp=kp)).b_pole
    label = classify_pole(b)
    return {
        MONOTONE: "stable, monotone",
        DAMPED_OSCILLATION: "stable, oscillatory",
        GROWING_OSCILLATION: "unstable, oscillatory",
        MONOTONE_DIVERGENT: "unstable, monotone",
        MARGINAL: "marginal",
    }[label]


def is_divergent(classification: str) -> bool:
    return classification in (GROWING_OSCILLATION, MONOTONE_DIVERGENT)


def simulate_trial(point: ABPoint, reference: float = 1.0,
                   steps: int = 50) -> TrialResponse:
    """Step response of the closed loop within one trial, learning off.

    Runs y_{k+1} = B*y_k + A*r from rest (y_0 = 0) for ``steps`` samples,
    returning steps+1 values and the pole classification.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    a, b = point.a_gain, point.b_pole
    y = np.empty(steps + 1, dtype=float)
    y[0] = 0.0
    for k in range(steps):
        y[k + 1] = b * y[k] + a * reference
    return TrialResponse(samples=y, classification=classify_pole(b))
