"""FIR learning filters for trial-to-trial updates.

A learning function is a short FIR filter ``L(z) = v * sum_s c_s * z**s``
applied to the stored error of the previous trial.  Positive shifts look
ahead within the stored trial (realizable because the whole trial is
recorded before the update), negative shifts look back, and shift 0 is
the identity tap.  The banded Toeplitz form of the filter places tap
``s`` on the s-th superdiagonal, so causal (look-back only) filters lift
to lower-triangular matrices.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "LearningKind",
    "LearningFunction",
    "UnsupportedKindError",
    "named_learning",
    "learning_from_token",
    "parse_taps",
    "eval_L",
    "toeplitz_of",
    "unit_circle_zero_phases",
    "KIND_TOKENS",
]

MAX_SHIFT = 8  # sanity bound on tap shifts


class UnsupportedKindError(ValueError):
    """Raised when an operation has no closed form for the given kind."""


class LearningKind(Enum):
    L1 = "l1"
    L2_BACK = "l2back"
    L2_AHEAD = "l2ahead"
    L3_SYMMETRIC = "l3sym"
    L3_SYMMETRIC_HALF = "l3symhalf"
    L3_AHEAD = "l3ahead"
    L3_BACK = "l3back"
    CUSTOM = "custom"

    @property
    def token(self) -> str:
        return self.value


_KIND_TAPS: dict[LearningKind, tuple[tuple[int, float], ...]] = {
    LearningKind.L1: ((0, 1.0),),
    LearningKind.L2_BACK: ((-1, 1.0), (0, 1.0)),
    LearningKind.L2_AHEAD: ((0, 1.0), (1, 1.0)),
    LearningKind.L3_SYMMETRIC: ((-1, 1.0), (0, 1.0), (1, 1.0)),
    LearningKind.L3_SYMMETRIC_HALF: ((-1, 0.5), (0, 1.0), (1, 0.5)),
    LearningKind.L3_AHEAD: ((0, 1.0), (1, 1.0), (2, 1.0)),
    LearningKind.L3_BACK: ((-2, 1.0), (-1, 1.0), (0, 1.0)),
}

KIND_TOKENS = tuple(k.token for k in LearningKind if k is not LearningKind.CUSTOM)


@dataclass(frozen=True)
class LearningFunction:
    """FIR tap set plus learning gain.

    taps   : (shift, coefficient) pairs, distinct shifts, |shift| <= 8.
    gain_v : learning gain v >= 0 (v = 0 is the degenerate no-learning case).
    """

    taps: tuple[tuple[int, float], ...]
    gain_v: float = 1.0
    name: str | None = None
    kind: LearningKind = LearningKind.CUSTOM

    def __post_init__(self):
        taps = tuple(sorted((int(s), float(c)) for s, c in self.taps))
        if not taps:
            raise ValueError("learning function needs at least one tap")
        shifts = [s for s, _ in taps]
        if len(set(shifts)) != len(shifts):
            raise ValueError(f"tap shifts must be distinct, got {shifts}")
        if any(abs(s) > MAX_SHIFT for s in shifts):
            raise ValueError(f"tap shifts must satisfy |shift| <= {MAX_SHIFT}")
        if self.gain_v < 0.0:
            raise ValueError(f"learning gain must be >= 0, got {self.gain_v}")
        object.__setattr__(self, "taps", taps)

    @property
    def shifts(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.taps)

    @property
    def coefficients(self) -> tuple[float, ...]:
        return tuple(c for _, c in self.taps)

    @property
    def max_abs_shift(self) -> int:
        return max(abs(s) for s in self.shifts)

    @property
    def is_causal(self) -> bool:
        return all(s <= 0 for s in self.shifts)

    def label(self) -> str:
        if self.name:
            return self.name
        return ",".join(f"{s}:{c:g}" for s, c in self.taps)


def named_learning(kind: LearningKind, gain_v: float = 1.0) -> LearningFunction:
    """Build one of the named filters with the given learning gain."""
    if kind is LearningKind.CUSTOM:
        raise ValueError("custom kind has no fixed tap set; use parse_taps")
    return LearningFunction(taps=_KIND_TAPS[kind], gain_v=gain_v,
                            name=kind.token, kind=kind)


def learning_from_token(token: str, gain_v: float = 1.0) -> LearningFunction:
    """Resolve a CLI token such as ``l2back`` to its learning function."""
    for kind in LearningKind:
        if kind.token == token and kind is not LearningKind.CUSTOM:
            return named_learning(kind, gain_v)
    raise ValueError(
        f"unknown learning token {token!r}; expected one of {KIND_TOKENS}")


def parse_taps(text: str, gain_v: float = 1.0) -> LearningFunction:
    """Parse the compact tap syntax ``s:c,s:c,...`` into a custom filter."""
    taps = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            s_str, c_str = item.split(":")
            taps.append((int(s_str), float(c_str)))
        except ValueError as exc:
            raise ValueError(f"bad tap {item!r}: expected shift:coeff") from exc
    return LearningFunction(taps=tuple(taps), gain_v=gain_v, name=None,
                            kind=LearningKind.CUSTOM)


def eval_L(lf: LearningFunction, z: complex) -> complex:
    """Evaluate L(z) = v * sum_s c_s z**s."""
    z = complex(z)
    if z == 0 and any(s < 0 for s in lf.shifts):
        raise ValueError("L(z) has negative shifts; z = 0 is a pole")
    acc = 0.0 + 0.0j
    for s, c in lf.taps:
        acc += c * z ** s
    return lf.gain_v * acc


def toeplitz_of(lf: LearningFunction, n: int) -> np.ndarray:
    """N x N banded Toeplitz matrix of the filter.

    Entry (i, j) is v*c_s for s = j - i when tap s exists, else 0: row i
    updates element i of the next trial from element i+s of the stored
    one, and taps falling outside the trial are truncated at the edges.
    """
    if n < 1:
        raise ValueError(f"matrix size must be >= 1, got {n}")
    m = np.zeros((n, n), dtype=float)
    for s, c in lf.taps:
        if abs(s) >= n:
            continue
        i = np.arange(max(0, -s), min(n, n - s))
        m[i, i + s] = lf.gain_v * c
    return m


def unit_circle_zero_phases(lf: LearningFunction) -> tuple[float, ...]:
    """Phases theta in [0, pi] where the tap polynomial vanishes on |z|=1.

    These are the frequencies the filter cannot act on at any gain: the
    learning operator is exactly the identity there, so |T| = 1
    regardless of the plant point.  Independent of v.
    """
    shifts = lf.shifts
    coeffs = lf.coefficients
    lo = min(shifts)
    poly = np.zeros(max(shifts) - lo + 1, dtype=float)
    for s, c in lf.taps:
        poly[s - lo] = c
    # np.roots wants highest power first
    roots = np.roots(poly[::-1]) if len(poly) > 1 else np.array([])
    phases = sorted(
        abs(cmath.phase(r)) for r in roots if abs(abs(r) - 1.0) < 1e-9)
    out: list[float] = []
    for p in phases:
        if not out or p - out[-1] > 1e-9:
            out.append(p)
    return tuple(out)
