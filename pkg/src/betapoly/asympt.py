"""Threshold maps for the volume phase transition.

With n = (d / 2x)^(d/2 + beta) the normalized expected volume tends to
exp(-x) as d grows. The forward map fixes the vanishing correction term to
zero, so :func:`threshold_log_n` and :func:`x_of` are exact inverses.
Pointwise predictions carry no claim about a limit along sequences where the
predictor oscillates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

__all__ = [
    "PhasePoint",
    "threshold_log_n",
    "x_of",
    "predicted_ratio",
    "window",
    "window_w",
    "phase_point",
]


@dataclass(frozen=True)
class PhasePoint:
    d: int
    beta: float
    log_n: float
    x: float
    ratio_predicted: float
    ratio_exact: Optional[float] = None


def threshold_log_n(d: int, beta: float, x: float) -> float:
    """log n on the critical curve: (d/2 + beta) * log(d / 2x)."""
    if not (x > 0 and 2 * x < d):
        raise ValueError(f"threshold_log_n requires 0 < 2x < d, got x={x}, d={d}")
    return (0.5 * d + beta) * math.log(d / (2.0 * x))


def x_of(d: int, beta: float, log_n: float) -> float:
    """Inverse of :func:`threshold_log_n`: x = (d/2) exp(-2 log n / (d + 2 beta))."""
    if d + 2 * beta <= 0:
        raise ValueError(f"x_of needs d + 2*beta > 0 (d={d}, beta={beta})")
    return 0.5 * d * math.exp(-2.0 * log_n / (d + 2.0 * beta))


def predicted_ratio(d: int, beta: float, log_n: float) -> float:
    """Limiting normalized volume exp(-x_of(d, beta, log_n))."""
    if log_n < 0:
        raise ValueError("log_n must be non-negative")
    return math.exp(-x_of(d, beta, log_n))


def window_w(d: int, beta: float, x: float) -> tuple:
    """The window endpoints as (1 - a^2, 1 - b^2), exact in relative precision."""
    D = 0.5 * (d + 1)
    z = D + beta
    if not (x > 0 and D > x):
        raise ValueError(f"window requires 0 < x < D, got x={x}, d={d}, beta={beta}")
    wa = (x / D) * (1.0 + math.log(D * D * z) / z)
    wb = x / D
    if wa >= 1.0:
        raise ValueError(
            f"window radicand non-positive for x={x}, d={d}, beta={beta} (1 - a^2 = {wa:.6g})"
        )
    return wa, wb


def window(d: int, beta: float, x: float) -> tuple:
    """Concentration window (a, b), 0 < a < b < 1, around the integrand's mass."""
    wa, wb = window_w(d, beta, x)
    return math.sqrt(1.0 - wa), math.sqrt(1.0 - wb)


def phase_point(d: int, beta: float, x: float, ratio_exact: Optional[float] = None) -> PhasePoint:
    log_n = threshold_log_n(d, beta, x)
    return PhasePoint(d, beta, log_n, x, math.exp(-x), ratio_exact)
