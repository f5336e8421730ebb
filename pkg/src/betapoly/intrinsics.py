"""Expected intrinsic volumes of beta polytopes via dimension reduction.

The k-th intrinsic volume ratio of a beta polytope in dimension d equals
the volume ratio of a beta polytope in dimension k with parameter
beta' = (d - k)/2 + beta, built from the same number of points.
"""

from __future__ import annotations

import math

from .exactvol import BetaModel, LineModel, expected_volume_ratio
from .logreal import log_binomial, log_kappa

__all__ = ["log_Vk_ball", "reduce", "expected_intrinsic_ratio"]


def log_Vk_ball(d: int, k: int) -> float:
    """log V_k(B^d) = log[C(d, k) kappa_d / kappa_{d-k}]."""
    if not 0 <= k <= d:
        raise ValueError(f"need 0 <= k <= d, got k={k}, d={d}")
    return log_binomial(d, k) + log_kappa(d) - log_kappa(d - k)


def reduce(d: int, k: int, beta: float) -> tuple:
    if not 1 <= k <= d:
        raise ValueError(f"need 1 <= k <= d, got k={k}, d={d}")
    return k, 0.5 * (d - k) + beta


def expected_intrinsic_ratio(d, k, beta, size, rel_tol=1e-9):
    """E V_k(P^beta_{n,d}) / V_k(B^d).

    For fixed small k this is just the finite-d value; the threshold limit
    only applies when k grows with d.
    """
    d_red, beta_red = reduce(d, k, beta)
    model = BetaModel(d_red, beta_red) if d_red >= 2 else LineModel(d_red, beta_red)
    ratio, _ = expected_volume_ratio(model, size, rel_tol)
    return ratio


def steiner_ball_volume(d: int, t: float) -> float:
    """sum_k t^(d-k) kappa_{d-k} V_k(B^d); equals (1 + t)^d kappa_d."""
    return sum(
        t ** (d - k) * math.exp(log_kappa(d - k) + log_Vk_ball(d, k)) for k in range(d + 1)
    )
