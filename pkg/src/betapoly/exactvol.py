"""Exact expected volume of beta polytopes by log-domain quadrature.

With D = (d+1)/2, z = D + beta, N = n - d - 1 and q = 2D(D+beta) - 1,

    E vol_d(P) / kappa_d = (K / kappa_d) * integral_{-1}^{1} (1-h^2)^q F_{z-1}(h)^N dh,
    K / kappa_d = 4 D z * C(n, 2D) * c_z^(2D).

For large N the integrand is a narrow spike near h = 1 and the constant is
astronomically large, so both are handled as logarithms. Near the spike the
integral is taken in the variable u = log(1 - h^2), which keeps 1 - h^2 at
full relative precision, shifted by u0 = -log(N)/z. The factor n^(2D) of the
constant and the factor (1-h^2)^(q+1) of the integrand then cancel
analytically instead of in floating point, where each can exceed 1e7.

The formula is used unchanged at beta = -1 (points on the sphere).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

from . import asympt
from .betacdf import log_tail_from_w
from .logreal import (
    NEG_INF,
    SampleSize,
    log1mexp,
    log_binomial,
    log_c,
    log_gamma,
    log_gamma_ratio,
)
from .quadrature import integrate_exp

__all__ = [
    "BetaModel",
    "LineModel",
    "NormalizationConstants",
    "QuadratureReport",
    "ToleranceNotReached",
    "InvariantViolation",
    "constants",
    "log_integrand",
    "find_mode",
    "expected_volume_ratio",
    "closed_form_simplex_ratio",
    "log_constant_bound",
]

LOG2 = math.log(2.0)
HALF_LOG_PI = 0.5 * math.log(math.pi)
# split between the h-coordinate and u-coordinate parts of the integral
H_SPLIT = 0.5
_EPS = 2.0 ** -52
U_SPLIT = math.log1p(-H_SPLIT * H_SPLIT)


class ToleranceNotReached(ArithmeticError):
    """Quadrature stopped before meeting the requested tolerance."""

    def __init__(self, message, estimate, error_bound):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class InvariantViolation(ArithmeticError):
    pass


@dataclass(frozen=True)
class BetaModel:
    d: int
    beta: float

    _min_d = 2

    def __post_init__(self):
        if isinstance(self.d, bool) or int(self.d) != self.d or self.d < self._min_d:
            raise ValueError(f"dimension d must be an integer >= {self._min_d}, got {self.d!r}")
        if not (self.beta >= -1.0) or not math.isfinite(self.beta):
            raise ValueError(f"beta must be >= -1, got {self.beta!r}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def D(self) -> float:
        return 0.5 * (self.d + 1)

    @property
    def z(self) -> float:
        return self.D + self.beta


class LineModel(BetaModel):
    """One-dimensional model; only reached through intrinsic-volume reduction with k = 1."""

    _min_d = 1


@dataclass(frozen=True)
class NormalizationConstants:
    log_K_over_kappa: float
    q: float


@dataclass
class QuadratureReport:
    log_integral: float
    mode_h: Optional[float]
    window: Tuple[float, float]
    nodes_used: int
    rel_error_estimate: float
    method: str  # "direct" or "laplace_window"
    log_ratio: float = field(default=NEG_INF)

    def as_dict(self) -> dict:
        return {
            "log_integral": self.log_integral,
            "mode_h": self.mode_h,
            "window": list(self.window),
            "nodes_used": self.nodes_used,
            "rel_error_estimate": self.rel_error_estimate,
            "method": self.method,
        }


def _size(n: Union[int, SampleSize]) -> SampleSize:
    return SampleSize.coerce(n)


def constants(model: BetaModel, size: Union[int, SampleSize]) -> NormalizationConstants:
    size = _size(size)
    D, z = model.D, model.z
    k = model.d + 1  # 2D
    if not size.at_least(k):
        raise ValueError(f"n must be at least d+1 = {k}, got {size}")
    log_k = math.log(4.0 * D * z) + log_binomial(size, k) + k * log_c(z)
    q = (model.d + 1) * (model.beta - 0.5) + 0.5 * model.d * (model.d + 3)
    return NormalizationConstants(log_k, q)


class _Integrand:
    """Evaluates g(h) = q log(1-h^2) + N log F_{z-1}(h) in h- and u-coordinates."""

    def __init__(self, model: BetaModel, size: SampleSize):
        self.model = model
        self.z = model.z
        self.q = 2.0 * model.D * model.z - 1.0
        self.log_N = size.log_N(model.d)

    def _n_log_F(self, log_tail, positive):
        # N log F where log F = log1p(-T) for h > 0 and log T for h < 0
        if self.log_N == NEG_INF:
            return np.zeros_like(log_tail)
        t = np.exp(np.minimum(log_tail, 0.0))
        with np.errstate(divide="ignore"):
            small = log_tail < -18.0
            # log(-log1p(-T)) = log T + log1p(T/2 + T^2/3 + ...)
            neg_log_F_pos = np.where(
                small,
                log_tail + t / 2.0,
                np.log(-np.log1p(-np.where(small, 0.0, t))),
            )
            neg_log_F_neg = np.log(-np.minimum(log_tail, -LOG2))
        lg = np.where(positive, neg_log_F_pos, neg_log_F_neg)
        with np.errstate(over="ignore"):
            return -np.exp(self.log_N + lg)

    def g_h(self, h):
        h = np.asarray(h, dtype=float)
        a = np.abs(h)
        w = (1.0 - a) * (1.0 + a)
        with np.errstate(divide="ignore"):
            out = self.q * np.log(w)
        inside = (a < 1.0)
        lt = np.full(h.shape, NEG_INF)
        if np.any(inside):
            lt[inside] = log_tail_from_w(self.z, w[inside], a[inside] ** 2)
        lt[a == 0] = -LOG2
        with np.errstate(invalid="ignore"):
            out = out + np.where(inside, self._n_log_F(lt, h >= 0), 0.0)
        return np.where(inside, out, NEG_INF)

    def g_u(self, u):
        """g at h = sqrt(1 - e^u) > 0."""
        u = np.asarray(u, dtype=float)
        w = np.exp(u)
        h2 = -np.expm1(u)
        lt = log_tail_from_w(self.z, w, h2, log_w=u)
        return self.q * u + self._n_log_F(lt, np.ones(u.shape, dtype=bool))

    def G_u(self, u):
        """log of the integrand after dh = e^u / (2h) du."""
        u = np.asarray(u, dtype=float)
        return self.g_u(u) + u - LOG2 - 0.5 * np.log(-np.expm1(u))

    def R_v(self, v, u0, L):
        """G_u(u) - (q + 1) u at u = v + u0, where z u0 = L - log N.

        N (1 - F) is assembled from z v + L, never from log N + z u, whose
        cancellation would turn the rounding of u into noise of relative
        size z N (1 - F) ulp(u).
        """
        v = np.asarray(v, dtype=float)
        u = v + u0
        w = np.exp(u)
        h2 = -np.expm1(u)
        log_NT = log_tail_from_w(self.z, w, h2, log_w=u, z_log_w=self.z * v + L)
        lt = log_NT - self.log_N
        t = np.exp(np.minimum(lt, 0.0))
        small = lt < -18.0
        with np.errstate(divide="ignore"):
            scaled = np.where(
                small,
                log_NT + t / 2.0,
                self.log_N + np.log(-np.log1p(-np.where(small, 0.0, t))),
            )
        with np.errstate(over="ignore"):
            n_log_F = -np.exp(scaled)
        return n_log_F - LOG2 - 0.5 * np.log(h2)

    def stationarity(self, u):
        """log(N f(h) / F(h)) - log(2 q h / (1 - h^2)); decreasing in h, increasing in u."""
        u = float(u)
        w = math.exp(u)
        h2 = -math.expm1(u)
        lt = float(log_tail_from_w(self.z, w, h2, log_w=u)[0])
        log_F = float(log1mexp(min(lt, 0.0)))
        lhs = self.log_N + math.log(2.0 * self.z) + log_c(self.z) + (self.z - 1.0) * u - log_F
        rhs = math.log(2.0 * self.q) + 0.5 * math.log(h2) - u
        return lhs - rhs


def log_integrand(model: BetaModel, size: Union[int, SampleSize], h):
    """g(h) = q log(1-h^2) + N log F_{z-1}(h); -inf at h = +-1."""
    size = _size(size)
    h_arr = np.asarray(h, dtype=float)
    if np.any(np.abs(h_arr) > 1):
        raise ValueError("log_integrand requires |h| <= 1")
    out = _Integrand(model, size).g_h(np.atleast_1d(h_arr))
    return float(out[0]) if h_arr.ndim == 0 else out


def _find_mode_u(ig: _Integrand) -> Optional[float]:
    if ig.log_N == NEG_INF:
        return None
    phi = ig.stationarity
    # phi increases with u; phi(u -> -inf) < 0 < phi(u -> 0-)
    if phi(U_SPLIT) <= 0.0:
        # bracket on the h side: bisect on h in (0, H_SPLIT)
        h_lo, h_hi = 0.0, H_SPLIT
        for _ in range(200):
            hm = 0.5 * (h_lo + h_hi)
            um = math.log1p(-hm * hm)
            if um == 0.0:
                return um
            val = phi(um)
            if abs(val) < 1e-13:
                return um
            if val > 0:
                h_lo = hm
            else:
                h_hi = hm
            if h_hi - h_lo <= 2e-16 * h_hi:
                return math.log1p(-(0.5 * (h_lo + h_hi)) ** 2)
        raise RuntimeError("mode bisection did not converge")
    hi = U_SPLIT
    step = 1.0
    lo = hi - step
    while phi(lo) > 0.0:
        hi = lo
        step *= 2.0
        lo = hi - step
        if step > 1e12:
            raise RuntimeError("could not bracket the mode")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = phi(mid)
        if abs(val) < 1e-13:
            return mid
        if val < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4e-16 * abs(mid):
            return 0.5 * (lo + hi)
    raise RuntimeError("mode bisection did not converge")


def find_mode(model: BetaModel, size: Union[int, SampleSize]) -> Optional[float]:
    """Location h* in (0, 1) of the maximum of g, or None when N = 0."""
    u = _find_mode_u(_Integrand(model, _size(size)))
    return None if u is None else math.sqrt(-math.expm1(u))


def closed_form_simplex_ratio(model: BetaModel) -> float:
    """Normalized expected volume at n = d + 1, from Gamma functions only."""
    return math.exp(_log_closed_form(model))


def _log_closed_form(model: BetaModel) -> float:
    c = constants(model, model.d + 1)
    Q = 2.0 * model.D * model.z
    return c.log_K_over_kappa + HALF_LOG_PI + log_gamma_ratio(Q, 0.0, 0.5)


def _curvature_width(f, x0, scale):
    """1/sqrt(-f'') at x0 from a central difference; falls back to ``scale``."""
    step = scale
    for _ in range(40):
        f0 = float(f(np.array([x0]))[0])
        fp = float(f(np.array([x0 + step]))[0])
        fm = float(f(np.array([x0 - step]))[0])
        d2 = (fp - 2.0 * f0 + fm) / (step * step)
        drop = f0 - max(fp, fm)
        if np.isfinite(d2) and d2 < 0 and drop < 0.5:
            return 1.0 / math.sqrt(-d2)
        step *= 0.25
    return scale


def _direct(ig: _Integrand, mode_h, rel_tol):
    center = 0.0 if mode_h is None else mode_h
    sigma = _curvature_width(ig.g_h, center, min(0.1, 1.0 - center) if mode_h else 0.1)
    offsets = np.array([0.0, 0.5, 1, 2, 4, 8, 16, 32, 64])
    bps = np.concatenate([center - sigma * offsets, center + sigma * offsets, [0.0]])
    bps = bps[(bps > -1) & (bps < 1)]
    grid = np.concatenate([bps, np.linspace(-0.99, 0.99, 41)])
    shift = float(np.max(ig.g_h(grid)))
    res = integrate_exp(ig.g_h, -1.0, 1.0, shift=shift, rel_tol=rel_tol / 4, breakpoints=bps)
    return res, shift, (-1.0, 1.0)


def _laplace_window(ig: _Integrand, u_star: float, seed_window, rel_tol):
    """Integrate around the mode in v = u - u0, doubling the window until the tails vanish.

    Returns the integral of exp(G) in units of exp((q + 1) u0), u0 = (L - log N) / z.
    The factor is never formed numerically: it is folded into the constant.
    """
    L = _mode_offset(ig.model)
    u0 = (L - ig.log_N) / ig.z
    qp1 = ig.q + 1.0
    scaled_u0 = 2.0 * ig.model.D * (L - ig.log_N)

    def Gv(v):
        v = np.asarray(v, dtype=float)
        return qp1 * v + ig.R_v(v, u0, L)

    def h_part_logf(h):
        return ig.g_h(h) - scaled_u0

    v_star = u_star - u0
    v_split = U_SPLIT - u0
    shift = float(Gv(np.array([v_star]))[0])
    sigma = _curvature_width(Gv, v_star, 0.1)
    lo = v_star - 8.0 * sigma
    hi = v_star + 8.0 * sigma
    if seed_window is not None:
        lo = min(lo, seed_window[0] - u0)
        hi = max(hi, seed_window[1] - u0)
    hi = min(hi, v_split)
    lo = min(lo, hi - sigma)
    width = max(hi - lo, 4.0 * sigma)
    inner_tol = rel_tol / 20.0
    # breakpoints pinned to the peak so that wide pieces cannot step over it
    offsets = np.array([0.5, 1, 2, 4, 8, 16, 32, 64])
    peak_bps = np.concatenate([[v_star], v_star - sigma * offsets, v_star + sigma * offsets])

    def part(a, b):
        bps = peak_bps[(peak_bps > a) & (peak_bps < b)]
        if b - a > 16 * sigma:
            bps = np.concatenate([bps, np.linspace(a, b, 17)[1:-1]])
        return integrate_exp(Gv, a, b, shift=shift, rel_tol=inner_tol, breakpoints=np.sort(bps))

    def h_part():
        return integrate_exp(h_part_logf, -1.0, H_SPLIT, shift=shift, rel_tol=inner_tol)

    def to_h(v):
        return math.sqrt(-math.expm1(v + u0))

    core = part(lo, hi)
    total, err, nodes = core.value, core.error, core.nodes
    h_part_done = hi >= v_split
    if h_part_done:
        hp = h_part()
        total += hp.value
        err += hp.error
        nodes += hp.nodes
    for _ in range(60):
        left = part(lo - width, lo)
        lo -= width
        tail_r_val = tail_r_err = 0.0
        if not h_part_done:
            new_hi = min(hi + width, v_split)
            right = part(hi, new_hi)
            hi = new_hi
            tail_r_val, tail_r_err, nodes = right.value, right.error, nodes + right.nodes
            if hi >= v_split:
                hp = h_part()
                tail_r_val += hp.value
                tail_r_err += hp.error
                nodes += hp.nodes
                h_part_done = True
        nodes += left.nodes
        total += left.value + tail_r_val
        err += left.error + tail_r_err
        if total <= 0:
            raise ArithmeticError("integrand vanished on the window")
        small_left = left.value < 0.1 * rel_tol * total
        small_right = h_part_done or tail_r_val < 0.1 * rel_tol * total
        if small_left and small_right:
            win_h = (-1.0 if h_part_done else to_h(hi), to_h(lo))
            # the last tail pieces bound what lies beyond the window
            bound = left.value + (0.0 if h_part_done else tail_r_val)
            return total, err + bound, nodes, shift, win_h
        width *= 2.0
    raise ToleranceNotReached("window expansion did not converge", total, err)


def _choose_method(model: BetaModel, size: SampleSize, ig: _Integrand, mode_u):
    """Returns (method, seed window in u or None)."""
    if mode_u is None:
        return "direct", None
    seed = None
    mass_concentrated = False
    try:
        x = asympt.x_of(model.d, model.beta, size.log_n)
        x = min(max(x, 1e-6), 0.5 * model.d * 0.999)
        wa, wb = asympt.window_w(model.d, model.beta, x)
        seed = (math.log(wb), math.log(wa))
        log_mass = ig.log_N + log_c(model.z) + model.z * math.log(wa)
        mass_concentrated = log_mass > math.log(10.0)
    except ValueError:
        mass_concentrated = mode_u < U_SPLIT
    if mass_concentrated:
        return "laplace_window", seed
    return "direct", None


def _mode_offset(model: BetaModel) -> float:
    """L with z u* ~ L - log N: the mode of G_u when F(h*) ~ 1."""
    q = 2.0 * model.D * model.z - 1.0
    return math.log(q / model.z) - log_c(model.z)


def _log_K_shifted(model: BetaModel, size: SampleSize) -> float:
    """log(K/kappa_d) + (q + 1) u0 with u0 = (L - log N) / z.

    Since (q + 1) / z = 2D this is log(K/kappa_d) - 2D log N + 2D L, and the
    first two terms are combined without cancellation.
    """
    k = model.d + 1
    if size.exact_n is not None:
        inv_N = 1.0 / (size.exact_n - k)
    else:
        inv_N = math.exp(-size.log_N(model.d))
    j = np.arange(1, k + 1, dtype=float)
    log_ratio_binom = float(np.log1p(j * inv_N).sum()) - log_gamma(k + 1.0)
    return (math.log(4.0 * model.D * model.z) + log_ratio_binom
            + k * (log_c(model.z) + _mode_offset(model)))


def log_constant_bound(model: BetaModel, x: float) -> float:
    """log (D/x)^(2D(D+beta)), an upper bound for K/kappa_d once D is large and
    N ~ (D/x)^(D+beta) sqrt(1 + beta/D)."""
    D = model.D
    return 2.0 * D * model.z * math.log(D / x)


def expected_volume_ratio(model: BetaModel, size: Union[int, SampleSize], rel_tol: float = 1e-9,
                          method: str = "auto"):
    """E vol_d(P^beta_{n,d}) / kappa_d together with a :class:`QuadratureReport`.

    ``method`` forces "direct" or "laplace_window" instead of the automatic
    choice; forcing the window needs a mode (N >= 1).

    Raises :class:`ToleranceNotReached` when the quadrature error estimate
    stays above ``rel_tol``, and :class:`InvariantViolation` when the result
    leaves [0, 1] by more than ``rel_tol``.
    """
    if not (1e-12 < rel_tol < 1e-2):
        raise ValueError("rel_tol must lie in (1e-12, 1e-2)")
    size = _size(size)
    cst = constants(model, size)
    ig = _Integrand(model, size)
    mode_u = _find_mode_u(ig)
    mode_h = None if mode_u is None else math.sqrt(-math.expm1(mode_u))
    auto_method, seed = _choose_method(model, size, ig, mode_u)
    if method == "auto":
        method = auto_method
    elif method not in ("direct", "laplace_window"):
        raise ValueError(f"unknown method {method!r}")
    elif method == "laplace_window" and mode_u is None:
        raise ValueError("laplace_window needs N >= 1")

    if method == "direct":
        res, shift, win = _direct(ig, mode_h, rel_tol)
        value, err, nodes = res.value, res.error, res.nodes
        log_const = cst.log_K_over_kappa
    else:
        value, err, nodes, shift, win = _laplace_window(ig, mode_u, seed, rel_tol)
        log_const = _log_K_shifted(model, size)

    if not value > 0:
        log_ratio = NEG_INF
        rel_err = 0.0
    else:
        log_ratio = log_const + shift + math.log(value)
        # rounding of the O(|log_const| + |shift|) terms that cancel in log_ratio
        rounding = 4.0 * _EPS * (abs(log_const) + abs(shift) + 1.0)
        rel_err = err / value + rounding
    log_integral = log_ratio - cst.log_K_over_kappa
    report = QuadratureReport(log_integral, mode_h, win, nodes, rel_err, method, log_ratio)
    ratio = math.exp(log_ratio) if log_ratio < 700 else math.inf
    if rel_err > rel_tol:
        raise ToleranceNotReached(
            f"relative error {rel_err:.3g} exceeds tolerance {rel_tol:.3g}", ratio, rel_err * ratio
        )
    if ratio > 1.0:
        if ratio > 1.0 + rel_tol:
            raise InvariantViolation(f"volume ratio {ratio!r} exceeds 1 beyond tolerance")
        ratio = 1.0
    return ratio, report
