"""Distribution function of the one-dimensional marginal of a beta law.

    F_{z-1}(h) = 2 z c_z * integral_{-1}^{h} (1 - s^2)^(z-1) ds,   h in [-1, 1].

Substituting u = s^2 gives, for h >= 0,

    1 - F_{z-1}(h) = I_{1-h^2}(z, 1/2) / 2 = (1 - I_{h^2}(1/2, z)) / 2,

where I is the regularized incomplete beta function. The tail is evaluated
in log space straight from the continued fraction, so values far below the
double-precision underflow threshold keep full relative accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .logreal import NEG_INF, log1mexp, log_c, log_gamma_ratio

__all__ = [
    "FParams",
    "F",
    "log_F",
    "log_one_minus_F",
    "log_tail_from_w",
    "envelope_F_tail",
    "log_betainc_cf",
]

LOG2 = math.log(2.0)
HALF_LOG_PI = 0.5 * math.log(math.pi)
_FPMIN = 1e-300
_EPS = 2.3e-16
_MAXIT = 20000
# above this the tail is taken from the (tight) analytic envelope
ENVELOPE_Z = 1e7


class ContinuedFractionError(ArithmeticError):
    pass


@dataclass(frozen=True)
class FParams:
    z: float

    def __post_init__(self):
        if not self.z > 0:
            raise ValueError(f"z must be positive, got {self.z!r}")


def _as_z(params) -> float:
    return params.z if isinstance(params, FParams) else FParams(float(params)).z


def _betacf(a, b, x):
    """Modified Lentz evaluation of the incomplete-beta continued fraction.

    Elements are frozen once converged; otherwise rounding jitter in an
    already converged element can keep the batch from ever terminating.
    """
    a, b, x = (np.array(v, dtype=float) for v in np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, x))))
    shape = x.shape
    a, b, x = a.ravel(), b.ravel(), x.ravel()
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
    d = 1.0 / d
    h = d.copy()
    result = np.empty_like(x)
    idx = np.arange(x.size)
    for m in range(1, _MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        h = h * d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        done = np.abs(delta - 1.0) <= _EPS
        if np.any(done):
            result[idx[done]] = h[done]
            keep = ~done
            if not np.any(keep):
                return result.reshape(shape)
            a, b, x, qab, qap, qam, c, d, h, idx = (
                v[keep] for v in (a, b, x, qab, qap, qam, c, d, h, idx)
            )
    raise ContinuedFractionError(f"incomplete beta continued fraction did not converge (a={a.max()}, b={b.max()})")


def _log_beta_half(z: float) -> float:
    # log B(z, 1/2) = log Gamma(1/2) + log Gamma(z) - log Gamma(z + 1/2)
    return HALF_LOG_PI + log_gamma_ratio(z, 0.0, 0.5)


def log_betainc_cf(a, b, x, y, log_beta, log_x=None, log_y=None, a_log_x=None):
    """log I_x(a, b) from the continued fraction, with y = 1 - x passed separately.

    Only accurate where the fraction converges fast, x < (a + 1) / (a + b + 2).
    Precomputed log_x / log_y may be supplied; with a large exponent the
    rounding of log(x) is amplified a-fold, so callers that can form it via
    log1p should.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore"):
        if log_x is None:
            log_x = np.log(x)
        if log_y is None:
            log_y = np.log(y)
        if a_log_x is None:
            a_log_x = a * log_x
        front = a_log_x + b * log_y - log_beta - np.log(a)
    cf = _betacf(a, b, np.where(x > 0, x, 0.0))
    return front + np.log(cf)


def _accurate_logs(w, h2):
    # log(w) and log(h2) with w + h2 = 1, each through log1p of the smaller one
    with np.errstate(divide="ignore"):
        log_w = np.where(h2 < 0.5, np.log1p(-np.minimum(h2, 1.0)), np.log(w))
        log_h2 = np.where(w < 0.5, np.log1p(-np.minimum(w, 1.0)), np.log(h2))
    return log_w, log_h2


def log_tail_from_w(z: float, w, h2, log_w=None, z_log_w=None):
    """log(1 - F_{z-1}(h)) for h = +sqrt(h2) >= 0, given w = 1 - h^2 and h2 = h^2.

    Both are passed because near h = 1 the caller usually knows w to full
    relative precision while 1 - h*h would not. ``log_w`` may be given as
    well, which keeps the result finite when w itself underflows.

    ``z_log_w`` replaces the product z * log(w) in the leading factor, and the
    result is shifted by z_log_w - z * log_w accordingly. Callers use it to
    fold a large constant into that exponent without cancellation.
    """
    w = np.atleast_1d(np.asarray(w, dtype=float))
    h2 = np.atleast_1d(np.asarray(h2, dtype=float))
    w, h2 = np.broadcast_arrays(w, h2)
    out = np.empty(w.shape)
    lb = _log_beta_half(z)
    acc_log_w, log_h2 = _accurate_logs(w, h2)
    if log_w is None:
        log_w = acc_log_w
        zero = w <= 0.0
    else:
        log_w = np.broadcast_to(np.asarray(log_w, dtype=float), w.shape)
        zero = log_w == NEG_INF
    switch = (z + 1.0) / (z + 2.5)
    use_w = w < switch
    extra = None
    if z_log_w is not None:
        z_log_w = np.broadcast_to(np.asarray(z_log_w, dtype=float), w.shape)
        with np.errstate(invalid="ignore"):
            extra = z_log_w - z * log_w
    if np.any(use_w & ~zero):
        m = use_w & ~zero
        zl = None if z_log_w is None else z_log_w[m]
        out[m] = log_betainc_cf(z, 0.5, w[m], h2[m], lb, log_w[m], log_h2[m], a_log_x=zl) - LOG2
    if np.any(~use_w):
        m = ~use_w
        # I_w(z, 1/2) = 1 - I_{h^2}(1/2, z)
        hh = h2[m]
        lj = np.full(hh.shape, NEG_INF)
        pos = hh > 0
        if np.any(pos):
            lj[pos] = log_betainc_cf(0.5, z, hh[pos], w[m][pos], lb, log_h2[m][pos], log_w[m][pos])
        out[m] = log1mexp(np.minimum(lj, 0.0)) - LOG2
        if extra is not None:
            out[m] += extra[m]
    out[zero] = NEG_INF
    return out


def _envelope_arrays(z: float, w, h):
    with np.errstate(divide="ignore", invalid="ignore"):
        log_w, _ = _accurate_logs(w, h * h)
        upper = log_c(z) + z * log_w - np.log(h)
        corr = 1.0 - w / (2.0 * h * h * (z + 1.0))
        lower = np.where(corr > 0, upper + np.log(np.where(corr > 0, corr, 1.0)), NEG_INF)
    return lower, upper


def envelope_F_tail(params, h):
    """Analytic lower and upper bounds on log(1 - F_{z-1}(h)) for 0 < h < 1.

    The lower bound is -inf wherever its polynomial correction factor is not positive.
    """
    z = _as_z(params)
    h_arr = np.asarray(h, dtype=float)
    if np.any((h_arr <= 0) | (h_arr >= 1)):
        raise ValueError("envelope_F_tail requires 0 < h < 1")
    lower, upper = _envelope_arrays(z, (1.0 - h_arr) * (1.0 + h_arr), h_arr)
    if h_arr.ndim == 0:
        return float(lower), float(upper)
    return lower, upper


def _log_tail(z: float, h):
    h = np.asarray(h, dtype=float)
    w = (1.0 - h) * (1.0 + h)
    if z > ENVELOPE_Z:
        lower, upper = _envelope_arrays(z, w, h)
        ok = np.isfinite(lower)
        if np.all(ok):
            # midpoint of the envelope in linear scale
            return upper + np.log1p(-0.5 * (1.0 - np.exp(lower - upper)))
    return log_tail_from_w(z, w, h * h)


def log_one_minus_F(params, h):
    """log(1 - F_{z-1}(h)) for 0 < h < 1, accurate far below float underflow."""
    z = _as_z(params)
    h_arr = np.asarray(h, dtype=float)
    if np.any((h_arr <= 0) | (h_arr >= 1)):
        raise ValueError("log_one_minus_F requires 0 < h < 1")
    out = _log_tail(z, np.atleast_1d(h_arr))
    return float(out[0]) if h_arr.ndim == 0 else out


def log_F(params, h):
    """log F_{z-1}(h) on [-1, 1]; uses the tail on the side where it is small."""
    z = _as_z(params)
    h_arr = np.asarray(h, dtype=float)
    if np.any((h_arr < -1) | (h_arr > 1)) or np.any(np.isnan(h_arr)):
        raise ValueError("F is defined on [-1, 1]")
    flat = np.atleast_1d(h_arr)
    out = np.empty(flat.shape)
    a = np.abs(flat)
    interior = (a > 0) & (a < 1)
    lt = np.full(flat.shape, NEG_INF)
    if np.any(interior):
        lt[interior] = _log_tail(z, a[interior])
    lt[a == 0] = -LOG2
    out = np.where(flat < 0, lt, log1mexp(np.minimum(lt, 0.0)))
    out = np.where(flat == 1.0, 0.0, out)
    out = np.where(flat == -1.0, NEG_INF, out)
    out = np.where(flat == 0.0, -LOG2, out)
    return float(out[0]) if h_arr.ndim == 0 else out


def F(params, h):
    """F_{z-1}(h), with F(-1) = 0, F(0) = 1/2 and F(1) = 1 exactly."""
    z = _as_z(params)
    h_arr = np.asarray(h, dtype=float)
    if np.any((h_arr < -1) | (h_arr > 1)) or np.any(np.isnan(h_arr)):
        raise ValueError("F is defined on [-1, 1]")
    flat = np.atleast_1d(h_arr)
    a = np.abs(flat)
    tail = np.zeros(flat.shape)
    interior = (a > 0) & (a < 1)
    if np.any(interior):
        tail[interior] = np.exp(_log_tail(z, a[interior]))
    tail[a == 0] = 0.5
    out = np.where(flat < 0, tail, 1.0 - tail)
    return float(out[0]) if h_arr.ndim == 0 else out
