import math

import mpmath as mp
import numpy as np
import pytest
from scipy.special import betainc

from betapoly.betacdf import F, FParams, envelope_F_tail, log_F, log_one_minus_F

Z_GRID = (0.5, 1.0, 5.0, 50.0, 500.0, 5e4)
H_GRID = np.concatenate([np.linspace(0.005, 0.995, 67), [1e-4, 0.999, 0.99999]])


def mp_tail(z, h, dps=40):
    """1 - F_{z-1}(h) by direct quadrature of the density (mpmath)."""
    with mp.workdps(dps):
        z = mp.mpf(z)
        h = mp.mpf(h)
        c = mp.gamma(z + 0.5) / (2 * mp.sqrt(mp.pi) * mp.gamma(z + 1))
        return 2 * z * c * mp.quad(lambda s: (1 - s * s) ** (z - 1), [h, 1])


def mp_log_tail(z, h, dps=40):
    """log(1 - F) through the hypergeometric form of the tail, valid at any magnitude."""
    with mp.workdps(dps):
        z = mp.mpf(z)
        h = mp.mpf(h)
        w = 1 - h * h
        logc = mp.loggamma(z + 0.5) - mp.loggamma(z + 1) - mp.log(2 * mp.sqrt(mp.pi))
        # z * int_0^1 (1-t)^(z-1) (1 + rho t)^(-1/2) dt = 2F1(1/2, 1; z+1; -rho), rho = w / h^2
        if w > 0.9:
            integral = mp.hyp2f1(0.5, 1, z + 1, -w / (h * h), maxterms=10**7)
        else:
            # Pfaff transform; the series in w converges geometrically
            integral = h * mp.hyp2f1(0.5, z, z + 1, w, maxterms=10**7)
        return logc + z * mp.log(w) - mp.log(h) + mp.log(integral)


class TestF:
    def test_fixed_points(self):
        for z in Z_GRID:
            assert F(z, 0.0) == 0.5
            assert F(z, 1.0) == 1.0
            assert F(z, -1.0) == 0.0

    def test_uniform_case(self):
        assert F(1.0, 0.5) == pytest.approx(0.75, abs=1e-15)
        h = np.linspace(-0.99, 0.99, 23)
        assert np.allclose(F(1.0, h), (h + 1) / 2, atol=1e-15, rtol=0)

    def test_domain(self):
        with pytest.raises(ValueError):
            F(2.0, 1.5)
        with pytest.raises(ValueError):
            FParams(0.0)

    def test_matches_scipy_regularized_beta(self):
        for z in Z_GRID:
            h = np.linspace(-0.999, 0.999, 41)
            ref = 0.5 + 0.5 * np.sign(h) * betainc(0.5, z, h * h)
            assert np.max(np.abs(F(z, h) - ref)) <= 1e-14

    @pytest.mark.parametrize("z", [0.5, 1.0, 3.7, 12.0])
    def test_matches_quadrature(self, z):
        for h in (-0.7, -0.1, 0.2, 0.6, 0.95):
            ref = 1 - mp_tail(z, abs(h)) if h > 0 else mp_tail(z, abs(h))
            assert F(z, h) == pytest.approx(float(ref), abs=1e-14)

    @pytest.mark.parametrize("z", Z_GRID)
    def test_symmetry(self, z):
        h = H_GRID
        assert np.max(np.abs(F(z, -h) - (1 - F(z, h)))) <= 1e-14

    @pytest.mark.parametrize("z", Z_GRID)
    def test_monotone(self, z):
        h = np.linspace(-1, 1, 1000)
        vals = F(z, h)
        assert np.all(np.diff(vals) >= 0)
        # on the lower half log F is the log tail and never saturates
        logs = log_F(z, h[1:500])
        assert np.all(np.diff(logs) > 0)

    @pytest.mark.parametrize("z", Z_GRID)
    def test_consistency_with_tail(self, z):
        for h in H_GRID:
            t = math.exp(log_one_minus_F(z, h))
            if t >= 1e-10:
                assert F(z, h) + t == pytest.approx(1.0, abs=1e-12)


class TestTail:
    def test_uniform(self):
        assert log_one_minus_F(1.0, 0.5) == pytest.approx(math.log(0.25), rel=1e-15)

    def test_against_quadrature(self):
        got = math.exp(log_one_minus_F(5.0, 0.3))
        assert got == pytest.approx(float(mp_tail(5.0, 0.3)), rel=1e-10)

    @pytest.mark.parametrize("z,h", [(50, 0.9), (500, 0.5), (500, 0.99), (5e4, 0.1), (5e4, 0.02), (3.5, 0.999)])
    def test_relative_accuracy(self, z, h):
        assert log_one_minus_F(z, h) == pytest.approx(float(mp_log_tail(z, h)), abs=1e-12)

    @pytest.mark.parametrize("z,h", [(2e3, 0.9), (5e4, 0.5), (5e5, 0.9), (6e5, 0.95)])
    def test_deep_tail_far_below_underflow(self, z, h):
        # log(1 - F) from about -700 down to about -1e6. A double holding
        # log(1 - F) has an ulp of about 1e-16 * |log(1 - F)|.
        ref = float(mp_log_tail(z, h))
        got = log_one_minus_F(z, h)
        assert ref < -700
        assert got == pytest.approx(ref, rel=1e-14, abs=1e-12)

    def test_domain(self):
        for h in (0.0, 1.0, -0.2):
            with pytest.raises(ValueError):
                log_one_minus_F(2.0, h)


class TestEnvelope:
    def test_limit_near_one(self):
        lo, up = envelope_F_tail(1.0, 1 - 1e-9)
        assert up - lo < 1e-8
        h = 1 - 1e-9
        expected = math.log(0.25) + math.log((1 - h) * (1 + h)) - math.log(h)
        assert up == pytest.approx(expected, rel=1e-12)

    def test_lower_minus_infinity_when_factor_negative(self):
        h = 0.1
        assert 1 - (1 - h * h) / (2 * h * h * 11) < 0
        lo, up = envelope_F_tail(10.0, h)
        assert lo == -math.inf and math.isfinite(up)

    def test_brackets_tail_example(self):
        lo, up = envelope_F_tail(50.0, 0.9)
        val = log_one_minus_F(50.0, 0.9)
        assert lo <= val <= up

    @pytest.mark.parametrize("z", Z_GRID)
    def test_envelope_grid(self, z):
        lo, up = envelope_F_tail(z, H_GRID)
        val = log_one_minus_F(z, H_GRID)
        assert np.all(lo <= up)
        # a few ulps of slack for rounding of the logs themselves
        slack = 8e-16 * np.maximum(1.0, np.abs(val))
        assert np.all(val <= up + slack)
        assert np.all(val >= lo - slack)

    def test_huge_z_fallback_inside_envelope(self):
        z = 2e7
        for h in (0.3, 0.7, 0.95):
            lo, up = envelope_F_tail(z, h)
            val = log_one_minus_F(z, h)
            assert lo <= val <= up
