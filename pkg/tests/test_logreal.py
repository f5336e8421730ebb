import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betapoly.logreal import (
    LogReal,
    SampleSize,
    exp_inequality_terms,
    gamma_ratio_bounds,
    log_add,
    log_binomial,
    log_c,
    log_gamma,
    log_gamma_ratio,
    log_kappa,
    log_sum,
)

finite_logs = st.floats(min_value=-700, max_value=700, allow_nan=False)


class TestLogAdd:
    def test_small_values(self):
        assert log_add(0.0, 0.0) == pytest.approx(math.log(2), rel=1e-15)
        assert log_add(math.log(3), math.log(4)) == pytest.approx(math.log(7), rel=1e-15)

    def test_zero_is_identity(self):
        assert log_add(-math.inf, 1.25) == 1.25
        assert log_add(1.25, -math.inf) == 1.25
        assert log_add(-math.inf, -math.inf) == -math.inf

    def test_no_overflow(self):
        assert log_add(1e5, 1e5) == pytest.approx(1e5 + math.log(2))

    @given(finite_logs, finite_logs)
    def test_commutative(self, a, b):
        assert log_add(a, b) == log_add(b, a)

    @given(finite_logs, finite_logs, finite_logs)
    def test_associative(self, a, b, c):
        left = log_add(log_add(a, b), c)
        right = log_add(a, log_add(b, c))
        assert left == pytest.approx(right, rel=1e-14, abs=1e-13)

    def test_log_sum_matches_pairwise(self):
        vals = [-3.0, 0.5, 2.0, -math.inf]
        acc = -math.inf
        for v in vals:
            acc = log_add(acc, v)
        assert log_sum(vals) == pytest.approx(acc, rel=1e-15)
        assert log_sum([]) == -math.inf


class TestLogRealType:
    def test_round_trip(self):
        assert float(LogReal.from_float(0.0)) == 0.0
        for x in (1e-300, 0.5, 3.0, 1e300):
            # exp amplifies the rounding of log(x) by |log(x)|
            tol = 4e-16 * max(1.0, abs(math.log(x)))
            assert math.isclose(float(LogReal.from_float(x)), x, rel_tol=tol)

    def test_zero_and_arithmetic(self):
        z = LogReal.zero()
        three = LogReal.from_float(3.0)
        assert z.is_zero()
        assert (z + three) == three
        assert float(three * LogReal.from_float(2.0)) == pytest.approx(6.0)
        assert float(three / LogReal.from_float(2.0)) == pytest.approx(1.5)

    def test_rejects_positive_infinity(self):
        with pytest.raises(ValueError):
            LogReal(math.inf)
        with pytest.raises(ValueError):
            LogReal(float("nan"))


class TestLogGamma:
    def test_examples(self):
        assert log_gamma(1.0) == 0.0
        assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-15)
        assert log_gamma(10.0) == pytest.approx(math.log(362880), rel=1e-15)

    def test_against_mpmath_grid(self):
        mp.mp.dps = 30
        for z in np.logspace(-3, 7, 61):
            ref = mp.loggamma(mp.mpf(float(z)))
            got = log_gamma(float(z))
            if abs(ref) > 1e-3:
                assert abs(got / float(ref) - 1) <= 1e-13, z
            else:
                assert abs(got - float(ref)) <= 1e-16, z

    def test_domain(self):
        with pytest.raises(ValueError):
            log_gamma(0.0)
        with pytest.raises(ValueError):
            log_gamma(-2.5)

    def test_ratio_large_argument(self):
        mp.mp.dps = 40
        for z in (25.0, 1e3, 1e6, 1e8):
            ref = mp.loggamma(mp.mpf(z) + mp.mpf(0.5)) - mp.loggamma(mp.mpf(z) + 1)
            assert log_gamma_ratio(z, 0.5, 1.0) == pytest.approx(float(ref), rel=1e-13)


class TestKappaAndC:
    def test_kappa(self):
        assert log_kappa(2) == pytest.approx(math.log(math.pi), rel=1e-15)
        assert log_kappa(3) == pytest.approx(math.log(4 * math.pi / 3), rel=1e-15)
        mp.mp.dps = 30
        ref = 50 * mp.log(mp.pi) - mp.loggamma(51)
        assert log_kappa(100) == pytest.approx(float(ref), rel=1e-14)
        assert log_kappa(0) == 0.0

    def test_c(self):
        assert log_c(0.5) == pytest.approx(-math.log(math.pi), rel=1e-15)
        assert log_c(1.0) == pytest.approx(math.log(0.25), rel=1e-15)

    def test_c_large_z_within_wendel(self):
        z = 1e6
        lower = -math.log(2 * math.sqrt(math.pi)) - 0.5 * math.log(z + 0.5)
        upper = -math.log(2 * math.sqrt(math.pi * z))
        assert lower <= log_c(z) <= upper

    def test_c_domain(self):
        with pytest.raises(ValueError):
            log_c(0.0)


class TestLogBinomial:
    def test_examples(self):
        assert log_binomial(5, 2) == pytest.approx(math.log(10), rel=1e-15)
        assert log_binomial(17, 0) == 0.0

    def test_exact_integers(self):
        for n in range(1, 61):
            for k in range(n + 1):
                assert log_binomial(n, k) == pytest.approx(math.log(math.comb(n, k)), rel=1e-13, abs=1e-13)

    def test_domain(self):
        with pytest.raises(ValueError):
            log_binomial(3, 4)

    def test_log_only_matches_exact(self):
        mp.mp.dps = 50
        n = mp.e ** 20
        ref = mp.log(mp.binomial(n, 51))
        got = log_binomial(SampleSize(log_n=20.0), 51)
        assert got == pytest.approx(float(ref), rel=1e-13)

    def test_log_only_huge(self):
        # n = e^200: the correction terms are far below double precision
        got = log_binomial(SampleSize(log_n=200.0), 51)
        assert got == pytest.approx(51 * 200 - float(mp.loggamma(52)), rel=1e-15)

    def test_large_exact_n(self):
        mp.mp.dps = 50
        n = 10**15 + 7
        assert log_binomial(n, 30) == pytest.approx(float(mp.log(mp.binomial(n, 30))), rel=1e-14)


class TestSampleSize:
    def test_exact(self):
        s = SampleSize.exact(10)
        assert s.log_n == math.log(10)
        assert s.log_N(4) == math.log(5)
        assert s.log_N(9) == -math.inf
        with pytest.raises(ValueError):
            s.log_N(10)

    def test_from_log_collapses_small_integers(self):
        assert SampleSize.from_log(math.log(16)).exact_n == 16
        assert SampleSize.from_log(500.0).exact_n is None

    @given(st.floats(min_value=10, max_value=1e5), st.integers(2, 2000))
    @settings(max_examples=60)
    def test_log_N(self, log_n, d):
        s = SampleSize(log_n=log_n)
        if math.log(d + 1) < log_n:
            assert s.log_N(d) <= log_n
            assert s.log_N(d) == pytest.approx(log_n + math.log1p(-(d + 1) * math.exp(-log_n)))


class TestInequalityOracles:
    def test_wendel_gamma_ratio_grid(self):
        for z in np.logspace(-3, 8, 400):
            lo, val, hi = gamma_ratio_bounds(float(z))
            assert lo <= val <= hi, z

    @given(st.floats(min_value=1, max_value=1e6), st.floats(min_value=-0.999, max_value=0.999))
    def test_exponential_inequality(self, m, frac):
        y = frac * m if frac > 0 else frac * 50 * m
        lower, middle, upper = exp_inequality_terms(m, y)
        slack = 1e-12 * max(1.0, abs(y))
        assert lower <= middle + slack
        assert middle <= upper + slack
