import math

import pytest

from betapoly.asympt import threshold_log_n
from betapoly.exactvol import BetaModel, expected_volume_ratio
from betapoly.intrinsics import expected_intrinsic_ratio, log_Vk_ball, reduce, steiner_ball_volume
from betapoly.logreal import SampleSize, log_kappa


class TestBallIntrinsicVolumes:
    @pytest.mark.parametrize("d", [1, 2, 3, 7, 30])
    def test_top_and_bottom(self, d):
        assert log_Vk_ball(d, d) == pytest.approx(log_kappa(d), rel=1e-15, abs=1e-15)
        assert log_Vk_ball(d, 0) == 0.0

    def test_half_surface_area(self):
        assert log_Vk_ball(3, 2) == pytest.approx(math.log(2 * math.pi), rel=1e-15)

    def test_mean_width(self):
        # V_1(B^d) = d kappa_d / kappa_{d-1}; for d = 2 this is pi
        assert log_Vk_ball(2, 1) == pytest.approx(math.log(math.pi), rel=1e-15)

    @pytest.mark.parametrize("k", [-1, 4])
    def test_domain(self, k):
        with pytest.raises(ValueError):
            log_Vk_ball(3, k)

    @pytest.mark.parametrize("d", range(1, 7))
    @pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
    def test_steiner_formula(self, d, t):
        expected = (1 + t) ** d * math.exp(log_kappa(d))
        assert steiner_ball_volume(d, t) == pytest.approx(expected, rel=1e-10)


class TestReduce:
    def test_examples(self):
        assert reduce(5, 5, 0.7) == (5, 0.7)
        assert reduce(10, 4, 0.0) == (4, 3.0)
        assert reduce(10, 4, -1.0) == (4, 2.0)

    def test_beta_stays_admissible(self):
        for d in range(1, 12):
            for k in range(1, d + 1):
                assert reduce(d, k, -1.0)[1] >= -1.0

    @pytest.mark.parametrize("k", [0, 6])
    def test_domain(self, k):
        with pytest.raises(ValueError):
            reduce(5, k, 0.0)


class TestIntrinsicRatio:
    def test_identity_reduction_is_the_same_path(self):
        for d, beta, n in ((3, 0.0, 10), (5, -1.0, 40), (8, 2.0, 9)):
            r, _ = expected_volume_ratio(BetaModel(d, beta), n)
            assert expected_intrinsic_ratio(d, d, beta, n) == r

    def test_two_paths(self):
        a = expected_intrinsic_ratio(6, 3, 0.0, 20)
        b, _ = expected_volume_ratio(BetaModel(3, 1.5), 20)
        assert a == pytest.approx(b, rel=1e-9)

    def test_mean_width_on_line(self):
        # k = 1 reduces to n points on [-1, 1] with density ~ (1 - x^2)^beta';
        # at beta' = 0 the expected range is 2 (n - 1)/(n + 1)
        for n in (2, 3, 10, 57):
            assert expected_intrinsic_ratio(1, 1, 0.0, n) == pytest.approx((n - 1) / (n + 1), rel=1e-9)

    @pytest.mark.parametrize("d,k", [(6, 1), (6, 2), (9, 4), (12, 12)])
    def test_range_and_monotone(self, d, k):
        prev = 0.0
        for n in range(k + 1, k + 30, 3):
            r = expected_intrinsic_ratio(d, k, 0.0, n)
            assert 0.0 <= r <= 1.0
            assert r >= prev - 1e-9
            prev = r

    def test_diverging_k_trend(self):
        # d = 2k, n at the threshold of the reduced model for x = 1
        x = 1.0
        errs = []
        for k in (50, 200, 800):
            d = 2 * k
            d_red, beta_red = reduce(d, k, 0.0)
            log_n = threshold_log_n(d_red, beta_red, x)
            assert log_n == pytest.approx((d / 2) * math.log(k / (2 * x)), rel=1e-12)
            r = expected_intrinsic_ratio(d, k, 0.0, SampleSize(log_n=log_n))
            errs.append(abs(r - math.exp(-x)))
        assert errs[0] > errs[1] > errs[2]
