import math
from fractions import Fraction

import numpy as np
import pytest

from hardedge import stats as S


class TestDescriptive:
    def test_basic(self):
        d = S.descriptive([1, 2, 3])
        assert (d.mean, d.median, d.stdev) == (2.0, 2.0, 1.0)

    def test_even_median_convention(self):
        assert S.descriptive([1, 2, 3, 4]).median == 2.5

    def test_single_element_degenerate(self):
        d = S.descriptive([5])
        assert d.stdev == 0.0 and d.degenerate

    def test_empty(self):
        with pytest.raises(ValueError):
            S.descriptive([])

    def test_median_within_range(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            data = rng.normal(size=rng.integers(1, 40)).tolist()
            d = S.descriptive(data)
            assert min(data) <= d.median <= max(data)


class TestPooledT:
    def test_hand_computed(self):
        res = S.pooled_t([1, 2, 3], [2, 3, 4])
        assert res.statistic == pytest.approx(-math.sqrt(1.5), abs=1e-12)
        assert res.df == 4
        assert res.kind == "pooled-t"

    def test_identical_samples(self):
        res = S.pooled_t([1.0, 2.0, 4.0], [1.0, 2.0, 4.0])
        assert res.statistic == 0.0
        assert res.p_value == 1.0

    def test_degenerate_variance(self):
        with pytest.raises(S.DegenerateVarianceError):
            S.pooled_t([0.0, 0.0], [1.0, 1.0])

    def test_needs_two_points(self):
        with pytest.raises(ValueError):
            S.pooled_t([1.0], [1.0, 2.0])


class TestUnpooledT:
    def test_reduces_to_pooled_df(self):
        # equal n and equal s: df = 144/36 = 4 = n1 + n2 - 2
        res = S.unpooled_t([1, 2, 3], [2, 3, 4])
        assert res.df == pytest.approx(4.0, abs=1e-12)
        pooled = S.pooled_t([1, 2, 3], [2, 3, 4])
        assert res.statistic == pytest.approx(pooled.statistic, abs=1e-12)

    def test_identical_samples(self):
        assert S.unpooled_t([5.0, 6.0], [5.0, 6.0]).statistic == 0.0

    def test_published_summary_entry_point(self):
        res = S.unpooled_t_summary(350, 1.97, 0.37, 388, 1.90, 0.40)
        assert res.statistic == pytest.approx(2.5, abs=0.1)
        assert res.df > 600

    def test_degenerate(self):
        with pytest.raises(S.DegenerateVarianceError):
            S.unpooled_t([1.0, 1.0], [2.0, 2.0])

    def test_summary_matches_raw(self):
        rng = np.random.default_rng(8)
        x1 = rng.normal(size=13).tolist()
        x2 = rng.normal(0.4, 1.3, size=17).tolist()
        raw = S.unpooled_t(x1, x2)
        d1, d2 = S.descriptive(x1), S.descriptive(x2)
        summ = S.unpooled_t_summary(d1.n, d1.mean, d1.stdev, d2.n, d2.mean, d2.stdev)
        assert raw.statistic == pytest.approx(summ.statistic, rel=1e-12)
        assert raw.df == pytest.approx(summ.df, rel=1e-12)
        assert raw.p_value == pytest.approx(summ.p_value, rel=1e-12)

    def test_permutation_invariance(self):
        x1, x2 = [3.0, 1.0, 2.2], [5.0, 4.4]
        a = S.unpooled_t(x1, x2)
        b = S.unpooled_t(list(reversed(x1)), list(reversed(x2)))
        assert a == b


class TestPooledUnpooledAgreement:
    @pytest.mark.parametrize("n,s", [(3, 1.0), (6, 0.37), (25, 2.5)])
    def test_equal_n_equal_s(self, n, s):
        p = S.pooled_t_summary(n, 1.0, s, n, 0.4, s)
        u = S.unpooled_t_summary(n, 1.0, s, n, 0.4, s)
        assert p.statistic == pytest.approx(u.statistic, rel=1e-13)
        assert p.df == pytest.approx(u.df, rel=1e-13)


class TestSignTest:
    def test_paper_scale_example(self):
        # exact: sum_{k<=7} C(21,k) / 2^21
        assert S.sign_test(7, 21).p_value == pytest.approx(0.0946, abs=1e-4)

    def test_single_toss(self):
        assert S.sign_test(0, 1).p_value == 0.5

    def test_exact_rational(self):
        assert S.sign_test(4, 21).p_value == pytest.approx(
            float(Fraction(7547, 2097152)), abs=1e-15)
        assert S.sign_test(4, 21).p_value == pytest.approx(0.0036, abs=1e-4)

    def test_binomial_symmetry(self):
        for n in (5, 21, 40):
            for k in range(n):
                assert S.sign_test(k, n).p_value + S.sign_test(n - k - 1, n).p_value \
                    == pytest.approx(1.0, abs=1e-14)

    def test_domain(self):
        with pytest.raises(ValueError):
            S.sign_test(5, 4)


class TestNormalTail:
    def test_zero(self):
        assert S.normal_tail(0.0) == 1.0

    def test_extreme(self):
        assert S.normal_tail(10.5) < 3.2e-14

    def test_quantile(self):
        assert S.normal_tail(1.96) == pytest.approx(0.05, abs=5e-4)

    def test_t_converges_to_normal(self):
        for t in (0.5, 1.0, 2.0, 3.5):
            assert S.t_tail(t, 1e4) == pytest.approx(S.normal_tail(t), abs=1e-4)

    def test_one_sided(self):
        assert S.normal_tail(1.0, two_sided=False) + S.normal_tail(-1.0, two_sided=False) \
            == pytest.approx(1.0, abs=1e-14)


class TestSpacingDifferences:
    def test_basic(self):
        assert S.spacing_differences([1, 2, 4]) == (1.0, 2.0, 3.0)

    def test_shift_invariance(self):
        a = S.spacing_differences([1.1, 2.3, 4.0])
        b = S.spacing_differences([1.1 + 7, 2.3 + 7, 4.0 + 7])
        assert a == pytest.approx(b, abs=1e-12)

    def test_normalizer(self):
        assert S.spacing_differences([1, 2, 4], 2.0) == (2.0, 4.0, 6.0)

    def test_needs_three(self):
        with pytest.raises(ValueError):
            S.spacing_differences([1, 2])
