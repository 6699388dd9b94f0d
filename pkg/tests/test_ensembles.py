import math

import numpy as np
import pytest
from numpy.polynomial.legendre import leggauss
from scipy.linalg import block_diag
from scipy.stats import chisquare

from hardedge import ensembles as E
from hardedge.ensembles import EnsembleSpec, McmcConfig

from conftest import chain_mean_se


def rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def interaction_moment_oracle(pairs: int, m: int, moment, order: int = 240):
    """Gauss-Legendre quadrature of the conditioned level density in angle
    coordinates, where the joint density is the analytic function
    prod_{j<k} (cos t_k - cos t_j)^2 prod_j (1 - cos t_j)^m on [0, pi]^pairs.
    ``moment`` maps a tuple of level grids to the integrand values."""
    t, w = leggauss(order)
    th = 0.5 * math.pi * (t + 1)
    ww = 0.5 * math.pi * w
    if pairs == 1:
        x = np.cos(th)
        dens = (1 - x) ** m * ww
        return float(np.sum(moment(x) * dens) / np.sum(dens))
    if pairs == 2:
        x = np.cos(th)
        X1, X2 = np.meshgrid(x, x, indexing="ij")
        W = np.outer(ww * (1 - x) ** m, ww * (1 - x) ** m)
        dens = (X2 - X1) ** 2 * W
        return float(np.sum(moment(X1, X2) * dens) / np.sum(dens))
    raise NotImplementedError


class TestHaarSampling:
    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7, 9])
    def test_group_membership(self, n):
        s = E.haar_sample_so(n, 123)
        assert np.abs(s.entries @ s.entries.T - np.eye(n)).max() < 1e-10
        assert abs(np.linalg.det(s.entries) - 1.0) < 1e-10
        assert s.angles.shape == (n // 2,)
        assert np.all(np.diff(s.angles) >= 0)
        assert np.all((s.angles >= 0) & (s.angles <= np.pi))

    def test_determinism(self):
        a = E.haar_sample_so(5, 99)
        b = E.haar_sample_so(5, 99)
        assert np.array_equal(a.entries, b.entries)
        assert np.array_equal(a.angles, b.angles)

    def test_dimension_error(self):
        with pytest.raises(ValueError):
            E.haar_sample_so(1, 0)

    def test_so2_angles_uniform(self):
        n = 100_000
        vals = np.array([E._haar_sample_so(2, E._rng_for(5, i)).angles[0]
                         for i in range(n)])
        counts, edges = np.histogram(vals, bins=40, range=(0.0, math.pi))
        res = chisquare(counts)
        assert res.pvalue > 0.01

    def test_so3_angles_sin_squared_half(self):
        n = 100_000
        vals = np.array([E._haar_sample_so(3, E._rng_for(6, i)).angles[0]
                         for i in range(n)])
        edges = np.linspace(0.0, math.pi, 41)
        counts, _ = np.histogram(vals, bins=edges)
        # integral of sin^2(t/2) = (t - sin t)/2, total pi/2
        cdf = (edges - np.sin(edges)) / math.pi
        expected = n * np.diff(cdf)
        res = chisquare(counts, expected)
        assert res.pvalue > 0.01

    def test_so4_joint_density_ratio(self, so4_angles):
        # binned counts of the unordered angle pair against the measure
        # (cos t2 - cos t1)^2 dt1 dt2, integrated per bin by quadrature
        nb = 8
        edges = np.linspace(0.0, math.pi, nb + 1)
        lo = np.minimum(so4_angles[:, 0], so4_angles[:, 1])
        hi = np.maximum(so4_angles[:, 0], so4_angles[:, 1])
        counts, _, _ = np.histogram2d(lo, hi, bins=(edges, edges))
        t, w = leggauss(24)
        expected = np.zeros((nb, nb))
        for i in range(nb):
            for j in range(nb):
                ti = 0.5 * (edges[i + 1] - edges[i]) * (t + 1) + edges[i]
                wi = 0.5 * (edges[i + 1] - edges[i]) * w
                tj = 0.5 * (edges[j + 1] - edges[j]) * (t + 1) + edges[j]
                wj = 0.5 * (edges[j + 1] - edges[j]) * w
                dens = (np.cos(tj)[None, :] - np.cos(ti)[:, None]) ** 2
                expected[i, j] = np.sum(np.outer(wi, wj) * dens)
        # unordered pairs live on i <= j; the i < j mass doubles
        mask = np.triu(np.ones((nb, nb), dtype=bool))
        exp_vals = np.where(np.eye(nb, dtype=bool), expected, 2 * expected)[mask]
        exp_vals *= counts.sum() / exp_vals.sum()
        res = chisquare(counts[mask], exp_vals)
        assert res.pvalue > 0.01


class TestEigenangles:
    def test_rotation(self):
        assert E.eigenangles(rotation(0.7)) == pytest.approx([0.7], abs=1e-12)

    def test_identity(self):
        assert E.eigenangles(np.eye(4)) == pytest.approx([0.0, 0.0], abs=1e-12)

    def test_block_diagonal(self):
        m = block_diag(rotation(0.3), rotation(2.9))
        assert E.eigenangles(m) == pytest.approx([0.3, 2.9], abs=1e-12)

    def test_rejects_non_orthogonal(self):
        with pytest.raises(ValueError):
            E.eigenangles(np.eye(3) * 1.001)

    def test_rejects_reflection(self):
        m = np.diag([1.0, 1.0, -1.0])
        with pytest.raises(ValueError):
            E.eigenangles(m)

    def test_missing_forced_eigenvalue_is_internal_error(self):
        # the helper guards against a symmetric part without the pinned +1
        with pytest.raises(ArithmeticError):
            E._angles_from_symmetric_eigs(np.array([-0.9, 0.2, 0.2]), 3)


class TestNormalize:
    def test_examples(self):
        assert E.normalize_eigenangles([math.pi / 2], 1) == pytest.approx([0.5])
        assert E.normalize_eigenangles([math.pi], 3) == pytest.approx([3.0])

    def test_order_preserved(self):
        out = E.normalize_eigenangles([0.2, 0.1], 4)
        assert out[0] == pytest.approx(0.8 / math.pi)
        assert out[1] == pytest.approx(0.4 / math.pi)

    def test_domain(self):
        with pytest.raises(ValueError):
            E.normalize_eigenangles([3.5], 2)


class TestIndependentModel:
    def test_reduction_to_smaller_group(self):
        got = E.sample_independent_model(3, 1, 41)
        free = E.haar_sample_so(4, 41).angles
        assert np.array_equal(got[2:], free)
        assert np.array_equal(got[:2], np.zeros(2))

    def test_r_zero_degenerate(self):
        got = E.sample_independent_model(3, 0, 41)
        assert np.array_equal(got, E.haar_sample_so(6, 41).angles)

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            E.sample_independent_model(2, 2, 0)

    def test_nonzero_block_distribution(self):
        # the non-pinned angles of the block model are exactly those of the
        # smaller group, so their mean first angle matches a direct run
        spec = EnsembleSpec(model="independent", pairs=3, forced=1)
        s_block = E.simulate_first_angle_stats(spec, 4000, 13)
        direct = np.array([E._haar_sample_so(4, E._rng_for(13, i)).angles[0]
                           for i in range(4000)])
        assert s_block.mean == pytest.approx(float(direct.mean()) * 3 / math.pi, rel=1e-12)
        assert s_block.forced_zero_multiplicity == 2


class TestInteractionModel:
    def test_single_draw_contract(self):
        lv = E.sample_interaction_levels(2, 2, McmcConfig(seed=3, burn_in=2000))
        assert lv.pairs == 2 and lv.hardness == 2
        assert np.all(np.diff(lv.levels) >= 0)
        assert np.all(np.abs(lv.levels) < 1)
        again = E.sample_interaction_levels(2, 2, McmcConfig(seed=3, burn_in=2000))
        assert np.array_equal(lv.levels, again.levels)

    def test_pairs1_m0_angle_uniform(self):
        # weight (1-x)^(-1/2) (1+x)^(-1/2) means theta = arccos(x) uniform
        draws = E._interaction_batch(1, 0, McmcConfig(burn_in=2000, thinning=10),
                                     40_000, 21, 64)
        th = np.arccos(np.clip(draws[:, 0], -1, 1))
        est, se = chain_mean_se(th)
        assert abs(est - math.pi / 2) < 3 * se
        est2, se2 = chain_mean_se(th ** 2)
        assert abs(est2 - math.pi ** 2 / 3) < 3 * se2

    @pytest.mark.parametrize("pairs,m", [(1, 1), (1, 2), (2, 0), (2, 1)])
    def test_marginal_means_match_quadrature(self, pairs, m):
        draws = E._interaction_batch(pairs, m, McmcConfig(burn_in=2000, thinning=10),
                                     40_000, 31 + pairs + m, 64)
        if pairs == 1:
            oracle = interaction_moment_oracle(1, m, lambda x: x)
            est, se = chain_mean_se(draws[:, 0])
            assert abs(est - oracle) < 3 * se
        else:
            oracle_max = interaction_moment_oracle(2, m, lambda a, b: np.maximum(a, b))
            est, se = chain_mean_se(draws.max(axis=1))
            assert abs(est - oracle_max) < 3 * se
            oracle_min = interaction_moment_oracle(2, m, lambda a, b: np.minimum(a, b))
            est, se = chain_mean_se(draws.min(axis=1))
            assert abs(est - oracle_min) < 3 * se

    def test_max_level_mean_pairs2_m2(self, interaction_p2m2_draws):
        oracle = interaction_moment_oracle(2, 2, lambda a, b: np.maximum(a, b))
        est, se = chain_mean_se(interaction_p2m2_draws[:, -1])
        assert abs(est - oracle) < 3 * se

    def test_pinned_levels_repel(self):
        # matched ambient group SO(12): conditioned model pushes the first
        # angle further from 0 than the block model
        spec_inter = EnsembleSpec(model="interaction", pairs=5, hardness=2,
                                  mcmc=McmcConfig(burn_in=3000, thinning=10))
        spec_indep = EnsembleSpec(model="independent", pairs=6, forced=1)
        si = E.simulate_first_angle_stats(spec_inter, 20_000, 17)
        sb = E.simulate_first_angle_stats(spec_indep, 20_000, 17)
        se = math.hypot(si.stdev / math.sqrt(si.n), sb.stdev / math.sqrt(sb.n))
        assert si.mean - sb.mean > 5 * se

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            E.sample_interaction_levels(0, 2, McmcConfig())
        with pytest.raises(ValueError):
            E.sample_interaction_levels(2, 2, McmcConfig(proposal_width=-1))


class TestSimulateFirstAngle:
    def test_so4_against_quadrature_oracle(self, so4_summary):
        # exact mean of the first normalized angle by 2D quadrature of the
        # joint angle density (cos t2 - cos t1)^2: 0.41336
        se = so4_summary.stdev / math.sqrt(so4_summary.n)
        assert abs(so4_summary.mean - 0.41336) < 4 * se

    def test_so4_median_matches_reference(self, so4_summary):
        assert abs(so4_summary.median - 0.357) < 0.015

    def test_so7_against_quadrature_oracle(self, so7_summary):
        # 3D quadrature of the joint density with the sin^2(t/2) weight
        se = so7_summary.stdev / math.sqrt(so7_summary.n)
        assert abs(so7_summary.mean - 0.77522) < 4 * se

    def test_histogram_totals(self, so4_summary):
        assert so4_summary.counts.sum() == so4_summary.n
        assert so4_summary.bin_edges[0] == 0.0

    def test_worker_partition_invariance(self):
        spec = EnsembleSpec(model="haar", size=4)
        a = E.simulate_first_angle_stats(spec, 600, 3, workers=1)
        b = E.simulate_first_angle_stats(spec, 600, 3, workers=4)
        assert a.mean == b.mean and a.median == b.median
        assert np.array_equal(a.counts, b.counts)

    def test_seed_changes_stream(self):
        spec = EnsembleSpec(model="haar", size=4)
        a = E.simulate_first_angle_stats(spec, 200, 1)
        b = E.simulate_first_angle_stats(spec, 200, 2)
        assert a.mean != b.mean

    def test_sample_count_validation(self):
        with pytest.raises(ValueError):
            E.simulate_first_angle_stats(EnsembleSpec(model="haar", size=4), 0, 1)
