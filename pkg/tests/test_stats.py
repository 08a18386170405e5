"""Tests for wpvol.matrixlab.stats: reference densities, histograms and fits."""

import math
from fractions import Fraction

import numpy as np
import pytest

from wpvol.errors import InvalidArgumentError
from wpvol.matrixlab.stats import (
    fit_edge_slope,
    hard_edge_threshold,
    histogram_and_stats,
    lowest_mass,
    mean_with_error,
    q_pairing_error,
    q_symmetry_distance,
    reference_density,
    two_eigenvalue_moment,
    zero_mode_counts,
)


class TestReferences:
    @pytest.mark.parametrize("name", ["semicircle", "uniform", "scalar-gaussian"])
    def test_normalized(self, name):
        ref = reference_density(name)
        assert ref.mass(*ref.support) == pytest.approx(1.0, abs=1e-8)

    def test_marchenko_pastur_normalized(self):
        assert reference_density("marchenko-pastur").mass(0.0, 4.0) == pytest.approx(1.0, abs=1e-6)

    def test_mass_outside_support(self):
        assert reference_density("semicircle").mass(2.0, 3.0) == 0.0

    def test_cdf_endpoints(self):
        cdf = reference_density("semicircle").cdf()
        assert cdf(np.array([-2.0, 0.0, 2.0])).tolist() == pytest.approx([0.0, 0.5, 1.0], abs=1e-6)

    def test_unknown(self):
        with pytest.raises(InvalidArgumentError, match="reference"):
            reference_density("wigner")


class TestHistogram:
    def test_uniform_sample(self):
        values = np.random.default_rng(0).random(5000)
        result = histogram_and_stats(values, "uniform", bins=20, value_range=(0.0, 1.0))
        assert result.integral() == pytest.approx(1.0)
        assert result.ks_statistic < 0.05
        assert result.sup_distance < 0.3

    def test_semicircle_sample(self):
        values = 2.0 * np.random.default_rng(1).beta(1.5, 1.5, 200_000) - 1.0
        result = histogram_and_stats(values, "semicircle", bins=40, value_range=(-1.0, 1.0))
        assert result.sup_distance < 0.03
        assert result.ks_pvalue > 1e-3

    def test_no_reference(self):
        result = histogram_and_stats([0.1, 0.2, 0.3, 0.9], bins=4)
        assert result.reference is None and result.ks_statistic is None
        assert result.summary()["samples"] == 4

    def test_csv(self):
        text = histogram_and_stats([0.0, 1.0], bins=2).to_csv({"bins": 2})
        assert text.splitlines()[:2] == ["# bins=2", "x,density"]

    def test_empty(self):
        with pytest.raises(InvalidArgumentError, match="empty"):
            histogram_and_stats([])

    def test_zero_width(self):
        with pytest.raises(InvalidArgumentError, match="zero-width"):
            histogram_and_stats([1.0, 1.0])

    def test_bad_bins(self):
        with pytest.raises(InvalidArgumentError, match="bin count"):
            histogram_and_stats([0.0, 1.0], bins=0)


class TestEdgeSlope:
    def test_square_root_edge(self):
        # E = U^2 has density 1 / (2 sqrt E)
        u = np.random.default_rng(2).random(200_000)
        assert fit_edge_slope(u * u) == pytest.approx(-0.5, abs=0.05)

    def test_flat_density(self):
        u = np.random.default_rng(3).random(200_000)
        assert fit_edge_slope(u) == pytest.approx(0.0, abs=0.05)

    def test_needs_samples_in_window(self):
        with pytest.raises(InvalidArgumentError, match="too few"):
            fit_edge_slope([0.5, 0.6, 0.7])

    def test_lowest_mass(self):
        assert lowest_mass([0.01, 0.02, 0.5, 0.9], 0.1) == 0.5
        assert lowest_mass([0.01, 0.5], 0.1, total=4) == 0.25
        assert hard_edge_threshold(10) == pytest.approx(0.025)


class TestMoments:
    def test_mean_with_error(self):
        mean, err = mean_with_error([1.0, 2.0, 3.0])
        assert mean == 2.0
        assert err == pytest.approx(1 / math.sqrt(3))

    def test_mean_needs_two(self):
        with pytest.raises(InvalidArgumentError):
            mean_with_error([1.0])

    def test_q_symmetry(self):
        x = np.random.default_rng(4).random(2000)
        assert q_symmetry_distance(np.concatenate([x, -x])) < 0.05
        assert q_symmetry_distance(np.concatenate([x, 0.5 * x])) > 0.2

    def test_gaussian_pair_moment(self):
        # T = 2 l^2 at N = 2: <l^2> = 1/4
        assert two_eigenvalue_moment((0, 0, Fraction(2))) == pytest.approx(0.25, rel=1e-10)


class TestChiralPairs:
    ROWS = np.array([[-2.0, -1.0, 0.0, 0.0, 1.0, 2.0], [-3.0, -0.5, 0.0, 0.0, 0.5, 3.0]])

    def test_zero_modes_sit_on_a_bin_centre(self):
        assert q_symmetry_distance(self.ROWS) == 0.0
        assert q_symmetry_distance(self.ROWS, bins=40) > 0.0

    def test_pairing_error(self):
        assert q_pairing_error(self.ROWS) == 0.0
        shifted = self.ROWS.copy()
        shifted[0, -1] = 2.3
        assert q_pairing_error(shifted) == pytest.approx(0.1)

    def test_zero_mode_counts(self):
        assert zero_mode_counts(self.ROWS).tolist() == [2, 2]
        assert zero_mode_counts([[-1.0, 1e-12, 1.0]]).tolist() == [1]
        assert zero_mode_counts([[-1.0, 1e-3, 1.0]]).tolist() == [0]
