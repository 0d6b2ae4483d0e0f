# tests/test_bounds.py
"""
Tests for the analytic bound layer: the two-set bound and its exact
oracle, the curve families, crossing optimisation and threshold constants.
"""

import math

import numpy as np
import pytest
from scipy import stats

from src.models.bounds import BoundQuery, CurveFamily
from src.utils.bounds import (
    AREA_COEFF,
    applicable_minimum,
    blocking_argmax,
    blocking_stirling_ratio,
    bound_curve_table,
    boundary_curves,
    disc_blocking_probability,
    disc_blocking_probability_at_least,
    exact_validity_cutoffs,
    interior_curves,
    lemma_kk_bound,
    lemma_kk_exact,
    optimal_alpha,
    poisson_tail,
    threshold_table,
    witness_area_coefficient,
)


class TestLemmaBound:
    """The two-set concentration bound."""

    def test_equal_areas(self):
        """Equal unit areas give (2/3)^(2k)."""
        assert lemma_kk_bound(BoundQuery(1.0, 1.0, 1.0, 1)) == pytest.approx(4 / 9)
        assert lemma_kk_bound(BoundQuery(1.0, 1.0, 1.0, 2)) == pytest.approx(16 / 81)

    def test_empty_a(self):
        """An empty A makes the event impossible."""
        assert lemma_kk_bound(BoundQuery(0.0, 1.0, 1.0, 3)) == 0.0

    def test_hypothesis_violation(self):
        """A larger than C is rejected."""
        with pytest.raises(ValueError, match="hypothesis violated"):
            lemma_kk_bound(BoundQuery(2.0, 1.0, 1.0, 1))

    def test_all_zero(self):
        """Three empty sets have no bound."""
        with pytest.raises(ValueError, match="positive"):
            lemma_kk_bound(BoundQuery(0.0, 0.0, 0.0, 1))

    def test_negative_area_rejected(self):
        """Negative areas are rejected on construction."""
        with pytest.raises(ValueError, match="areas must be >= 0"):
            BoundQuery(-1.0, 1.0, 1.0, 1)

    def test_zero_k_rejected(self):
        """Queries need k >= 1."""
        with pytest.raises(ValueError, match="k must be >= 1"):
            BoundQuery(1.0, 1.0, 1.0, 0)

    def test_exact_equal_areas(self):
        """Exact probability for unit areas and k = 1."""
        expected = math.exp(-1) * (1 - math.exp(-1)) ** 2
        assert lemma_kk_exact(1.0, 1.0, 1.0, 1) == pytest.approx(expected)
        assert expected == pytest.approx(0.146995, abs=1e-6)

    def test_exact_k_zero(self):
        """With k = 0 only the empty-C term remains."""
        assert lemma_kk_exact(0.7, 0.3, 2.0, 0) == pytest.approx(math.exp(-2.0))

    def test_dominance_on_random_cases(self):
        """Exact probability never exceeds the bound for disjoint sets."""
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            c = rng.uniform(0.01, 10.0)
            a, b = c * rng.uniform(0, 1, size=2)
            k = int(rng.integers(1, 21))
            exact = lemma_kk_exact(a, b, c, k)
            bound = lemma_kk_bound(BoundQuery(a, b, c, k))
            assert exact <= bound * (1 + 1e-12)


class TestPoissonTail:
    """Upper Poisson tails."""

    @pytest.mark.parametrize("k,lam", [(1, 0.5), (3, 2.0), (10, 3.0), (5, 20.0), (60, 40.0)])
    def test_matches_scipy(self, k, lam):
        """Tail agrees with scipy's survival function."""
        assert poisson_tail(k, lam) == pytest.approx(stats.poisson.sf(k - 1, lam), rel=1e-9)

    def test_edges(self):
        """Zero threshold and zero mean."""
        assert poisson_tail(0, 5.0) == 1.0
        assert poisson_tail(2, 0.0) == 0.0

    def test_mean_limit(self):
        """Means above the supported range are rejected."""
        with pytest.raises(ValueError, match="lam must be <="):
            poisson_tail(3, 1000.0)


class TestCurves:
    """Interior and boundary bound curves."""

    def test_interior_crossing_value(self):
        """f1 and f2 cross at sqrt(7) - 1."""
        x = math.sqrt(7) - 1
        curves = interior_curves(x)
        assert curves["f1"].value == pytest.approx(curves["f2"].value)
        assert curves["f1"].value == pytest.approx(0.088281, abs=1e-6)

    def test_interior_validity(self):
        """Domain limits of f1 and f2."""
        assert not interior_curves(0.2)["f2"].valid
        assert interior_curves(0.5)["f2"].valid
        assert not interior_curves(3.2)["f1"].valid

    def test_curves_vanish_at_zero(self):
        """Both families vanish as x goes to zero."""
        assert interior_curves(1e-8)["f1"].value < 1e-15
        assert boundary_curves(1e-8)["g1"].value < 1e-15

    def test_boundary_crossing_value(self):
        """g1 and g2 cross at sqrt(2)(sqrt(5) - 1)."""
        x = math.sqrt(2) * (math.sqrt(5) - 1)
        curves = boundary_curves(x)
        assert curves["g1"].value == pytest.approx(curves["g2"].value)
        assert curves["g1"].value == pytest.approx(0.158249, abs=1e-5)

    def test_boundary_validity(self):
        """Only g3 applies past x = 12."""
        curves = boundary_curves(12.0)
        assert not curves["g1"].valid
        assert not curves["g2"].valid
        assert curves["g3"].valid
        assert curves["g3"].value == pytest.approx((1 + 12 / math.sqrt(2)) ** -2)
        assert curves["g3"].value < 1 / 80

    def test_g3_tail_below_eighty(self):
        """The g3 tail stays below 80^-k for large x."""
        for x in np.linspace(12.0, 100.0, 200):
            for k in range(1, 61):
                assert (1 + x / math.sqrt(2)) ** (-2 * k) < 80.0 ** (-k)
                assert boundary_curves(float(x), k)["g3"].value < 80.0 ** (-k)

    def test_x_must_be_positive(self):
        """Non-positive x is rejected."""
        with pytest.raises(ValueError, match="x must be positive"):
            interior_curves(0.0)

    def test_curve_table(self):
        """Tabulated curves carry validity and the applicable minimum."""
        table = bound_curve_table(CurveFamily.BOUNDARY, [0.5, 1.0, 13.0])
        assert table.xs == [0.5, 1.0, 13.0]
        assert set(table.values) == {"g1", "g2", "g3"}
        assert table.valid["g2"] == [False, True, False]
        assert table.applicable_min[2] == pytest.approx(table.values["g3"][2])

    def test_validity_cutoffs_round_up_exact_values(self):
        """Closed-form cutoffs sit next to the rounded ones."""
        cutoffs = exact_validity_cutoffs()
        exact, rounded = cutoffs["f1_max_x"]
        assert exact == pytest.approx(math.sqrt(6 / AREA_COEFF))
        assert abs(exact - rounded) < 0.01
        assert cutoffs["g2_max_x"][0] > 12.0


class TestOptimalAlpha:
    """Crossing-point optimisation."""

    def test_interior(self):
        """Interior optimum and its base."""
        result = optimal_alpha(CurveFamily.INTERIOR)
        assert result.x_star == pytest.approx(math.sqrt(7) - 1, abs=1e-6)
        assert 11.32 < result.alpha < 11.34
        assert result.alpha > 11.3
        assert abs(result.crossing_residual) < 1e-9

    def test_boundary(self):
        """Boundary optimum and its base."""
        result = optimal_alpha(CurveFamily.BOUNDARY)
        assert result.x_star == pytest.approx(math.sqrt(2) * (math.sqrt(5) - 1), abs=1e-6)
        assert 6.31 < result.alpha < 6.33
        assert result.alpha > 6.3

    def test_alpha_independent_of_k(self):
        """The per-configuration base does not move with k."""
        base = optimal_alpha(CurveFamily.INTERIOR).alpha
        assert optimal_alpha(CurveFamily.INTERIOR, k=5).alpha == pytest.approx(base, rel=1e-6)

    def test_optimum_is_a_maximum(self):
        """No grid point beats the optimum."""
        result = optimal_alpha(CurveFamily.INTERIOR)
        for x in np.linspace(0.1, 3.0, 60):
            assert applicable_minimum(CurveFamily.INTERIOR, float(x)) <= result.value + 1e-12

    def test_rejects_zero_k(self):
        """k = 0 is rejected."""
        with pytest.raises(ValueError, match="k must be >= 1"):
            optimal_alpha(CurveFamily.BOUNDARY, k=0)


class TestThresholds:
    """Derived and reported threshold constants."""

    def setup_method(self):
        self.rows = {row.name: row for row in threshold_table()}

    def test_centre_rate(self):
        """Derived interior rate."""
        row = self.rows["c_centre"]
        assert row.derived <= 0.4125
        assert row.derived == pytest.approx(0.4120, abs=5e-4)
        assert row.reported == 0.4125

    def test_boundary_rate(self):
        """Derived boundary rate."""
        row = self.rows["c_boundary"]
        assert row.derived <= 0.272
        assert row.derived == pytest.approx(0.2712, abs=5e-4)

    def test_disc_rate(self):
        """Derived single-disc rate."""
        assert self.rows["c_disc"].derived == pytest.approx(0.45512, abs=1e-5)

    def test_reported_only_rows(self):
        """Earlier published constants are carried without derivation."""
        for name, value in [
            ("c_lower_prior", 0.3043),
            ("c_upper_prior", 0.5139),
            ("c_upper_coarse", 5.1774),
            ("c_lower_coarse", 0.074),
        ]:
            assert self.rows[name].derived is None
            assert self.rows[name].reported == value
        assert self.rows["c_boundary_prior"].reported == 0.311


class TestWitnessCoefficient:
    """Lune area coefficient of the witness pair."""

    def test_values(self):
        """Witness area coefficient at several shrink factors."""
        assert witness_area_coefficient(1.0) == pytest.approx(0.608998, abs=1e-6)
        assert witness_area_coefficient(1 - 1e-4) == pytest.approx(0.609120, abs=1e-6)
        assert witness_area_coefficient(1 - 1e-4) < AREA_COEFF
        assert witness_area_coefficient(0.5) == pytest.approx(2.436, abs=1e-3)

    def test_range(self):
        """Shrink factors outside (0, 1] are rejected."""
        with pytest.raises(ValueError, match="shrink"):
            witness_area_coefficient(0.0)


class TestDiscBlocking:
    """Single-disc blocking probability."""

    def test_small_case(self):
        """Blocking probability at the smallest grid point."""
        assert disc_blocking_probability(1 / 9, 0) == pytest.approx(math.exp(-1) / 9, rel=1e-12)
        assert disc_blocking_probability(1 / 9, 0) == pytest.approx(0.040874, abs=1e-6)

    def test_vanishes_at_zero(self):
        """Tiny discs almost never block."""
        assert disc_blocking_probability(1e-9, 2) < 1e-20

    def test_at_least_dominates_exact(self):
        """At-least probability dominates the exact one."""
        assert disc_blocking_probability_at_least(0.5, 3) >= disc_blocking_probability(0.5, 3)

    @pytest.mark.parametrize("k", [0, 4, 8, 20, 40])
    def test_argmax(self, k):
        """Blocking probability peaks at (k + 1) / 9."""
        assert blocking_argmax(k) == pytest.approx((k + 1) / 9, rel=1e-6)

    def test_stirling_ratio(self):
        """Peak value follows the Stirling approximation."""
        assert blocking_stirling_ratio(40) == pytest.approx(1.0, rel=0.02)
