# tests/unit/test_statistics.py
"""
Unit tests for the aggregation statistics.
"""

import math

import pytest

from src.utils.statistics import Interval, standard_error, wilson_interval


class TestWilsonInterval:
    """Wilson score interval edge cases and a closed-form value."""

    def test_no_successes(self):
        """Zero successes pin the lower end at 0."""
        interval = wilson_interval(0, 10)
        assert interval.lo == 0.0
        assert 0 < interval.hi < 1

    def test_all_successes(self):
        """All successes pin the upper end at 1."""
        interval = wilson_interval(10, 10)
        assert interval.hi == 1.0
        assert 0 < interval.lo < 1

    def test_half(self):
        """Five of ten is symmetric about one half."""
        lo, hi = wilson_interval(5, 10)
        assert lo == pytest.approx(0.2366, abs=1e-4)
        assert hi == pytest.approx(0.7634, abs=1e-4)
        assert lo + hi == pytest.approx(1.0)

    def test_centre_is_pulled_toward_half(self):
        """The interval centre shrinks toward one half."""
        interval = wilson_interval(2, 10)
        assert (interval.lo + interval.hi) / 2 > 0.2

    def test_returns_named_tuple(self):
        """Intervals unpack as (lo, hi)."""
        assert isinstance(wilson_interval(3, 7), Interval)

    @pytest.mark.parametrize(
        "successes,trials,match",
        [(1, 0, "trials must be >= 1"), (11, 10, "successes must be"), (-1, 10, "successes must be")],
    )
    def test_invalid_inputs(self, successes, trials, match):
        """Impossible counts are rejected."""
        with pytest.raises(ValueError, match=match):
            wilson_interval(successes, trials)

    def test_rejects_non_positive_z(self):
        """z must be positive."""
        with pytest.raises(ValueError, match="z must be positive"):
            wilson_interval(1, 2, z=0.0)


class TestStandardError:
    """Binomial standard error."""

    def test_value(self):
        """Binomial standard error at a few points."""
        assert standard_error(0.5, 100) == pytest.approx(0.05)
        assert standard_error(0.0, 100) == 0.0
        assert standard_error(0.2, 10_000) == pytest.approx(math.sqrt(0.16 / 10_000))

    def test_trials_must_be_positive(self):
        """Zero trials are rejected."""
        with pytest.raises(ValueError):
            standard_error(0.5, 0)
