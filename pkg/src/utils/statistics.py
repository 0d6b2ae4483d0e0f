"""
Aggregation statistics for Monte Carlo experiments.
"""

import math
from typing import NamedTuple


class Interval(NamedTuple):
    lo: float
    hi: float


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> Interval:
    """
    Wilson score interval for a binomial proportion.

    Stays inside [0, 1] and behaves at 0 or `trials` successes, where the
    normal approximation collapses to a point.

    Args:
        successes: Number of successful trials
        trials: Total number of trials (>= 1)
        z: Normal quantile (1.96 for 95%)

    Returns:
        Interval(lo, hi)

    Examples:
        >>> wilson_interval(5, 10)
        Interval(lo=0.2365..., hi=0.7634...)
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not 0 <= successes <= trials:
        raise ValueError(f"successes must be in [0, {trials}], got {successes}")
    if z <= 0:
        raise ValueError(f"z must be positive, got {z}")

    p_hat = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    centre = p_hat + z2 / (2 * trials)
    margin = z * math.sqrt((p_hat * (1 - p_hat) + z2 / (4 * trials)) / trials)

    lo = 0.0 if successes == 0 else max(0.0, (centre - margin) / denom)
    hi = 1.0 if successes == trials else min(1.0, (centre + margin) / denom)
    return Interval(lo, hi)


def standard_error(p: float, trials: int) -> float:
    """Binomial standard error sqrt(p(1-p)/trials)"""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    return math.sqrt(max(p * (1 - p), 0.0) / trials)
