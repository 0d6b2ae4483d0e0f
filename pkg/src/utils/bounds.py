"""
Analytic bound evaluation.

The two-set Poisson concentration bound and its exact oracle for disjoint
sets, the interior and boundary bound-curve families with their validity
domains, the crossing-point search for the per-configuration base alpha,
and the disc-blocking probability. "log" is the natural logarithm
throughout.
"""

import logging
import math
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ..models.bounds import (
    BoundQuery,
    BoundResult,
    CurveFamily,
    CurveTable,
    CurveValue,
    ThresholdRow,
)
from .geometry import LUNE_COEFFICIENT

logger = logging.getLogger(__name__)

# Rounded witness-area coefficient used by the curve families
AREA_COEFF = 0.61

INTERIOR_F1_MAX_X = 3.13
INTERIOR_F2_MIN_X = math.sqrt(2) - 1
BOUNDARY_G1_MAX_X = 2.56
BOUNDARY_G2_MIN_X = 2 - math.sqrt(2)
BOUNDARY_G2_MAX_X = 12.0

POISSON_TAIL_MAX_MEAN = 700.0
CROSSING_TOL = 1e-12

_SEARCH_BRACKET = (1.0, 1.5, 2.5)
_CROSSING_PAIRS = {CurveFamily.INTERIOR: ("f1", "f2"), CurveFamily.BOUNDARY: ("g1", "g2")}


def lemma_kk_bound(query: BoundQuery) -> float:
    """
    Upper bound (4|A||B| / (|A|+|B|+|C|)^2)^k on the probability that A and
    B each hold at least k points while C holds none.

    Raises:
        ValueError: If |A| > |C| or |B| > |C|, or all areas are zero
    """
    if query.a > query.c or query.b > query.c:
        raise ValueError(
            f"two-set hypothesis violated: requires a <= c and b <= c "
            f"(a={query.a}, b={query.b}, c={query.c})"
        )
    total = query.a + query.b + query.c
    if total <= 0:
        raise ValueError("at least one area must be positive")
    base = 4.0 * query.a * query.b / (total * total)
    return min(1.0, max(0.0, base**query.k))


def poisson_tail(k: int, lam: float) -> float:
    """
    Q(k, lam) = P(Poisson(lam) >= k).

    Summed from the pmf by upward recurrence, starting from the log-space
    value of the first term; the short side of the distribution is summed
    so small tails keep full relative precision.
    """
    if lam < 0:
        raise ValueError(f"lam must be >= 0, got {lam}")
    if lam > POISSON_TAIL_MAX_MEAN:
        raise ValueError(f"lam must be <= {POISSON_TAIL_MAX_MEAN}, got {lam}")
    if k <= 0:
        return 1.0
    if lam == 0:
        return 0.0

    if k > lam:
        term = math.exp(k * math.log(lam) - lam - math.lgamma(k + 1))
        total = 0.0
        j = k
        while True:
            total += term
            j += 1
            term *= lam / j
            if term <= total * 1e-17:
                break
        return min(1.0, total)

    term = math.exp(-lam)
    head = 0.0
    for j in range(k):
        head += term
        term *= lam / (j + 1)
    return max(0.0, 1.0 - head)


def lemma_kk_exact(a: float, b: float, c: float, k: int) -> float:
    """Exact P(#A >= k, #B >= k, #C = 0) for pairwise-disjoint sets"""
    if min(a, b, c) < 0:
        raise ValueError(f"areas must be >= 0, got ({a}, {b}, {c})")
    return math.exp(-c) * poisson_tail(k, a) * poisson_tail(k, b)


def _check_x(x: float) -> None:
    if not x > 0:
        raise ValueError(f"x must be positive, got {x}")


def _ratio_curve(x: float, denominator: float, k: int) -> float:
    numerator = 4.0 * AREA_COEFF * x * x
    return (numerator / (denominator * denominator)) ** k


def interior_curves(x: float, k: int = 1) -> Dict[str, CurveValue]:
    """Interior bound curves f1 (valid for x < 3.13) and f2 (valid for x > sqrt2 - 1)"""
    _check_x(x)
    lune = AREA_COEFF * x * x
    return {
        "f1": CurveValue(_ratio_curve(x, 7.0 + lune, k), x < INTERIOR_F1_MAX_X),
        "f2": CurveValue(_ratio_curve(x, (x + 1) ** 2 + lune, k), x > INTERIOR_F2_MIN_X),
    }


def boundary_curves(x: float, k: int = 1) -> Dict[str, CurveValue]:
    """Boundary bound curves g1 (x < 2.56), g2 (2 - sqrt2 < x < 12) and g3 (always)"""
    _check_x(x)
    lune = AREA_COEFF * x * x
    half_disc = (1 + x / math.sqrt(2)) ** 2
    return {
        "g1": CurveValue(_ratio_curve(x, 5.0 + lune, k), x < BOUNDARY_G1_MAX_X),
        "g2": CurveValue(
            _ratio_curve(x, half_disc + lune, k),
            BOUNDARY_G2_MIN_X < x < BOUNDARY_G2_MAX_X,
        ),
        "g3": CurveValue(half_disc ** (-k), True),
    }


def family_curves(family: CurveFamily, x: float, k: int = 1) -> Dict[str, CurveValue]:
    if CurveFamily(family) is CurveFamily.INTERIOR:
        return interior_curves(x, k)
    return boundary_curves(x, k)


def applicable_minimum(family: CurveFamily, x: float, k: int = 1) -> float:
    """Smallest valid curve at x"""
    return min(c.value for c in family_curves(family, x, k).values() if c.valid)


def analytic_crossing(family: CurveFamily) -> float:
    if CurveFamily(family) is CurveFamily.INTERIOR:
        return math.sqrt(7) - 1
    return math.sqrt(2) * (math.sqrt(5) - 1)


def crossing_residual(family: CurveFamily, x: float) -> float:
    """(x+1)^2 - 7 for the interior family, (1 + x/sqrt2)^2 - 5 for the boundary one"""
    if CurveFamily(family) is CurveFamily.INTERIOR:
        return (x + 1) ** 2 - 7
    return (1 + x / math.sqrt(2)) ** 2 - 5


def optimal_alpha(family: CurveFamily, k: int = 1) -> BoundResult:
    """
    Worst case over x of the applicable minimum bound.

    A golden-section search on the bracket locates the maximum, which sits
    where the two leading curves cross; the crossing is then polished by
    root finding on their difference.

    Returns:
        BoundResult with alpha = value^(-1/k)
    """
    family = CurveFamily(family)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")

    search = minimize_scalar(
        lambda x: -applicable_minimum(family, x, k),
        bracket=_SEARCH_BRACKET,
        method="golden",
        tol=1e-12,
    )
    first, second = _CROSSING_PAIRS[family]

    def gap(x: float) -> float:
        curves = family_curves(family, x, k)
        return curves[first].value - curves[second].value

    x_star = float(search.x)
    width = 1e-3
    if gap(x_star - width) * gap(x_star + width) < 0:
        x_star = brentq(gap, x_star - width, x_star + width, xtol=1e-15)
    else:
        logger.warning(f"No {family.value} crossing near the search optimum x={x_star}")

    value = applicable_minimum(family, x_star, k)
    residual = crossing_residual(family, x_star)
    if abs(residual) > CROSSING_TOL:
        logger.warning(f"{family.value} crossing residual {residual:.3e} above tolerance")

    return BoundResult(
        family=family,
        x_star=x_star,
        alpha=value ** (-1.0 / k),
        value=value,
        analytic_x_star=analytic_crossing(family),
        crossing_residual=residual,
        curves=family_curves(family, x_star, k),
    )


def witness_area_coefficient(shrink: float) -> float:
    """Lune area over the disc area of radius shrink * r0: (pi/3 + sqrt3/2) / (pi shrink^2)"""
    if not 0 < shrink <= 1:
        raise ValueError(f"shrink must be in (0, 1], got {shrink}")
    return LUNE_COEFFICIENT / (math.pi * shrink * shrink)


def disc_blocking_probability(lam: float, k: int) -> float:
    """Exactly k+1 points in a disc of area lam and none in the 3x disc around it"""
    if not lam > 0:
        raise ValueError(f"lam must be positive, got {lam}")
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    return math.exp(-9.0 * lam + (k + 1) * math.log(lam) - math.lgamma(k + 2))


def disc_blocking_probability_at_least(lam: float, k: int) -> float:
    """At least k+1 points in the disc and none in the surrounding annulus"""
    if not lam > 0:
        raise ValueError(f"lam must be positive, got {lam}")
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    return poisson_tail(k + 1, lam) * math.exp(-8.0 * lam)


def blocking_argmax(k: int, grid_size: int = 400) -> float:
    """Disc area maximising disc_blocking_probability: grid scan, then golden refinement"""
    grid = np.geomspace(1e-3, 10.0 * (k + 1), grid_size)
    log_values = [(k + 1) * math.log(lam) - 9.0 * lam for lam in grid]
    best = int(np.argmax(log_values))
    best = min(max(best, 1), grid_size - 2)
    result = minimize_scalar(
        lambda lam: -((k + 1) * math.log(lam) - 9.0 * lam),
        bracket=(grid[best - 1], grid[best], grid[best + 1]),
        method="golden",
        tol=1e-12,
    )
    return float(result.x)


def blocking_stirling_ratio(k: int) -> float:
    """Peak blocking probability times sqrt(2 pi (k+1)) 9^(k+1); tends to 1"""
    peak = disc_blocking_probability((k + 1) / 9.0, k)
    return peak * math.sqrt(2 * math.pi * (k + 1)) * 9.0 ** (k + 1)


def threshold_table() -> List[ThresholdRow]:
    """Derived threshold constants next to the published rounded values"""
    alpha_interior = optimal_alpha(CurveFamily.INTERIOR).alpha
    alpha_boundary = optimal_alpha(CurveFamily.BOUNDARY).alpha
    return [
        ThresholdRow("c_centre", 1.0 / math.log(alpha_interior), 0.4125, "derived",
                     "no small interior component above this rate"),
        ThresholdRow("c_boundary", 1.0 / (2.0 * math.log(alpha_boundary)), 0.272, "derived",
                     "no small boundary component above this rate"),
        ThresholdRow("c_disc", 1.0 / math.log(9.0), 0.455, "derived",
                     "isolated disc configurations appear below this rate"),
        ThresholdRow("c_boundary_prior", 1.0 / (2.0 * math.log(5.0)), 0.311, "derived",
                     "earlier boundary rate from a one-side base of 5"),
        ThresholdRow("c_boundary_lemma_check", 1.0 / math.log(25.0), None, "derived",
                     "comparison rate used against the interior bound"),
        ThresholdRow("c_lower_prior", None, 0.3043, "reported", "disconnected below"),
        ThresholdRow("c_upper_prior", None, 0.5139, "reported", "connected above"),
        ThresholdRow("c_upper_coarse", None, 5.1774, "reported", "connected above"),
        ThresholdRow("c_lower_coarse", None, 0.074, "reported", "disconnected below"),
    ]


def bound_curve_table(family: CurveFamily, xs: Sequence[float], k: int = 1) -> CurveTable:
    """Tabulate curve values, validity flags and the applicable minimum"""
    family = CurveFamily(family)
    table = CurveTable(family=family, k=k)
    for x in xs:
        curves = family_curves(family, float(x), k)
        table.xs.append(float(x))
        for name, curve in curves.items():
            table.values.setdefault(name, []).append(curve.value)
            table.valid.setdefault(name, []).append(curve.valid)
        table.applicable_min.append(min(c.value for c in curves.values() if c.valid))
    return table


def exact_validity_cutoffs() -> Dict[str, Tuple[float, float]]:
    """Exact algebraic validity cutoffs paired with the rounded decimals in use"""
    return {
        "f1_max_x": (math.sqrt(6.0 / AREA_COEFF), INTERIOR_F1_MAX_X),
        "g1_max_x": (math.sqrt(4.0 / AREA_COEFF), BOUNDARY_G1_MAX_X),
        # 0.61 x^2 = (1 + x/sqrt2)^2 - 1 at x = sqrt2 / (0.61 - 1/2)
        "g2_max_x": (math.sqrt(2) / (AREA_COEFF - 0.5), BOUNDARY_G2_MAX_X),
    }
