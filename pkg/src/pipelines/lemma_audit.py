"""
Monte Carlo audit of the two-set concentration bound on disjoint rectangles.

Each case places rectangles of areas a, b, c side by side in
[0, a+b+c] x [0, 1] and simulates a unit-intensity process on their union.
The empirical frequency of {#A >= k, #B >= k, #C = 0} is compared against
the bound and the exact Poisson product.
"""

import logging
import math
from functools import partial
from typing import List, Optional, Sequence

import numpy as np

from ..models.bounds import BoundQuery
from ..models.experiment import ExperimentConfig, LemmaAuditRow
from ..utils.bounds import lemma_kk_bound, lemma_kk_exact
from ..utils.sampling import derive_trial_seed
from ..utils.statistics import standard_error
from .trials import TrialRunner

logger = logging.getLogger(__name__)

MAX_K = 20
MIN_EXACT = 1e-3
MAX_DRAWS_PER_CASE = 10_000
BOUND_SLACK_SE = 3.0
EXACT_SLACK_SE = 4.0


def random_cases(count: int, master_seed: int, min_exact: float = MIN_EXACT) -> List[BoundQuery]:
    """
    Random areas with a <= c and b <= c, and 1 <= k <= 20.

    Draws whose exact probability is below `min_exact` are rejected, so the
    Monte Carlo frequency of every kept case is expected to be nonzero.

    Raises:
        ValueError: If count < 1 or too few draws reach `min_exact`
    """
    if count < 1:
        raise ValueError(f"configs must be >= 1, got {count}")
    rng = np.random.default_rng(master_seed)
    cases: List[BoundQuery] = []
    draws = 0
    while len(cases) < count:
        draws += 1
        if draws > MAX_DRAWS_PER_CASE * count:
            raise ValueError(f"could not draw {count} cases with exact >= {min_exact}")
        c = float(rng.uniform(0.1, 5.0))
        a, b = (float(v) for v in c * rng.uniform(0.0, 1.0, size=2))
        k = int(rng.integers(1, MAX_K + 1))
        if lemma_kk_exact(a, b, c, k) >= min_exact:
            cases.append(BoundQuery(a, b, c, k))
    logger.debug(f"Drew {count} lemma cases from {draws} candidates")
    return cases


def simulate_frequency(query: BoundQuery, trials: int, seed: int) -> float:
    """Fraction of trials with #A >= k, #B >= k and #C = 0"""
    rng = np.random.default_rng(seed)
    total = query.a + query.b + query.c
    counts = rng.poisson(total, size=trials)
    xs = rng.uniform(0.0, total, size=int(counts.sum()))
    owner = np.repeat(np.arange(trials), counts)
    in_a = np.bincount(owner[xs < query.a], minlength=trials)
    in_b = np.bincount(owner[(xs >= query.a) & (xs < query.a + query.b)], minlength=trials)
    in_c = counts - in_a - in_b
    hits = (in_a >= query.k) & (in_b >= query.k) & (in_c == 0)
    return float(np.count_nonzero(hits)) / trials


def audit_case(case: int, query: BoundQuery, trials: int, master_seed: int) -> LemmaAuditRow:
    exact = lemma_kk_exact(query.a, query.b, query.c, query.k)
    try:
        bound = lemma_kk_bound(query)
    except ValueError as e:
        return LemmaAuditRow(
            case=case, a=query.a, b=query.b, c=query.c, k=query.k,
            exact=exact, bound=math.nan, mc_freq=math.nan, mc_se=math.nan,
            status="rejected", reason=str(e),
        )

    freq = simulate_frequency(query, trials, derive_trial_seed(master_seed, case))
    freq_se = standard_error(freq, trials)
    exact_se = standard_error(exact, trials)

    problems = []
    if exact > bound * (1 + 1e-12):
        problems.append("exact above bound")
    if freq > bound + BOUND_SLACK_SE * freq_se:
        problems.append("frequency above bound")
    if abs(freq - exact) > EXACT_SLACK_SE * exact_se + 1.0 / trials:
        problems.append("frequency far from exact")
    return LemmaAuditRow(
        case=case, a=query.a, b=query.b, c=query.c, k=query.k,
        exact=exact, bound=bound, mc_freq=freq, mc_se=freq_se,
        status="violation" if problems else "ok", reason="; ".join(problems),
    )


def run_lemma_audit(
    config: ExperimentConfig,
    configs: int,
    cases: Optional[Sequence[BoundQuery]] = None,
) -> List[LemmaAuditRow]:
    """
    Audit the bound on `configs` random cases (or on the given cases).

    Cases that break a <= c or b <= c are kept as rejected rows.
    """
    queries = list(cases) if cases is not None else random_cases(configs, config.master_seed)
    runner = TrialRunner(
        threads=config.threads, show_progress=config.show_progress, desc="lemma audit"
    )
    worker = partial(_audit_indexed, trials=config.lemma_trials, master_seed=config.master_seed)
    rows = runner.map(worker, list(enumerate(queries)))

    violations = sum(1 for r in rows if r.status == "violation")
    rejected = sum(1 for r in rows if r.status == "rejected")
    logger.info(f"Lemma audit: {len(rows)} cases, {violations} violations, {rejected} rejected")
    if violations:
        logger.warning(f"{violations} lemma audit cases violate the bound or the exact oracle")
    return rows


def _audit_indexed(item, trials: int, master_seed: int) -> LemmaAuditRow:
    case, query = item
    return audit_case(case, query, trials, master_seed)
