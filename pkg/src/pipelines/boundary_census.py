"""
Boundary versus interior census of small components.
"""

import logging
import math
from functools import partial
from typing import List, Optional, Sequence

import numpy as np

from ..models.experiment import BoundaryCensusRow, ExperimentConfig, TrialRecord
from ..models.geometry import SquareWorld
from .trials import TrialRunner, simulate_trial

logger = logging.getLogger(__name__)


def summarize_census(
    config: ExperimentConfig, k: int, records: List[TrialRecord]
) -> BoundaryCensusRow:
    ok = [r for r in records if r.status == "ok"]
    trials = len(records)
    excess = [r.mean_size_excess * r.small_count for r in ok if r.small_count]
    small_total = sum(r.small_count for r in ok)
    scale = math.sqrt(config.log_n)
    boundary_trials = sum(1 for r in ok if r.boundary_small_count > 0)
    interior_trials = sum(1 for r in ok if r.interior_small_count > 0)
    return BoundaryCensusRow(
        area_n=config.area_n,
        k=k,
        trials=trials,
        error_trials=trials - len(ok),
        boundary_strip=config.strip,
        boundary_small_total=sum(r.boundary_small_count for r in ok),
        interior_small_total=sum(r.interior_small_count for r in ok),
        corner_small_total=sum(r.corner_small_count for r in ok),
        boundary_small_trials=boundary_trials,
        interior_small_trials=interior_trials,
        boundary_frequency=boundary_trials / trials,
        interior_frequency=interior_trials / trials,
        mean_size_excess=sum(excess) / small_total if small_total else math.nan,
        foreign_points_total=sum(r.foreign_points for r in ok),
        max_edge_length_normalized=(
            float(np.mean([r.max_edge_length for r in ok])) / scale if ok else math.nan
        ),
    )


def run_boundary_census(
    config: ExperimentConfig, k_values: Optional[Sequence[int]] = None
) -> List[BoundaryCensusRow]:
    """
    Count small components meeting the boundary strip against interior-only ones.

    Args:
        config: Experiment configuration (k or c fixes the default k)
        k_values: Degrees to census; defaults to the configured k

    Returns:
        One summary row per k
    """
    world = SquareWorld(config.area_n)
    runner = TrialRunner(
        threads=config.threads, show_progress=config.show_progress, desc="boundary census"
    )
    k_values = list(k_values) if k_values else [config.resolved_k]

    rows = []
    for k in k_values:
        logger.info(f"Boundary census: k={k}, strip={config.strip:.4f}, {config.trials} trials")
        trial_fn = partial(
            simulate_trial,
            world,
            k,
            master_seed=config.master_seed,
            boundary_strip=config.strip,
            small_coeff=config.small_coeff,
            directed_cap_factor=config.directed_cap_factor,
        )
        records = [outcome.record for outcome in runner.map(trial_fn, range(config.trials))]
        row = summarize_census(config, k, records)
        logger.info(
            f"k={k}: {row.boundary_small_total} boundary vs "
            f"{row.interior_small_total} interior small components"
        )
        rows.append(row)
    return rows
