"""
Connectivity sweep over a grid of c values, k = ceil(c ln n).
"""

import logging
import math
from functools import partial
from typing import List, Sequence

import numpy as np

from ..models.experiment import ExperimentConfig, SweepRow, TrialRecord
from ..models.geometry import SquareWorld
from ..utils.statistics import wilson_interval
from .trials import TrialRunner, simulate_trial

logger = logging.getLogger(__name__)


def parse_c_grid(text: str) -> List[float]:
    """
    Expand "a:b:step" into an inclusive grid, each value rounded to 12 digits.

    Raises:
        ValueError: If the text is malformed or the step is not positive
    """
    try:
        start, stop, step = (float(part) for part in text.split(":"))
    except ValueError as e:
        raise ValueError(f"c-grid must look like a:b:step, got {text!r}") from e
    if step <= 0 or stop < start:
        raise ValueError(f"c-grid needs step > 0 and b >= a, got {text!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


class ConnectivitySweep:
    """
    Estimate P(connected) at each c of a grid.

    Trial t uses the same seed at every grid point, so the curve over c is
    driven by common random numbers and stays smooth at modest trial counts.
    """

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.world = SquareWorld(config.area_n)
        self.runner = TrialRunner(
            threads=config.threads, show_progress=config.show_progress, desc="sweep"
        )
        self.trial_records: List[TrialRecord] = []

    def run(self, c_grid: Sequence[float]) -> List[SweepRow]:
        if not c_grid:
            raise ValueError("c_grid must not be empty")
        rows = []
        self.trial_records = []
        for c in c_grid:
            records = self.run_point(float(c))
            self.trial_records.extend(records)
            rows.append(self.summarize(float(c), records))
        return rows

    def run_point(self, c: float) -> List[TrialRecord]:
        config = self.config.with_c(c)
        k = config.resolved_k
        if k >= config.area_n / 2:
            logger.warning(f"k={k} is at least half the expected point count {config.area_n}")
        logger.info(f"Sweep point c={c}: k={k}, {config.trials} trials")

        trial_fn = partial(
            simulate_trial,
            self.world,
            k,
            master_seed=config.master_seed,
            boundary_strip=config.boundary_strip,
            small_coeff=config.small_coeff,
            directed_cap_factor=config.directed_cap_factor,
        )
        records = [outcome.record for outcome in self.runner.map(trial_fn, range(config.trials))]
        for record in records:
            record.c = c
        return records

    def summarize(self, c: float, records: List[TrialRecord]) -> SweepRow:
        """Aggregate one grid point; error trials count as not connected"""
        ok = [r for r in records if r.status == "ok"]
        errors = len(records) - len(ok)
        if errors:
            logger.warning(f"c={c}: {errors} of {len(records)} trials are error records")

        trials = len(records)
        connected = sum(1 for r in ok if r.connected)
        interval = wilson_interval(connected, trials)
        scale = math.sqrt(self.world.log_n)
        return SweepRow(
            area_n=self.config.area_n,
            c=c,
            k=records[0].k,
            trials=trials,
            connected_count=connected,
            p_hat=connected / trials,
            ci_lo=interval.lo,
            ci_hi=interval.hi,
            mean_giant_fraction=float(np.mean([r.giant_fraction for r in ok])) if ok else math.nan,
            max_small_diameter_normalized=max((r.max_small_diameter for r in ok), default=0.0) / scale,
            boundary_small_trials=sum(1 for r in ok if r.boundary_small_count > 0),
            interior_small_trials=sum(1 for r in ok if r.interior_small_count > 0),
        )


def run_connectivity_sweep(config: ExperimentConfig, c_grid: Sequence[float]) -> List[SweepRow]:
    """One SweepRow per c; deterministic in (config, c_grid) whatever the thread count"""
    return ConnectivitySweep(config).run(c_grid)
