"""
Seeded Poisson point process sampling and per-trial seed derivation.
"""

import logging

import numpy as np
import pandas as pd

from ..models.geometry import SquareWorld
from ..models.point_set import PointSet

logger = logging.getLogger(__name__)

MASK_64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MASK_64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def derive_trial_seed(master_seed: int, trial_index: int) -> int:
    """
    Mix (master_seed, trial_index) into an independent 64-bit stream seed.

    Counter-based: a Weyl step followed by the splitmix64 finalizer, so the
    map is a bijection of trial_index for a fixed master seed and never
    depends on the order trials are scheduled in.
    """
    master_seed = _check_seed(master_seed)
    if trial_index < 0:
        raise ValueError(f"trial_index must be >= 0, got {trial_index}")
    z = (master_seed + (trial_index + 1) * _GOLDEN_GAMMA) & MASK_64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK_64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK_64
    return z ^ (z >> 31)


def sample_poisson_square(world: SquareWorld, seed: int) -> PointSet:
    """
    Sample a unit-intensity Poisson process on the square world.

    Draws m ~ Poisson(area_n), then m i.i.d. uniform points; the result is a
    pure function of (world, seed).
    """
    rng = np.random.default_rng(_check_seed(seed))
    count = int(rng.poisson(world.area_n))
    points = rng.uniform(0.0, world.side, size=(count, 2))
    logger.debug(f"Sampled {count} points on area {world.area_n} (seed={seed})")
    return PointSet(world=world, seed=seed, points=points)


def points_frame(point_set: PointSet) -> pd.DataFrame:
    """Point dump table with columns idx, x, y"""
    return pd.DataFrame(
        {
            "idx": np.arange(point_set.count, dtype=np.int64),
            "x": point_set.xs,
            "y": point_set.ys,
        }
    )
