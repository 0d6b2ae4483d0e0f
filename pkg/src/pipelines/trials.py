"""
Trial execution shared by every experiment pipeline.

One trial samples the process, builds the k-NN graph and classifies its
components. Trials are independent: each draws from its own counter-derived
seed, so running them on any number of threads and collecting the results
in trial order gives identical aggregates.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, TypeVar

import numpy as np
from tqdm import tqdm

from ..models.census import ComponentCensus
from ..models.experiment import TrialRecord
from ..models.geometry import SquareWorld
from ..models.graph import NeighborGraph
from ..models.point_set import PointSet
from ..utils.components import (
    census,
    no_outdegree_subgraph_scan,
    small_pair_distance_census,
)
from ..utils.knn_graph import build_graph
from ..utils.sampling import derive_trial_seed, sample_poisson_square

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


@dataclass
class TrialOutcome:
    record: TrialRecord
    points: Optional[PointSet] = None
    graph: Optional[NeighborGraph] = None
    census: Optional[ComponentCensus] = None

    @property
    def ok(self) -> bool:
        return self.record.status == "ok"


class TrialRunner:
    """Ordered map over trials on a thread pool, with optional progress bar"""

    def __init__(self, threads: int = 1, show_progress: bool = False, desc: str = "trials"):
        if threads < 1:
            raise ValueError(f"threads must be >= 1, got {threads}")
        self.threads = threads
        self.show_progress = show_progress
        self.desc = desc

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        items = list(items)
        progress = tqdm(total=len(items), desc=self.desc, unit=" trial", disable=not self.show_progress)
        results: List[R] = []
        with progress:
            if self.threads == 1:
                for item in items:
                    results.append(fn(item))
                    progress.update(1)
            else:
                with ThreadPoolExecutor(max_workers=self.threads) as executor:
                    # map yields in submission order whatever the completion order
                    for result in executor.map(fn, items):
                        results.append(result)
                        progress.update(1)
        return results


def simulate_trial(
    world: SquareWorld,
    k: int,
    trial: int,
    master_seed: int,
    boundary_strip: Optional[float] = None,
    small_coeff: float = 1.0,
    directed_cap_factor: int = 4,
    keep: bool = False,
) -> TrialOutcome:
    """
    Run one sample -> build_graph -> census trial.

    A sample with at most k points yields an error record instead of
    raising, so experiment tables account for every trial.
    """
    seed = derive_trial_seed(master_seed, trial)
    points = sample_poisson_square(world, seed)
    if points.count <= k:
        logger.warning(
            f"Trial {trial}: sampled {points.count} points, not enough for k={k}"
        )
        return TrialOutcome(
            record=TrialRecord(
                trial=trial,
                seed=seed,
                k=k,
                point_count=points.count,
                status="error",
                error=f"k too large for point count (k={k}, m={points.count})",
            )
        )

    graph = build_graph(points, k)
    result = census(graph, points, boundary_strip=boundary_strip, small_coeff=small_coeff)
    small = result.small_components
    boundary_small = [c for c in small if c.in_boundary_strip]
    pairs = small_pair_distance_census(result, points)
    closed = no_outdegree_subgraph_scan(graph, points, cap=directed_cap_factor * k)
    record = TrialRecord(
        trial=trial,
        seed=seed,
        k=k,
        point_count=points.count,
        status="ok",
        connected=result.is_connected,
        component_count=len(result.components),
        giant_fraction=result.giant_fraction,
        small_count=len(small),
        boundary_small_count=len(boundary_small),
        interior_small_count=len(small) - len(boundary_small),
        corner_small_count=sum(1 for c in small if c.is_corner),
        max_small_diameter=max((c.diameter for c in small), default=0.0),
        max_edge_length=result.max_edge_length,
        mean_size_excess=float(np.mean([c.size_excess for c in small])) if small else math.nan,
        foreign_points=sum(c.foreign_points_in_hull for c in small),
        closed_set_count=len(closed),
        min_small_pair_distance=min((p.distance for p in pairs), default=math.nan),
    )
    if keep:
        return TrialOutcome(record=record, points=points, graph=graph, census=result)
    return TrialOutcome(record=record)
