"""
k-nearest-neighbour graph construction.

The builder buckets points into a uniform grid whose cells hold about
(k+1)/pi points and searches growing square rings of cells until the k-th
candidate is provably closer than anything outside the explored block.
A brute-force all-pairs builder with the same tie rules serves as oracle.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from ..models.graph import NeighborGraph
from ..models.point_set import PointSet

logger = logging.getLogger(__name__)


@dataclass
class GridIndexConfig:
    """Configuration for the grid-bucket spatial index"""

    cell_scale: float = 1.0  # multiple of sqrt((k+1)/pi)
    batch_size: int = 4096  # query points processed per vectorised batch


def _check_k(points: PointSet, k: int) -> None:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if points.count <= k:
        raise ValueError(
            f"k too large for point count (k={k}, m={points.count})"
        )


def _sorted_candidates(
    query: np.ndarray, candidates: np.ndarray, points: np.ndarray
) -> tuple:
    """Sort candidate rows by (squared distance, id); padding (-1) and self go last"""
    m = len(points)
    padded = candidates < 0
    safe = np.where(padded, 0, candidates)
    dx = points[safe, 0] - points[query, 0][:, None]
    dy = points[safe, 1] - points[query, 1][:, None]
    d2 = dx * dx + dy * dy
    d2[padded | (candidates == query[:, None])] = np.inf
    ids = np.where(padded, m, candidates)
    order = np.lexsort((ids, d2), axis=-1)
    return np.take_along_axis(candidates, order, axis=-1), np.take_along_axis(
        d2, order, axis=-1
    )


def graph_from_out_lists(k: int, out_neighbors: np.ndarray) -> NeighborGraph:
    """Symmetrise directed k-NN lists into a NeighborGraph"""
    m = len(out_neighbors)
    sources = np.repeat(np.arange(m, dtype=np.int64), k)
    targets = out_neighbors.reshape(-1).astype(np.int64)
    low = np.minimum(sources, targets)
    high = np.maximum(sources, targets)
    codes = np.unique(low * m + high)
    low, high = codes // m, codes % m

    rows = np.concatenate([low, high])
    cols = np.concatenate([high, low])
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    indptr = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=m), out=indptr[1:])

    out = np.ascontiguousarray(out_neighbors, dtype=np.int64)
    for array in (out, indptr, cols):
        array.setflags(write=False)
    return NeighborGraph(
        k=k, out_neighbors=out, adjacency_indptr=indptr, adjacency_indices=cols
    )


class GridKNNBuilder:
    """Grid-bucket k-NN graph builder"""

    def __init__(self, config: Optional[GridIndexConfig] = None):
        self.config = config or GridIndexConfig()

    def build(self, points: PointSet, k: int) -> NeighborGraph:
        _check_k(points, k)
        coords = points.points
        m = points.count
        side = points.world.side

        target_cell = self.config.cell_scale * math.sqrt((k + 1) / math.pi)
        cells_per_axis = max(1, int(math.ceil(side / target_cell)))
        cell_size = side / cells_per_axis
        cx = np.minimum((coords[:, 0] / cell_size).astype(np.int64), cells_per_axis - 1)
        cy = np.minimum((coords[:, 1] / cell_size).astype(np.int64), cells_per_axis - 1)
        members = self._bucket(cx, cy, cells_per_axis)
        empty_cell = cells_per_axis * cells_per_axis

        out = np.empty((m, k), dtype=np.int64)
        pending = np.arange(m, dtype=np.int64)
        ring = 1
        while len(pending):
            unresolved = []
            offsets = np.arange(-ring, ring + 1)
            # keep the candidate block per batch roughly constant as rings grow
            batch_size = max(64, self.config.batch_size * 9 // (2 * ring + 1) ** 2)
            for start in range(0, len(pending), batch_size):
                batch = pending[start : start + batch_size]
                bx = cx[batch][:, None] + offsets[None, :]
                by = cy[batch][:, None] + offsets[None, :]
                cells = by[:, :, None] * cells_per_axis + bx[:, None, :]
                outside = (
                    (bx[:, None, :] < 0)
                    | (bx[:, None, :] >= cells_per_axis)
                    | (by[:, :, None] < 0)
                    | (by[:, :, None] >= cells_per_axis)
                )
                cells = np.where(outside, empty_cell, cells).reshape(len(batch), -1)
                candidates = members[cells].reshape(len(batch), -1)

                ordered, d2 = _sorted_candidates(batch, candidates, coords)
                kth = d2[:, k - 1]
                guard = self._explored_margin(
                    coords[batch], cx[batch], cy[batch], ring, cell_size, cells_per_axis
                )
                done = np.isfinite(kth) & (kth < guard * guard * (1.0 - 1e-12))
                out[batch[done]] = ordered[done, :k]
                unresolved.append(batch[~done])
            pending = np.concatenate(unresolved) if unresolved else pending[:0]
            if len(pending):
                logger.debug(f"Ring {ring}: {len(pending)} points need a wider search")
            ring += 1

        graph = graph_from_out_lists(k, out)
        logger.debug(
            f"Built k-NN graph: m={m}, k={k}, edges={graph.edge_count}, grid={cells_per_axis}^2"
        )
        return graph

    @staticmethod
    def _bucket(cx: np.ndarray, cy: np.ndarray, cells_per_axis: int) -> np.ndarray:
        """Padded (cells + 1, max_occupancy) table of point ids, -1 for empty slots"""
        cell = cy * cells_per_axis + cx
        total_cells = cells_per_axis * cells_per_axis
        counts = np.bincount(cell, minlength=total_cells)
        order = np.argsort(cell, kind="stable")
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
        rank = np.arange(len(cell)) - starts[cell[order]]
        members = np.full((total_cells + 1, max(1, int(counts.max(initial=0)))), -1, dtype=np.int64)
        members[cell[order], rank] = order
        return members

    @staticmethod
    def _explored_margin(
        coords: np.ndarray,
        cx: np.ndarray,
        cy: np.ndarray,
        ring: int,
        cell_size: float,
        cells_per_axis: int,
    ) -> np.ndarray:
        """Distance from each query to the edge of its explored block (inf where the block reaches the world edge)"""
        left = np.where(cx - ring > 0, coords[:, 0] - (cx - ring) * cell_size, np.inf)
        right = np.where(
            cx + ring < cells_per_axis - 1,
            (cx + ring + 1) * cell_size - coords[:, 0],
            np.inf,
        )
        bottom = np.where(cy - ring > 0, coords[:, 1] - (cy - ring) * cell_size, np.inf)
        top = np.where(
            cy + ring < cells_per_axis - 1,
            (cy + ring + 1) * cell_size - coords[:, 1],
            np.inf,
        )
        return np.minimum(np.minimum(left, right), np.minimum(bottom, top))


def build_graph(points: PointSet, k: int, config: Optional[GridIndexConfig] = None) -> NeighborGraph:
    """
    Build the k-NN graph of a point set.

    out(u) holds the k points nearest u, ties broken by (distance, id);
    the undirected adjacency is the symmetrised union.

    Raises:
        ValueError: If k < 1 or the point count is <= k
    """
    return GridKNNBuilder(config).build(points, k)


def brute_force_graph(points: PointSet, k: int, batch_size: int = 512) -> NeighborGraph:
    """All-pairs k-NN graph with the same contract as build_graph (oracle)"""
    _check_k(points, k)
    m = points.count
    everyone = np.arange(m, dtype=np.int64)
    out = np.empty((m, k), dtype=np.int64)
    for start in range(0, m, batch_size):
        batch = everyone[start : start + batch_size]
        candidates = np.broadcast_to(everyone, (len(batch), m))
        ordered, _ = _sorted_candidates(batch, candidates, points.points)
        out[batch] = ordered[:, :k]
    return graph_from_out_lists(k, out)


def kth_neighbor_radius(graph: NeighborGraph, points: PointSet, vertex: int) -> float:
    """Distance from `vertex` to its k-th nearest neighbour"""
    if not 0 <= vertex < graph.vertex_count:
        raise ValueError(f"vertex {vertex} out of range")
    kth = graph.out_neighbors[vertex, -1]
    dx = points.points[kth, 0] - points.points[vertex, 0]
    dy = points.points[kth, 1] - points.points[vertex, 1]
    return math.sqrt(dx * dx + dy * dy)


def edges_frame(graph: NeighborGraph) -> pd.DataFrame:
    """Edge dump table with columns u, v (u < v, lexicographic)"""
    edges = graph.undirected_edges()
    return pd.DataFrame({"u": edges[:, 0], "v": edges[:, 1]})
