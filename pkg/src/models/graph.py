from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class NeighborGraph:
    """Directed k-NN relation plus its symmetrised undirected adjacency (CSR)"""

    k: int
    out_neighbors: np.ndarray  # (m, k) vertex ids, nearest first
    adjacency_indptr: np.ndarray  # (m + 1,)
    adjacency_indices: np.ndarray  # sorted neighbour ids per vertex

    @property
    def vertex_count(self) -> int:
        return len(self.out_neighbors)

    @property
    def edge_count(self) -> int:
        return len(self.adjacency_indices) // 2

    def neighbors(self, vertex: int) -> np.ndarray:
        start, end = self.adjacency_indptr[vertex], self.adjacency_indptr[vertex + 1]
        return self.adjacency_indices[start:end]

    def out(self, vertex: int) -> np.ndarray:
        return self.out_neighbors[vertex]

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.adjacency_indptr)

    def undirected_edges(self) -> np.ndarray:
        """(E, 2) array of edges u < v, sorted lexicographically"""
        sources = np.repeat(
            np.arange(self.vertex_count, dtype=np.int64), self.degrees
        )
        mask = sources < self.adjacency_indices
        return np.column_stack([sources[mask], self.adjacency_indices[mask]])

    def same_as(self, other: "NeighborGraph") -> bool:
        """Exact equality of out-lists and adjacency"""
        return (
            self.k == other.k
            and np.array_equal(self.out_neighbors, other.out_neighbors)
            and np.array_equal(self.adjacency_indptr, other.adjacency_indptr)
            and np.array_equal(self.adjacency_indices, other.adjacency_indices)
        )
