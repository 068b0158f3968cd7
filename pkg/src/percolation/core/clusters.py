"""
Cluster identification for open-edge configurations.

Two flavours: a classic union-find for single configurations, and a
vectorised label propagation that processes a whole batch of
configurations of one region at once (brute force chunks, Monte Carlo
blocks).
"""
from typing import Iterable, List, Tuple

import numpy as np

from src.percolation.core.model import Configuration, LatticeRegion, Vertex


class UnionFind:
    """
    Union-find over the integers ``0..n-1`` with union by rank and path compression.

    Attributes:
        n_clusters: Number of disjoint sets currently held.
    """

    def __init__(self, n: int):
        self._leader = list(range(n))
        self._rank = [0] * n
        self._size = [1] * n
        self.n_clusters = n

    def __repr__(self):
        return f"UnionFind: contains {self.n_clusters} clusters."

    def find(self, s: int) -> int:
        root = s
        while self._leader[root] != root:
            root = self._leader[root]
        while self._leader[s] != root:
            self._leader[s], s = root, self._leader[s]
        return root

    def union(self, a: int, b: int) -> bool:
        """Merge the sets containing ``a`` and ``b``; False if they were already one set."""
        s1, s2 = self.find(a), self.find(b)
        if s1 == s2:
            return False
        if self._rank[s1] < self._rank[s2]:
            s1, s2 = s2, s1
        if self._rank[s1] == self._rank[s2]:
            self._rank[s1] += 1
        self._leader[s2] = s1
        self._size[s1] += self._size[s2]
        self.n_clusters -= 1
        return True

    def size(self, s: int) -> int:
        return self._size[self.find(s)]

    def connected(self, a: int, b: int) -> bool:
        return self.find(a) == self.find(b)


def open_clusters(config: Configuration) -> UnionFind:
    """Union-find over the region's vertices with every open edge merged."""
    region = config.region
    us, vs = region.endpoint_indices
    uf = UnionFind(region.n_vertices)
    for i in range(region.n_edges):
        if not config.is_closed(i):
            uf.union(int(us[i]), int(vs[i]))
    return uf


def truncated_event(config: Configuration, x: Vertex, y: Vertex) -> bool:
    """
    x and y share an open cluster whose vertex set avoids the internal boundary.

    Args:
        config: Edge configuration of a region
        x, y: Vertices of the region

    Returns:
        Whether the finite-volume truncated connectivity event occurs
    """
    region = config.region
    uf = open_clusters(config)
    ix, iy = region.vertex_index(x), region.vertex_index(y)
    if not uf.connected(ix, iy):
        return False
    root = uf.find(ix)
    return all(uf.find(int(b)) != root for b in region.boundary_indices)


def label_clusters(open_mask: np.ndarray, us: np.ndarray, vs: np.ndarray, n_vertices: int) -> np.ndarray:
    """
    Cluster labels for a batch of configurations.

    Every vertex ends with the smallest vertex index of its open cluster.
    Labels are propagated across open edges with alternating forward and
    backward sweeps until nothing changes.

    Args:
        open_mask: Boolean array (batch, n_edges), True for open edges
        us, vs: Endpoint vertex indices per edge
        n_vertices: Number of vertices of the region

    Returns:
        Integer array (batch, n_vertices) of cluster labels
    """
    batch = open_mask.shape[0]
    labels = np.tile(np.arange(n_vertices, dtype=np.int32), (batch, 1))
    n_edges = open_mask.shape[1]
    if n_edges == 0:
        return labels
    forward = list(range(n_edges))
    orders = (forward, forward[::-1])
    sweep = 0
    while True:
        changed = False
        for e in orders[sweep % 2]:
            u, v = us[e], vs[e]
            lu, lv = labels[:, u], labels[:, v]
            low = np.minimum(lu, lv)
            active = open_mask[:, e] & (lu != lv)
            if active.any():
                changed = True
                labels[:, u] = np.where(active, low, lu)
                labels[:, v] = np.where(active, low, lv)
        sweep += 1
        if not changed:
            return labels


def truncated_event_batch(labels: np.ndarray, x_index: int, y_index: int, boundary: np.ndarray) -> np.ndarray:
    """Vectorised truncated connectivity event from cluster labels."""
    lx = labels[:, x_index]
    same = lx == labels[:, y_index]
    if boundary.size == 0:
        return same
    touches = (labels[:, boundary] == lx[:, None]).any(axis=1)
    return same & ~touches


def events_for_pairs(open_mask: np.ndarray, region: LatticeRegion,
                     pairs: Iterable[Tuple[Vertex, Vertex]]) -> List[np.ndarray]:
    """Label once, evaluate the truncated event for several (x, y) pairs."""
    us, vs = region.endpoint_indices
    labels = label_clusters(open_mask, us, vs, region.n_vertices)
    return [truncated_event_batch(labels, region.vertex_index(x), region.vertex_index(y), region.boundary_indices)
            for x, y in pairs]
