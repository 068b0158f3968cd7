"""
Unit tests for cluster identification.
"""
import unittest
import os
import sys

import numpy as np

# Add the project root to the path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '../../../')))
from src.percolation.core.clusters import (
    UnionFind, events_for_pairs, label_clusters, open_clusters, truncated_event, truncated_event_batch,
)
from src.percolation.core.model import Configuration, LatticeRegion


class TestUnionFind(unittest.TestCase):
    """
    Test cases for the union-find structure.
    """
    def test_union_and_find(self):
        uf = UnionFind(5)
        self.assertEqual(uf.n_clusters, 5)
        self.assertTrue(uf.union(0, 1))
        self.assertTrue(uf.union(3, 4))
        self.assertFalse(uf.union(1, 0))
        self.assertTrue(uf.connected(0, 1))
        self.assertFalse(uf.connected(1, 3))
        self.assertEqual(uf.size(4), 2)
        self.assertEqual(uf.n_clusters, 3)


class TestTruncatedEvent(unittest.TestCase):
    """
    Test cases for the finite-volume truncated connectivity event.
    """
    def setUp(self):
        self.region = LatticeRegion(-1, 2, -1, 2)

    def test_all_open_touches_boundary(self):
        config = Configuration(self.region, 0)
        self.assertEqual(open_clusters(config).n_clusters, 1)
        self.assertFalse(truncated_event(config, (0, 0), (1, 1)))

    def test_isolated_origin(self):
        region = LatticeRegion.centered(1)
        closed = [((-1, 0), (0, 0)), ((0, 0), (1, 0)), ((0, -1), (0, 0)), ((0, 0), (0, 1))]
        config = Configuration.from_closed_edges(region, closed)
        self.assertTrue(truncated_event(config, (0, 0), (0, 0)))

    def test_interior_square_cluster(self):
        # close every edge leaving the 2 x 2 interior block
        interior = {(0, 0), (1, 0), (0, 1), (1, 1)}
        closed = [e for e in self.region.edges() if (e[0] in interior) != (e[1] in interior)]
        config = Configuration.from_closed_edges(self.region, closed)
        self.assertTrue(truncated_event(config, (0, 0), (1, 1)))
        self.assertTrue(truncated_event(config, (1, 0), (0, 1)))

    def test_batch_matches_union_find(self):
        rng = np.random.default_rng(2024)
        open_mask = rng.random((200, self.region.n_edges)) < 0.55
        us, vs = self.region.endpoint_indices
        labels = label_clusters(open_mask, us, vs, self.region.n_vertices)
        x_index, y_index = self.region.vertex_index((0, 0)), self.region.vertex_index((1, 1))
        batch = truncated_event_batch(labels, x_index, y_index, self.region.boundary_indices)
        for row, expected in zip(open_mask, batch):
            config = Configuration.from_closed_array(self.region, ~row)
            self.assertEqual(truncated_event(config, (0, 0), (1, 1)), bool(expected))

    def test_labels_are_cluster_minima(self):
        open_mask = np.zeros((1, self.region.n_edges), dtype=bool)
        open_mask[0, self.region.edge_index(((1, 1), (2, 1)))] = True
        us, vs = self.region.endpoint_indices
        labels = label_clusters(open_mask, us, vs, self.region.n_vertices)
        a, b = self.region.vertex_index((1, 1)), self.region.vertex_index((2, 1))
        self.assertEqual(labels[0, a], labels[0, b])
        self.assertEqual(labels[0, b], min(a, b))

    def test_events_for_pairs(self):
        open_mask = np.zeros((3, self.region.n_edges), dtype=bool)
        first, second = events_for_pairs(open_mask, self.region, [((0, 0), (0, 0)), ((0, 0), (1, 1))])
        self.assertTrue(first.all())
        self.assertFalse(second.any())


if __name__ == '__main__':
    unittest.main()
