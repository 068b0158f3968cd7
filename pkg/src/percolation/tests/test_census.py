"""
Unit tests for the exhaustive contour census and the counting-lemma check.
"""
import unittest
import os
import sys

# Add the project root to the path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '../../../')))
from src.percolation.contours.census import (
    anchor_columns, census, census_to_frame, lemma_reports, lemma_table, verify_counting_lemma,
)
from src.percolation.contours.minimal_contours import beta
from src.percolation.exceptions import DomainValidityError, ResourceBudgetExceeded


class TestCensus(unittest.TestCase):
    """
    Test cases for the census of contours surrounding {0, x}.
    """
    @classmethod
    def setUpClass(cls):
        cls.result = census((1, 1), 12, keep_members=True)

    def test_minimal_length_matches_beta(self):
        self.assertEqual(self.result.beta, 3)
        self.assertEqual(self.result.count(8), beta((1, 1)))
        self.assertEqual(self.result.count(6), 0)

    def test_odd_lengths_are_empty(self):
        for n in (9, 11):
            self.assertEqual(self.result.count(n), 0)

    def test_longer_contours_exist(self):
        self.assertGreater(self.result.count(10), 0)
        self.assertGreater(self.result.count(12), self.result.count(10))

    def test_members_are_distinct_surrounding_contours(self):
        members = self.result.members
        self.assertEqual(len(members), sum(self.result.counts.values()))
        self.assertEqual(len({m.edges for m in members}), len(members))
        for contour in members:
            self.assertTrue(contour.surrounds((0, 0), (1, 1)))
            self.assertEqual(contour.h_count % 2, 0)
            self.assertEqual(contour.v_count % 2, 0)

    def test_anchor_counts_sum_to_totals(self):
        for n in range(8, 13):
            self.assertEqual(sum(self.result.anchors(n).values()), self.result.count(n))
        self.assertEqual(set(self.result.anchors(8)), {0})
        self.assertEqual(anchor_columns((1, 1), 12), [-2, -1, 0])

    def test_counting_lemma(self):
        for report in lemma_reports(self.result):
            self.assertTrue(report.holds, report)
            self.assertTrue(report.anchor_holds, report)
        report = verify_counting_lemma((1, 1), 2, self.result)
        self.assertEqual(report.rhs, 12096)
        self.assertEqual(report.anchor_rhs, 3 ** 2 * 45 * 3)

    def test_lemma_outside_range(self):
        with self.assertRaises(DomainValidityError):
            verify_counting_lemma((1, 1), 5, self.result)
        with self.assertRaises(DomainValidityError):
            verify_counting_lemma((1, 2), 0, self.result)

    def test_frames(self):
        frame = census_to_frame(self.result)
        self.assertEqual(list(frame.columns), ["x1", "x2", "n", "count"])
        self.assertEqual(frame["n"].tolist(), list(range(8, 13)))
        table = lemma_table(self.result)
        self.assertEqual(table["m"].tolist(), [0, 1, 2, 3, 4])
        self.assertTrue(table["holds"].all())

    def test_count_beyond_census(self):
        with self.assertRaises(DomainValidityError):
            self.result.count(14)


class TestCensusLimits(unittest.TestCase):
    """
    Test cases for census preconditions and budgets.
    """
    def test_second_target(self):
        result = census((1, 2), 12)
        self.assertEqual(result.count(10), 6)
        self.assertEqual(result.count(11), 0)
        self.assertEqual(verify_counting_lemma((1, 2), 2, result).rhs, 38880)
        self.assertTrue(verify_counting_lemma((1, 2), 2, result).holds)

    def test_n_max_below_norm(self):
        with self.assertRaises(DomainValidityError):
            census((1, 1), 7)

    def test_non_positive_target(self):
        with self.assertRaises(DomainValidityError):
            census((0, 2), 10)

    def test_budget_exceeded(self):
        with self.assertRaises(ResourceBudgetExceeded):
            census((1, 1), 12, budget=10)

    def test_parallel_budget_is_shared(self):
        nodes = census((1, 2), 14).nodes
        # one node short of what the whole search needs
        limit = nodes - 1
        with self.assertRaises(ResourceBudgetExceeded) as context:
            census((1, 2), 14, budget=limit, workers=2)
        self.assertEqual(context.exception.limit, limit)
        self.assertEqual(census((1, 2), 14, budget=nodes, workers=2).nodes, nodes)


class TestCountingLemmaLarge(unittest.TestCase):
    """
    Counting lemma for x = (2, 3) up to m = 6 (about a million search nodes).
    """
    def test_lemma_up_to_six(self):
        # Skip unless long-running tests are requested
        if not os.environ.get("PERCOLAB_SLOW_TESTS"):
            self.skipTest("Skipping test_lemma_up_to_six; set PERCOLAB_SLOW_TESTS=1 to run it")

        result = census((2, 3), 20, workers=4)
        self.assertEqual(result.counts, {14: 50, 15: 0, 16: 850, 17: 0, 18: 9369, 19: 0, 20: 86132})
        self.assertEqual(result.rejected, 0)
        reports = lemma_reports(result)
        self.assertEqual([r.m for r in reports], list(range(7)))
        for report in reports:
            self.assertTrue(report.holds, report)


if __name__ == '__main__':
    unittest.main()
