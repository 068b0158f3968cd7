"""
Unit tests for engine settings and the search budget.
"""
import unittest
import os
import sys
import pickle
import multiprocessing

# Add the project root to the path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '../../../')))
from config.config import get_config, resolve_threads, settings
from src.percolation.exceptions import InvariantViolation, ResourceBudgetExceeded
from src.utils.budget.limiter import SearchBudget, SharedSearchBudget, require_within


class TestSettings(unittest.TestCase):
    def test_sections(self):
        exact = get_config("exact")
        self.assertEqual(exact["brute_force_edge_cap"], settings.BRUTE_FORCE_EDGE_CAP)
        self.assertEqual(exact["rational_edge_cap"], settings.RATIONAL_EDGE_CAP)
        self.assertEqual(set(get_config()), {"exact", "contours", "mc", "runtime"})
        with self.assertRaises(ValueError):
            get_config("portfolio")

    def test_resolve_threads(self):
        self.assertEqual(resolve_threads(3), 3)
        self.assertGreaterEqual(resolve_threads(0), 1)
        self.assertEqual(resolve_threads(-1), resolve_threads(0))


class TestSearchBudget(unittest.TestCase):
    """
    Test cases for the consumption budget.
    """
    def test_consume_until_exhausted(self):
        budget = SearchBudget(10, "test nodes", "raise --budget")
        budget.consume(4)
        budget.consume(6)
        self.assertEqual(budget.remaining, 0)
        self.assertFalse(budget.check_availability())
        with self.assertRaises(ResourceBudgetExceeded) as context:
            budget.consume()
        self.assertIn("test nodes", str(context.exception))
        self.assertIn("raise --budget", str(context.exception))
        self.assertEqual(budget.used, 10)

    def test_availability(self):
        budget = SearchBudget(5)
        self.assertTrue(budget.check_availability(5))
        self.assertFalse(budget.check_availability(6))

    def test_invalid_limit(self):
        with self.assertRaises(ValueError):
            SearchBudget(0)

    def test_require_within(self):
        require_within("edges", 16, 16)
        with self.assertRaises(ResourceBudgetExceeded) as context:
            require_within("edges", 17, 16, "use --engine transfer")
        self.assertEqual(context.exception.requested, 17)
        self.assertEqual(context.exception.limit, 16)


class TestSharedSearchBudget(unittest.TestCase):
    """
    Budgets built around one shared counter spend from the same limit.
    """
    def test_instances_share_the_limit(self):
        counter = multiprocessing.Value("q", 0)
        first = SharedSearchBudget(10, counter, "census search nodes")
        second = SharedSearchBudget(10, counter, "census search nodes")
        first.consume(6)
        self.assertEqual(second.used, 6)
        self.assertEqual(second.remaining, 4)
        self.assertFalse(second.check_availability(5))
        with self.assertRaises(ResourceBudgetExceeded) as context:
            second.consume(5)
        self.assertEqual(context.exception.requested, 11)
        second.consume(4)
        self.assertEqual(counter.value, 10)

    def test_invalid_limit(self):
        with self.assertRaises(ValueError):
            SharedSearchBudget(0, multiprocessing.Value("q", 0))


class TestExceptionPickling(unittest.TestCase):
    """
    Errors raised inside pool workers survive the trip back to the parent.
    """
    def test_resource_budget_exceeded(self):
        error = pickle.loads(pickle.dumps(ResourceBudgetExceeded("census search nodes", 12, 10, "raise --budget")))
        self.assertEqual((error.resource, error.requested, error.limit, error.hint),
                         ("census search nodes", 12, 10, "raise --budget"))
        self.assertIn("raise --budget", str(error))

    def test_invariant_violation(self):
        error = pickle.loads(pickle.dumps(InvariantViolation("census dedup", "found twice")))
        self.assertEqual(error.invariant, "census dedup")
        self.assertEqual(str(error), "census dedup: found twice")


if __name__ == '__main__':
    unittest.main()
