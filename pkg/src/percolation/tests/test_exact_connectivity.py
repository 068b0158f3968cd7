"""
Unit tests for the exact truncated-connectivity engines.
"""
import unittest
import os
import sys
from fractions import Fraction
from unittest.mock import patch

import numpy as np

# Add the project root to the path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '../../../')))
from config.config import settings
from src.percolation.core.model import LatticeRegion, make_params, reflect
from src.percolation.exact_connectivity.brute_force import (
    closed_count_histogram, closed_masks, partition_identity_check, success_histogram, tau_fN_bruteforce,
    weighted_sum,
)
from src.percolation.exact_connectivity.connectivity_service import (
    choose_engine, tau_fN, tau_fN_monotonicity_probe,
)
from src.percolation.exact_connectivity.exact_result import Engine, safe_log
from src.percolation.exact_connectivity.transfer_matrix import tau_fN_transfer
from src.percolation.exceptions import (
    DomainValidityError, InteriorViolationError, ResourceBudgetExceeded,
)

FORCED = Fraction(7, 10) ** 2 * Fraction(1, 2) ** 2


class TestForcedValue(unittest.TestCase):
    """
    tau^{f,N}(0, 0) on [-1, 1]^2 is the probability that the four edges at 0 are closed.
    """
    def setUp(self):
        self.region = LatticeRegion.centered(1)
        self.params = make_params(0.3, 0.5)

    def test_brute_force(self):
        result = tau_fN_bruteforce(self.region, self.params, (0, 0), (0, 0), threads=1)
        self.assertAlmostEqual(result.value, 0.1225, places=14)
        self.assertEqual(result.engine, Engine.BRUTE_FORCE)
        self.assertIsNone(result.exact_value)

    def test_rational_brute_force(self):
        params = make_params(Fraction(3, 10), Fraction(1, 2))
        result = tau_fN_bruteforce(self.region, params, (0, 0), (0, 0), threads=1)
        self.assertEqual(result.engine, Engine.BRUTE_FORCE_RATIONAL)
        self.assertEqual(result.exact_value, FORCED)
        self.assertEqual(result.exact_value, Fraction(49, 400))

    def test_transfer_matrix(self):
        result = tau_fN_transfer(self.region, self.params, (0, 0), (0, 0))
        self.assertAlmostEqual(result.value, 0.1225, places=14)
        self.assertEqual(result.engine, Engine.TRANSFER_MATRIX)

    def test_transfer_matrix_exact(self):
        params = make_params(Fraction(3, 10), Fraction(1, 2))
        result = tau_fN_transfer(self.region, params, (0, 0), (0, 0))
        self.assertEqual(result.exact_value, FORCED)

    def test_record(self):
        record = tau_fN(self.region, self.params, (0, 0), (0, 0)).to_record()
        self.assertEqual(record["region"], "[-1,1]x[-1,1]")
        self.assertEqual(record["x"], [0, 0])
        self.assertAlmostEqual(record["log_value"], np.log(0.1225))


class TestEngineAgreement(unittest.TestCase):
    """
    Brute force and the transfer matrix agree to rounding.
    """
    CASES = [
        (LatticeRegion(-1, 1, -1, 2), (0, 0), (0, 1)),
        (LatticeRegion(-1, 2, -1, 1), (0, 0), (1, 0)),
        (LatticeRegion(-1, 2, -1, 2), (0, 0), (1, 1)),
    ]

    def test_parameter_grid(self):
        grid = [make_params(a, b) for a in (0.2, 0.5, 0.8) for b in (0.5, 0.8, 0.99) if a <= b]
        for region, x, y in self.CASES:
            hist = success_histogram(region, x, y, threads=2)
            for params in grid:
                brute = float(weighted_sum(hist, region, params, exact=False))
                transfer = tau_fN_transfer(region, params, x, y).value
                self.assertAlmostEqual(brute / transfer, 1.0, places=12, msg=f"{region.describe()} {params}")

    def test_rational_agreement(self):
        params = make_params(Fraction(2, 5), Fraction(3, 5))
        region = LatticeRegion.centered(1)
        self.assertLessEqual(region.n_edges, settings.RATIONAL_EDGE_CAP)
        brute = tau_fN_bruteforce(region, params, (0, 0), (0, 0), threads=1)
        transfer = tau_fN_transfer(region, params, (0, 0), (0, 0))
        self.assertEqual(brute.engine, Engine.BRUTE_FORCE_RATIONAL)
        self.assertEqual(brute.exact_value, Fraction(36, 625))
        self.assertEqual(brute.exact_value, transfer.exact_value)

    def test_rational_agreement_two_vertices(self):
        region, x, y = self.CASES[0]
        params = make_params(Fraction(2, 5), Fraction(3, 5))
        with patch.object(settings, "RATIONAL_EDGE_CAP", region.n_edges):
            brute = tau_fN_bruteforce(region, params, x, y, threads=1)
        transfer = tau_fN_transfer(region, params, x, y)
        self.assertIsInstance(brute.exact_value, Fraction)
        self.assertEqual(brute.exact_value, transfer.exact_value)

    def test_thread_count_does_not_change_histogram(self):
        region = LatticeRegion(-1, 2, -1, 1)
        one = closed_count_histogram(region, None, threads=1, chunk_bits=8)
        many = closed_count_histogram(region, None, threads=4, chunk_bits=8)
        np.testing.assert_array_equal(one, many)
        self.assertEqual(int(one.sum()), 2 ** region.n_edges)


class TestDiagonalSwap(unittest.TestCase):
    """
    Reflecting region and target across the diagonal is a symmetry only when p_h = p_v.
    """
    REGION = LatticeRegion(-1, 2, -1, 1)
    SWAPPED = LatticeRegion(-1, 1, -1, 2)

    def test_isotropic_values_match(self):
        params = make_params(0.4, 0.4)
        value = tau_fN_transfer(self.REGION, params, (0, 0), (1, 0)).value
        swapped = tau_fN_transfer(self.SWAPPED, params, (0, 0), reflect((1, 0))).value
        self.assertAlmostEqual(value / swapped, 1.0, places=12)

    def test_isotropic_values_match_exactly(self):
        params = make_params(Fraction(2, 5), Fraction(2, 5))
        value = tau_fN_transfer(self.REGION, params, (0, 0), (1, 0)).exact_value
        swapped = tau_fN_transfer(self.SWAPPED, params, (0, 0), (0, 1)).exact_value
        self.assertEqual(value, swapped)

    def test_anisotropic_values_differ(self):
        params = make_params(Fraction(2, 5), Fraction(7, 10))
        value = tau_fN_transfer(self.REGION, params, (0, 0), (1, 0)).exact_value
        swapped = tau_fN_transfer(self.SWAPPED, params, (0, 0), (0, 1)).exact_value
        self.assertNotEqual(value, swapped)


class TestBruteForce(unittest.TestCase):
    """
    Test cases for enumeration helpers, caps and preconditions.
    """
    def test_gray_code_masks(self):
        masks = closed_masks(0, 8, 3)
        self.assertEqual(len({tuple(m) for m in masks}), 8)
        # consecutive Gray codes differ in one edge
        self.assertTrue(((masks[1:] != masks[:-1]).sum(axis=1) == 1).all())

    def test_edge_cap(self):
        with self.assertRaises(ResourceBudgetExceeded):
            tau_fN_bruteforce(LatticeRegion(-1, 3, -1, 3), make_params(0.5, 0.5), (0, 0), (1, 1))

    def test_rational_cap(self):
        with self.assertRaises(ResourceBudgetExceeded):
            tau_fN_bruteforce(LatticeRegion(-1, 2, -1, 2), make_params(Fraction(1, 2), Fraction(1, 2)),
                              (0, 0), (1, 1))

    def test_interior_violation(self):
        with self.assertRaises(InteriorViolationError):
            tau_fN_bruteforce(LatticeRegion.centered(1), make_params(0.5, 0.5), (0, 0), (1, 1))
        with self.assertRaises(InteriorViolationError):
            tau_fN_transfer(LatticeRegion.centered(1), make_params(0.5, 0.5), (0, 0), (0, 1))

    def test_safe_log(self):
        self.assertEqual(safe_log(0), -np.inf)
        self.assertAlmostEqual(safe_log(Fraction(1, 10 ** 400)), -400 * np.log(10))


class TestPartitionIdentity(unittest.TestCase):
    """
    Sum over closed sets of lambda_h^|C^h| lambda_v^|C^v| equals p_h^-|E^h| p_v^-|E^v|.
    """
    def test_float(self):
        region = LatticeRegion(0, 2, 0, 3)
        hist = closed_count_histogram(region, None, threads=1)
        for p_h, p_v in ((0.2, 0.5), (0.5, 0.8), (0.8, 0.99), (0.99, 0.99)):
            report = partition_identity_check(region, make_params(p_h, p_v), exact=False, hist=hist)
            self.assertTrue(report.holds, report.relative_error)
            self.assertLess(report.relative_error, 1e-10)

    def test_rational(self):
        region = LatticeRegion(0, 1, 0, 5)
        self.assertEqual(region.n_edges, 16)
        report = partition_identity_check(region, make_params(Fraction(1, 5), Fraction(4, 5)), threads=1)
        self.assertTrue(report.exact)
        self.assertTrue(report.holds)
        self.assertEqual(report.lhs, report.rhs)

    def test_cap(self):
        with self.assertRaises(ResourceBudgetExceeded):
            partition_identity_check(LatticeRegion(0, 4, 0, 4), make_params(0.5, 0.5))


class TestConnectivityService(unittest.TestCase):
    """
    Test cases for engine selection and the monotonicity probe.
    """
    def test_choose_engine(self):
        self.assertEqual(choose_engine(LatticeRegion.centered(3), make_params(0.5, 0.5)), "transfer")
        self.assertEqual(choose_engine(LatticeRegion(0, 20, 0, 20), make_params(0.5, 0.5)), "brute")

    def test_unknown_engine(self):
        with self.assertRaises(DomainValidityError):
            tau_fN(LatticeRegion.centered(1), make_params(0.5, 0.5), (0, 0), (0, 0), engine="magic")

    def test_frontier_cap(self):
        with self.assertRaises(ResourceBudgetExceeded):
            tau_fN_transfer(LatticeRegion.centered(2), make_params(0.5, 0.5), (0, 0), (0, 0), frontier_cap=3)

    def test_monotone_in_box(self):
        regions = [LatticeRegion.centered(1), LatticeRegion(-1, 2, -1, 2), LatticeRegion.centered(2)]
        results = tau_fN_monotonicity_probe(make_params(0.5, 0.5), (0, 0), (0, 0), regions)
        values = [r.value for r in results]
        self.assertEqual(values, sorted(values))
        self.assertAlmostEqual(values[0], 0.0625)

    def test_probe_needs_nested_regions(self):
        regions = [LatticeRegion(-1, 2, -1, 2), LatticeRegion(-2, 1, -2, 1)]
        with self.assertRaises(DomainValidityError):
            tau_fN_monotonicity_probe(make_params(0.5, 0.5), (0, 0), (0, 0), regions)


if __name__ == '__main__':
    unittest.main()
