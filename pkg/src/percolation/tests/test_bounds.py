"""
Unit tests for the closed-form bounds and their comparison with exact values.
"""
import unittest
import os
import sys
import math
from fractions import Fraction

# Add the project root to the path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '../../../')))
from src.percolation.bounds.bounds import (
    eta_tilde, eta_tilde_sequence, f_limit, f_limit_bracket, inequality_certificate, line_points,
    log_lower_bound, lower_bound, minimal_event_lower, sweep_bounds, upper_bound, upper_series_from_census,
)
from src.percolation.contours.census import census
from src.percolation.core.model import LatticeRegion, make_params, params_from_eta
from src.percolation.exact_connectivity.transfer_matrix import tau_fN_transfer
from src.percolation.exceptions import BoundValidityError, DomainValidityError

SANDWICH_REGION = LatticeRegion(-1, 3, -1, 3)


class TestLowerBound(unittest.TestCase):
    """
    Test cases for the lower bound on tau^f(0, x).
    """
    def test_closed_form(self):
        params = make_params(0.99, 0.99)
        lam = 0.01 / 0.99
        expected = 3 * lam ** 4 * lam ** 4 * 0.99 ** 16
        self.assertAlmostEqual(lower_bound(params, (1, 1)) / expected, 1.0, places=12)

    def test_log_space_survives_underflow(self):
        params = params_from_eta(0.999999, 0.01)
        log_value = log_lower_bound(params, (10, 30))
        self.assertTrue(math.isfinite(log_value))
        self.assertLess(log_value, -700)
        self.assertEqual(lower_bound(params, (10, 30)), 0.0)

    def test_invalid_target(self):
        with self.assertRaises(DomainValidityError):
            lower_bound(make_params(0.99, 0.99), (0, 1))


class TestUpperBound(unittest.TestCase):
    """
    Test cases for the upper bound on tau^f(0, x').
    """
    def test_terms(self):
        params = params_from_eta(0.9999, 0.2)
        bound = upper_bound(params, (1, 2))
        lam_h, lam_v = float(params.lambda_h), float(params.lambda_v)
        prefactor = lam_h ** 4 * lam_v ** 6
        self.assertAlmostEqual(bound.main / (prefactor * 6 * (1 + 12 * lam_h) ** 10), 1.0, places=10)
        self.assertAlmostEqual(bound.tail / (prefactor * (64 * lam_h) ** 6 / (1 - 64 * lam_h)), 1.0, places=10)
        self.assertAlmostEqual(bound.total / (bound.main + bound.tail), 1.0, places=12)

    def test_tail_below_main_term(self):
        for p_h in (0.9991, 0.9999, 0.99999):
            for x in ((1, 2), (2, 4), (3, 5)):
                bound = upper_bound(params_from_eta(p_h, 0.5), x)
                self.assertGreater(bound.tail, 0.0)
                self.assertLess(bound.tail, bound.main, (p_h, x))

    def test_validity_condition(self):
        with self.assertRaises(BoundValidityError) as context:
            upper_bound(params_from_eta(0.9, 0.5), (1, 2))
        self.assertIn("lambda_h < 4^-3", str(context.exception))
        with self.assertRaises(BoundValidityError):
            upper_bound(make_params(Fraction(64, 65), Fraction(64, 65)), (1, 2))

    def test_validity_error_is_domain_error(self):
        self.assertTrue(issubclass(BoundValidityError, DomainValidityError))


class TestSandwich(unittest.TestCase):
    """
    lower <= minimal-contour event <= exact tau(0, x) and exact tau(0, x') <= upper.
    """
    def test_sandwich(self):
        x = (1, 2)
        for p_h, eta in ((0.985, 0.5), (0.9999, 0.2)):
            params = params_from_eta(p_h, eta)
            low = lower_bound(params, x)
            event = minimal_event_lower(params, x, SANDWICH_REGION)
            tau_x = tau_fN_transfer(SANDWICH_REGION, params, (0, 0), x).value
            tau_xp = tau_fN_transfer(SANDWICH_REGION, params, (0, 0), (2, 1)).value
            upper = upper_bound(params, x).total
            slack = 1 + 1e-12
            self.assertLessEqual(low, event * slack)
            self.assertLessEqual(event, tau_x * slack)
            self.assertLessEqual(tau_xp, upper * slack)

    def test_minimal_event_exact(self):
        params = params_from_eta(Fraction(99, 100), Fraction(1, 2))
        exact = minimal_event_lower(params, (1, 1))
        self.assertIsInstance(exact, Fraction)
        self.assertAlmostEqual(float(exact), minimal_event_lower(params.as_float(), (1, 1)), places=15)

    def test_region_too_small(self):
        with self.assertRaises(DomainValidityError):
            minimal_event_lower(params_from_eta(0.99, 0.5), (1, 2), LatticeRegion(-1, 2, -1, 2))


class TestCertificate(unittest.TestCase):
    """
    Test cases for the inequality certificate and eta_tilde.
    """
    def test_ordering_direction(self):
        params = params_from_eta(0.9999, 0.2)
        report = inequality_certificate(params, (1, 2))
        self.assertTrue(report.holds)
        self.assertGreater(report.log_lower_x, report.log_upper_xprime)
        self.assertAlmostEqual(report.eta, 0.2, places=9)
        self.assertLess(report.eta, report.eta_tilde)
        tau_x = tau_fN_transfer(SANDWICH_REGION, params, (0, 0), (1, 2)).value
        tau_xp = tau_fN_transfer(SANDWICH_REGION, params, (0, 0), (2, 1)).value
        self.assertGreater(tau_x, tau_xp)

    def test_eta_tilde_value(self):
        self.assertAlmostEqual(eta_tilde(0.9999, 1, 2), 0.9932, delta=1e-3)

    def test_eta_tilde_tends_to_one(self):
        values = [eta_tilde(p_h, 1, 2) for p_h in (0.999, 0.9999, 0.99999)]
        self.assertLess(values[0], values[1])
        self.assertLess(values[1], values[2])
        self.assertLess(values[2], 1.0)

    def test_certificate_fails_near_isotropy(self):
        report = inequality_certificate(params_from_eta(0.9999, 0.999), (1, 2))
        self.assertFalse(report.holds)

    def test_eta_tilde_needs_ordered_target(self):
        with self.assertRaises(DomainValidityError):
            eta_tilde(0.9999, 2, 2)

    def test_sweep(self):
        frame = sweep_bounds([0.99, 0.9999], [0.2, 0.5], [(1, 2), (2, 3)])
        self.assertEqual(len(frame), 8)
        self.assertEqual(list(frame.columns),
                         ["p_h", "p_v", "eta", "x1", "x2", "lower", "upper_main", "upper_tail", "holds"])


class TestLimits(unittest.TestCase):
    """
    Test cases for f(p_h, rho) and the eta_tilde sequence along a line.
    """
    def test_line_points(self):
        self.assertEqual(line_points(2, 3), [(1, 2), (2, 4), (3, 6)])
        self.assertEqual(line_points(Fraction(3, 2), 2), [(2, 3), (4, 6)])
        with self.assertRaises(DomainValidityError):
            line_points(1, 3)

    def test_bracket_is_ordered(self):
        low, high = f_limit_bracket(0.9999, 2)
        self.assertLess(low, high)
        self.assertLess(high, 1.0)
        self.assertAlmostEqual(low, f_limit(0.9999, 2, 1.0))

    def test_sequence(self):
        frame = eta_tilde_sequence(0.9999, 2, 3)
        self.assertEqual(frame["beta"].tolist(), [6, 105, 2520])
        self.assertTrue((frame["eta_tilde"] < 1).all())


class TestUpperSeries(unittest.TestCase):
    """
    The enumerated series prefix stays below the closed-form upper bound.
    """
    def test_domination(self):
        result = census((1, 1), 12)
        for p_h in (0.99, 0.9999):
            report = upper_series_from_census(params_from_eta(p_h, 0.5), (1, 1), result)
            self.assertTrue(report.dominated)
            self.assertGreater(report.partial, 0.0)


if __name__ == '__main__':
    unittest.main()
