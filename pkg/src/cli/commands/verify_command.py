"""
Cross-engine invariant suite behind ``verify``.

Each check returns (passed, detail). A failing check never stops the suite;
the command exits 1 when any check fails and names the failing checks in
the log.
"""

from typing import Any, Callable, Dict, List, Optional, Tuple
from fractions import Fraction
import logging
import math
import time

from config.config import resolve_threads
from src.cli.run_config import RunConfig
from src.percolation.bounds.bounds import (
    eta_tilde, inequality_certificate, lower_bound, minimal_event_lower, upper_bound,
    upper_series_from_census,
)
from src.percolation.contours.census import census, lemma_reports
from src.percolation.contours.minimal_contours import (
    alpha_sequence, beta, beta_lgv, beta_narayana,
)
from src.percolation.core.model import LatticeRegion, Params, make_params, norm_x, params_from_eta, reflect
from src.percolation.exact_connectivity.brute_force import (
    closed_count_histogram, partition_identity_check, success_histogram, tau_fN_bruteforce, weighted_sum,
)
from src.percolation.exact_connectivity.connectivity_service import tau_fN_monotonicity_probe
from src.percolation.exact_connectivity.transfer_matrix import tau_fN_transfer
from src.percolation.exceptions import InvariantViolation
from src.percolation.mc_engine.estimator import estimate_pair_difference, estimate_tau_fN
from src.percolation.schemas.result_schemas import VerifyRow

logger = logging.getLogger("cli.verify")

CheckResult = Tuple[bool, str]

PROBABILITY_GRID = (0.2, 0.5, 0.8, 0.99)
BETA_SPOT_VALUES = {(1, 1): 3, (1, 2): 6, (2, 4): 105}
FAULTS = ("beta",)


def _close(a: float, b: float, rel: float = 1e-12) -> bool:
    return abs(a - b) <= rel * max(abs(a), abs(b)) + 1e-300


def _grid_params() -> List[Params]:
    """(p_h, p_v) over the probability grid with p_h <= p_v."""
    return [make_params(p_h, p_v) for p_h in PROBABILITY_GRID for p_v in PROBABILITY_GRID if p_h <= p_v]


class VerifySuite:
    """
    Desk-scale invariant checks.

    Args:
        fast: Run the reduced subset
        fault: Name of an injected fault ("beta" adds 1 to every beta value)
        threads: Worker threads handed to the engines
    """

    def __init__(self, fast: bool = False, fault: Optional[str] = None, threads: int = 0):
        self.fast = fast
        self.fault = fault
        self.threads = threads
        self._censuses = {}

    def beta(self, x) -> int:
        value = beta(x)
        return value + 1 if self.fault == "beta" else value

    def census(self, x, n_max):
        key = (tuple(x), n_max)
        if key not in self._censuses:
            self._censuses[key] = census(x, n_max)
        return self._censuses[key]

    def checks(self) -> List[Tuple[str, Callable[[], CheckResult]]]:
        return [
            ("beta oracle", self.check_beta_oracle),
            ("counting lemma", self.check_counting_lemma),
            ("alpha supermultiplicativity", self.check_alpha),
            ("partition identity", self.check_partition_identity),
            ("engine agreement", self.check_engine_agreement),
            ("forced value", self.check_forced_value),
            ("sandwich", self.check_sandwich),
            ("ordering direction", self.check_ordering_direction),
            ("mc validity", self.check_mc_validity),
            ("isotropy null", self.check_isotropy_null),
            ("monotonicity in N", self.check_monotonicity),
            ("upper series domination", self.check_upper_series),
        ]

    def check_beta_oracle(self) -> CheckResult:
        top = 5 if self.fast else 7
        failures = []
        targets = [(x1, x2) for x1 in range(1, top) for x2 in range(1, top - x1 + 1)]
        for x in targets:
            # the census walks every dual circuit of length ||x||, independent of the DP
            enumerated = self.census(x, norm_x(x)).count(norm_x(x))
            values = (self.beta(x), enumerated, beta_narayana(x), beta_lgv(x))
            if len(set(values)) != 1:
                failures.append(f"{x}: dp/census/narayana/lgv = {values}")
        for x, expected in BETA_SPOT_VALUES.items():
            if self.beta(x) != expected:
                failures.append(f"beta{x} = {self.beta(x)}, expected {expected}")
        return not failures, "; ".join(failures) or f"{len(targets)} targets with x1 + x2 <= {top}"

    def check_counting_lemma(self) -> CheckResult:
        targets = [(1, 1), (1, 2)] if self.fast else [(1, 1), (1, 2), (2, 3)]
        failures = []
        for x in targets:
            norm = norm_x(x)
            m_top = min(4 if self.fast else 6, norm // 2)
            result = self.census(x, norm + m_top)
            for report in lemma_reports(result):
                if not report.holds:
                    failures.append(f"x={x} m={report.m}: {report.lhs} > {report.rhs}")
                if report.m % 2 and report.lhs:
                    failures.append(f"x={x} m={report.m}: odd length count {report.lhs}")
        return not failures, "; ".join(failures) or f"targets {targets}"

    def check_alpha(self) -> CheckResult:
        n_max = 3 if self.fast else 4
        failures = []
        for rho in (1, 2):
            sequence = alpha_sequence(rho, n_max)
            if not sequence.ok:
                failures.append(f"rho={rho}: {sequence.supermultiplicative_violations} "
                                f"{sequence.root_bound_violations}")
        return not failures, "; ".join(failures) or f"rho in (1, 2), n + m <= {n_max}"

    def check_partition_identity(self) -> CheckResult:
        float_regions = [LatticeRegion(0, 2, 0, 2), LatticeRegion(0, 2, 0, 3)]
        if not self.fast:
            float_regions.append(LatticeRegion(0, 3, 0, 3))
        rational_regions = [LatticeRegion(0, 2, 0, 2)] if self.fast else [LatticeRegion(0, 1, 0, 5)]
        failures = []
        for region in float_regions:
            hist = closed_count_histogram(region, None, resolve_threads(self.threads))
            for params in _grid_params():
                report = partition_identity_check(region, params, exact=False, hist=hist)
                if not report.holds:
                    failures.append(f"{region.describe()} {params.to_dict()}: rel={report.relative_error:.2e}")
        for region in rational_regions:
            hist = closed_count_histogram(region, None, resolve_threads(self.threads))
            for params in _grid_params():
                exact = make_params(Fraction(str(params.p_h)), Fraction(str(params.p_v)))
                report = partition_identity_check(region, exact, exact=True, hist=hist)
                if not report.holds:
                    failures.append(f"{region.describe()} rational {params.to_dict()}")
        return not failures, "; ".join(failures) or f"{len(float_regions)} float, {len(rational_regions)} rational regions"

    def check_engine_agreement(self) -> CheckResult:
        cases = [(LatticeRegion.centered(1), (0, 0), (0, 0)), (LatticeRegion(-1, 1, -1, 2), (0, 0), (0, 1))]
        if not self.fast:
            cases.append((LatticeRegion(-1, 2, -1, 2), (0, 0), (1, 1)))
        failures = []
        for region, x, y in cases:
            hist = success_histogram(region, x, y, self.threads)
            for params in _grid_params():
                brute = float(weighted_sum(hist, region, params, exact=False))
                transfer = tau_fN_transfer(region, params, x, y).value
                if not _close(brute, transfer):
                    failures.append(f"{region.describe()} {params.to_dict()}: brute={brute!r} transfer={transfer!r}")
        return not failures, "; ".join(failures) or f"{len(cases)} regions x {len(_grid_params())} parameter points"

    def check_forced_value(self) -> CheckResult:
        region = LatticeRegion.centered(1)
        origin = (0, 0)
        p_h, p_v = Fraction(3, 10), Fraction(1, 2)
        expected = (1 - p_h) ** 2 * (1 - p_v) ** 2
        params = make_params(float(p_h), float(p_v))
        failures = []
        rational = tau_fN_bruteforce(region, make_params(p_h, p_v), origin, origin, exact=True)
        if rational.exact_value != expected:
            failures.append(f"rational brute force {rational.exact_value} != {expected}")
        for name, value in (("brute force", tau_fN_bruteforce(region, params, origin, origin).value),
                            ("transfer", tau_fN_transfer(region, params, origin, origin).value)):
            if not _close(value, float(expected)):
                failures.append(f"{name} {value!r} != {float(expected)!r}")
        n = 100_000 if self.fast else 1_000_000
        estimate = estimate_tau_fN(region, params, origin, origin, n, seed=1, threads=self.threads)
        sigma = math.sqrt(float(expected) * (1 - float(expected)) / n)
        if abs(estimate.p_hat - float(expected)) > 4 * sigma:
            failures.append(f"mc {estimate.p_hat} is more than 4 sigma from {float(expected)}")
        return not failures, "; ".join(failures) or f"{float(expected)} on {region.describe()}"

    def check_sandwich(self) -> CheckResult:
        region = LatticeRegion(-1, 3, -1, 3)
        x = (1, 2)
        grid = [(0.99, 0.2), (0.9999, 0.2)] if self.fast else \
            [(p_h, eta) for p_h in (0.985, 0.99, 0.9999) for eta in (0.2, 0.5)]
        slack = 1 + 1e-12
        failures = []
        for p_h, eta in grid:
            params = params_from_eta(p_h, eta)
            low = lower_bound(params, x)
            event = minimal_event_lower(params, x, region)
            tau_x = tau_fN_transfer(region, params, (0, 0), x).value
            tau_xp = tau_fN_transfer(region, params, (0, 0), reflect(x)).value
            upper = upper_bound(params, x).total
            if not (low <= event * slack and event <= tau_x * slack and tau_xp <= upper * slack):
                failures.append(f"p_h={p_h} eta={eta}: lower={low:.3e} event={event:.3e} "
                                f"tau_x={tau_x:.3e} tau_x'={tau_xp:.3e} upper={upper:.3e}")
        return not failures, "; ".join(failures) or f"{len(grid)} parameter points on {region.describe()}"

    def check_ordering_direction(self) -> CheckResult:
        region = LatticeRegion(-1, 3, -1, 3)
        x = (1, 2)
        params = params_from_eta(0.9999, 0.2)
        failures = []
        tau_x = tau_fN_transfer(region, params, (0, 0), x).value
        tau_xp = tau_fN_transfer(region, params, (0, 0), reflect(x)).value
        if not tau_x > tau_xp:
            failures.append(f"tau(0,x)={tau_x:.6e} <= tau(0,x')={tau_xp:.6e}")
        if not inequality_certificate(params, x).holds:
            failures.append("inequality certificate does not hold")
        threshold = eta_tilde(0.9999, 1, 2)
        if abs(threshold - 0.9932) > 1e-3:
            failures.append(f"eta_tilde(0.9999, 1, 2) = {threshold:.6f}")
        approach = [eta_tilde(p_h, 1, 2) for p_h in (0.999, 0.9999, 0.99999)]
        if not (approach[0] < approach[1] < approach[2] < 1):
            failures.append(f"eta_tilde does not increase toward 1: {approach}")
        return not failures, "; ".join(failures) or f"tau ratio {tau_x / tau_xp:.3f}, eta_tilde {threshold:.5f}"

    def check_mc_validity(self) -> CheckResult:
        n = 200_000 if self.fast else 1_000_000
        cases = [
            (LatticeRegion.centered(1), make_params(0.3, 0.5), (0, 0), (0, 0)),
            (LatticeRegion(-1, 2, -1, 2), make_params(0.5, 0.5), (0, 0), (1, 1)),
            (LatticeRegion(-1, 2, -1, 2), make_params(0.4, 0.6), (0, 0), (1, 0)),
        ]
        failures = []
        for region, params, x, y in cases:
            exact = tau_fN_transfer(region, params, x, y).value
            estimate = estimate_tau_fN(region, params, x, y, n, seed=7, threads=self.threads)
            sigma = math.sqrt(exact * (1 - exact) / n)
            if abs(estimate.p_hat - exact) > 4 * sigma:
                failures.append(f"{region.describe()} x={x} y={y}: {estimate.p_hat} vs exact {exact}")
        region, params, x, y = cases[1]
        serial = estimate_tau_fN(region, params, x, y, 10_000, seed=11, threads=1)
        parallel = estimate_tau_fN(region, params, x, y, 10_000, seed=11, threads=4)
        if serial.successes != parallel.successes:
            failures.append(f"thread count changed the estimate: {serial.successes} vs {parallel.successes}")
        return not failures, "; ".join(failures) or f"{len(cases)} cases, n={n}"

    def check_isotropy_null(self) -> CheckResult:
        n = 100_000 if self.fast else 1_000_000
        region = LatticeRegion(-1, 3, -1, 3)
        paired = estimate_pair_difference(region, make_params(0.5, 0.5), (1, 2), n, seed=3, threads=self.threads)
        failures = []
        if abs(paired.d_hat) > 4 * paired.std_err:
            failures.append(f"d_hat={paired.d_hat:.3e} exceeds 4 sigma ({paired.std_err:.1e})")
        if paired.coupled_d_hat != 0:
            failures.append(f"coupled difference {paired.coupled_d_hat} is not 0")
        return not failures, "; ".join(failures) or f"d_hat={paired.d_hat:.2e} +- {paired.std_err:.1e}"

    def check_monotonicity(self) -> CheckResult:
        regions = [LatticeRegion.centered(1), LatticeRegion(-1, 2, -1, 2), LatticeRegion.centered(2)]
        if not self.fast:
            regions.append(LatticeRegion.centered(3))
        try:
            results = tau_fN_monotonicity_probe(make_params(0.5, 0.5), (0, 0), (0, 0), regions, engine="transfer")
        except InvariantViolation as error:
            return False, str(error)
        return True, " <= ".join(f"{r.value:.6e}" for r in results)

    def check_upper_series(self) -> CheckResult:
        x = (1, 1)
        result = self.census(x, 12)
        failures = []
        for p_h in (0.99, 0.9999):
            report = upper_series_from_census(params_from_eta(p_h, 0.5), x, result)
            if not report.dominated:
                failures.append(f"p_h={p_h}: partial {report.partial:.3e} > closed form {report.closed_form:.3e}")
        return not failures, "; ".join(failures) or f"census x={x} up to n=12"

    def run(self) -> List[VerifyRow]:
        rows = []
        for name, check in self.checks():
            start = time.time()
            try:
                passed, detail = check()
            except InvariantViolation as error:
                passed, detail = False, str(error)
            rows.append(VerifyRow(check=name, passed=passed, detail=detail))
            level = logging.INFO if passed else logging.ERROR
            logger.log(level, f"{'PASS' if passed else 'FAIL'} {name} ({time.time() - start:.1f}s): {detail}")
        return rows


def run_verify(cfg: RunConfig) -> Tuple[List[Dict[str, Any]], int]:
    """Run the suite; exit status 1 when any check fails."""
    suite = VerifySuite(fast=bool(cfg.get("fast")), fault=cfg.get("fault_inject"), threads=cfg.threads)
    if suite.fault:
        logger.warning(f"Fault injected: {suite.fault}")
    rows = suite.run()
    failed = [row.check for row in rows if not row.passed]
    if failed:
        logger.error(f"verify failed: {', '.join(failed)}")
    return [row.dict() for row in rows], 1 if failed else 0
