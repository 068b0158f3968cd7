"""
Closed-form bounds on tau^f(0, x) and tau^f(0, x').

All products are formed in log space and exponentiated at the end; linear
values underflow to 0 while the log values stay finite.
"""

from typing import Iterable, List, Optional, Sequence, Tuple
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import logging
import math

import numpy as np
import pandas as pd

from src.percolation.core.model import LatticeRegion, Params, Probability, Vertex, norm_x, params_from_eta
from src.percolation.contours.census import ContourCensus
from src.percolation.contours.minimal_contours import beta as beta_dp
from src.percolation.contours.minimal_contours import companion_paths, enumerate_minimal_contours
from src.percolation.exceptions import BoundValidityError, DomainValidityError

logger = logging.getLogger("bounds")

LAMBDA_H_LIMIT = Fraction(1, 64)


@lru_cache(maxsize=None)
def cached_beta(x: Vertex) -> int:
    return beta_dp(x)


def _log(value) -> float:
    """log that maps 0 to -inf and accepts big integers and Fractions."""
    if value == 0:
        return -math.inf
    if isinstance(value, Fraction):
        return math.log(value.numerator) - math.log(value.denominator)
    return math.log(value)


def _exp(log_value: float) -> float:
    return math.exp(log_value) if log_value > -math.inf else 0.0


def _check_x(x: Vertex) -> Tuple[int, int]:
    x1, x2 = x
    if x1 <= 0 or x2 <= 0:
        raise DomainValidityError(f"Target needs positive coordinates, got {x}")
    return x1, x2


def require_bound_validity(lambda_h: Probability) -> None:
    if not lambda_h < LAMBDA_H_LIMIT:
        raise BoundValidityError(
            f"Upper bound needs lambda_h < 4^-3 (p_h > 64/65), got lambda_h={float(lambda_h):.6g}")


def log_lower_bound(params: Params, x: Vertex) -> float:
    x1, x2 = _check_x(x)
    if params.p_h >= 1:
        raise DomainValidityError("lower_bound needs p_h < 1")
    return (_log(cached_beta((x1, x2)))
            + 2 * (x2 + 1) * _log(params.lambda_h)
            + 2 * (x1 + 1) * _log(params.lambda_v)
            + 2 * norm_x(x) * _log(params.p_h))


def lower_bound(params: Params, x: Vertex) -> float:
    """
    beta_x lambda_h^{2(x2+1)} lambda_v^{2(x1+1)} p_h^{2||x||}, a lower bound on tau^f(0, x).

    Args:
        params: Parameters with p_h < 1
        x: Target vertex with positive coordinates

    Returns:
        The bound (0 when p_v = 1 or on underflow)
    """
    return _exp(log_lower_bound(params, x))


@dataclass(frozen=True)
class UpperBound:
    """
    Upper bound on tau^f(0, x') evaluated at x.

    Attributes:
        main: Prefactor times beta_x (1 + 12 lambda_h)^||x||
        tail: Prefactor times (4^3 lambda_h)^(||x||/2 + 1) / (1 - 4^3 lambda_h)
        total: main + tail
        log_main, log_tail, log_total: Natural logs of the three
    """
    main: float
    tail: float
    total: float
    log_main: float
    log_tail: float
    log_total: float


def upper_bound(params: Params, x: Vertex) -> UpperBound:
    """
    lambda_h^{2(x1+1)} lambda_v^{2(x2+1)} [(4^3 lambda_h)^{||x||/2+1}/(1 - 4^3 lambda_h) + beta_x (1+12 lambda_h)^||x||].

    The formula is indexed by x and bounds tau^f(0, x').

    Args:
        params: Parameters with lambda_h < 4^-3
        x: Target vertex with positive coordinates

    Returns:
        UpperBound with the two terms kept apart
    """
    x1, x2 = _check_x(x)
    lam_h = params.lambda_h
    require_bound_validity(lam_h)
    lam_h, lam_v = float(lam_h), float(params.lambda_v)
    norm = norm_x(x)

    log_prefactor = 2 * (x1 + 1) * _log(lam_h) + 2 * (x2 + 1) * _log(lam_v)
    log_main = log_prefactor + _log(cached_beta((x1, x2))) + norm * math.log1p(12 * lam_h)
    log_tail = log_prefactor + (norm // 2 + 1) * _log(64 * lam_h) - math.log1p(-64 * lam_h)
    log_total = float(np.logaddexp(log_main, log_tail))
    return UpperBound(_exp(log_main), _exp(log_tail), _exp(log_total), log_main, log_tail, log_total)


def minimal_event_lower(params: Params, x: Vertex, region: Optional[LatticeRegion] = None) -> Probability:
    """
    Probability that some minimal contour around {0, x} is closed with its companion paths open.

    Sum over the minimal contours gamma of
    (1-p_h)^|gamma^h| (1-p_v)^|gamma^v| p_h^|t^h| p_v^|t^v|.

    Args:
        params: Percolation parameters (Fractions give an exact value)
        x: Target vertex
        region: When given, must hold every contour edge with the contour interiors off its boundary

    Returns:
        The probability
    """
    _check_x(x)
    terms = []
    for contour in enumerate_minimal_contours(x):
        paths = companion_paths(contour, x)
        if region is not None and not (region.contains_edges(contour.edges)
                                       and all(region.is_interior(v) for v in contour.interior)):
            raise DomainValidityError(f"{region.describe()} is too small for the minimal contours around {x}")
        terms.append((1 - params.p_h) ** contour.h_count * (1 - params.p_v) ** contour.v_count
                     * params.p_h ** paths.t_h * params.p_v ** paths.t_v)
    if params.is_exact:
        return sum(terms, Fraction(0))
    return math.fsum(terms)


def _log_eta_tilde(p_h: float, x1: int, x2: int, b: int) -> float:
    lam_h = (1 - p_h) / p_h
    s = x1 + x2 + 2
    log_num = _log(b) + 4 * s * math.log(p_h)
    log_tail = (s + 1) * _log(64 * lam_h) - math.log1p(-64 * lam_h)
    log_main = _log(b) + 2 * s * math.log1p(12 * lam_h)
    return (log_num - float(np.logaddexp(log_tail, log_main))) / (2 * (x2 - x1))


def eta_tilde(p_h: Probability, x1: int, x2: int) -> float:
    """
    Largest anisotropy ratio for which the closed-form bounds order tau(0, x) above tau(0, x').

    Args:
        p_h: Horizontal probability with lambda_h < 4^-3
        x1, x2: Target coordinates, 0 < x1 < x2

    Returns:
        eta_tilde(p_h, x1, x2)
    """
    if not 0 < x1 < x2:
        raise DomainValidityError(f"eta_tilde needs 0 < x1 < x2, got ({x1}, {x2})")
    if not 0 < p_h < 1:
        raise DomainValidityError(f"p_h must lie in (0, 1), got {p_h}")
    require_bound_validity((1 - Fraction(p_h)) / Fraction(p_h))
    return math.exp(_log_eta_tilde(float(p_h), x1, x2, cached_beta((x1, x2))))


def f_limit(p_h: Probability, rho, alpha_estimate: float) -> float:
    """
    Limit of eta_tilde along the line of slope rho for a given growth rate alpha.

    Args:
        p_h: Horizontal probability with lambda_h < 4^-3
        rho: Slope, rho > 1
        alpha_estimate: Growth rate of minimal contour counts, at least 1

    Returns:
        f(p_h, rho) at that alpha
    """
    rho = float(rho)
    if rho <= 1:
        raise DomainValidityError(f"f_limit needs rho > 1, got {rho}")
    if alpha_estimate < 1:
        raise DomainValidityError(f"alpha must be at least 1, got {alpha_estimate}")
    if not 0 < p_h < 1:
        raise DomainValidityError(f"p_h must lie in (0, 1), got {p_h}")
    p_h = float(p_h)
    lam_h = (1 - p_h) / p_h
    require_bound_validity(lam_h)
    log_alpha = math.log(alpha_estimate)
    log_num = log_alpha + 4 * (1 + rho) * math.log(p_h)
    log_den = float(np.logaddexp((1 + rho) * _log(64 * lam_h),
                                 log_alpha + 2 * (1 + rho) * math.log1p(12 * lam_h)))
    return math.exp((log_num - log_den) / (2 * (rho - 1)))


def f_limit_bracket(p_h: Probability, rho) -> Tuple[float, float]:
    """f at alpha = 1 (conservative) and at alpha = 4^(1 + rho)."""
    return f_limit(p_h, rho, 1.0), f_limit(p_h, rho, 4.0 ** (1 + float(rho)))


def line_points(rho, n_max: int) -> List[Vertex]:
    """Lattice points (n q, n p) on the line of slope rho = p / q, n = 1 .. n_max."""
    slope = Fraction(rho).limit_denominator(10 ** 6)
    if slope <= 1:
        raise DomainValidityError(f"rho must exceed 1, got {rho}")
    return [(n * slope.denominator, n * slope.numerator) for n in range(1, n_max + 1)]


def eta_tilde_sequence(p_h: Probability, rho, n_max: int) -> pd.DataFrame:
    """
    eta_tilde along the line of slope rho with the f bracket alongside.

    Returns:
        DataFrame with columns (n, x1, x2, beta, eta_tilde, f_alpha_1, f_alpha_max)
    """
    f_low, f_high = f_limit_bracket(p_h, rho)
    rows = []
    for n, (x1, x2) in enumerate(line_points(rho, n_max), start=1):
        rows.append({"n": n, "x1": x1, "x2": x2, "beta": cached_beta((x1, x2)),
                     "eta_tilde": eta_tilde(p_h, x1, x2), "f_alpha_1": f_low, "f_alpha_max": f_high})
    frame = pd.DataFrame(rows)
    frame["beta"] = frame["beta"].astype(object)
    return frame


@dataclass(frozen=True)
class UpperSeriesReport:
    """
    Census prefix of the contour series against the closed-form upper bound.

    Attributes:
        partial: Prefactor times sum over n <= n_max of lambda_h^(n - ||x||) |Gamma^n|
        closed_form: upper_bound(params, x).total
        dominated: partial <= closed_form
    """
    x: Vertex
    n_max: int
    partial: float
    closed_form: float
    dominated: bool


def upper_series_from_census(params: Params, x: Vertex, census_result: ContourCensus) -> UpperSeriesReport:
    """Compare the enumerated series prefix with the closed-form upper bound."""
    x1, x2 = _check_x(x)
    bound = upper_bound(params, x)
    lam_h, lam_v = float(params.lambda_h), float(params.lambda_v)
    norm = norm_x(x)
    log_prefactor = 2 * (x1 + 1) * _log(lam_h) + 2 * (x2 + 1) * _log(lam_v)
    series = math.fsum(float(count) * lam_h ** (n - norm) for n, count in census_result.counts.items())
    partial = _exp(log_prefactor + _log(series))
    return UpperSeriesReport(tuple(x), census_result.n_max, partial, bound.total, partial <= bound.total)


@dataclass(frozen=True)
class BoundReport:
    """
    Lower bound on tau^f(0, x) against the upper bound on tau^f(0, x').

    Attributes:
        lower_x, log_lower_x: The lower bound and its log
        upper_xprime_main, upper_xprime_tail, upper_xprime: Upper bound terms and total
        log_upper_xprime: Log of the total
        holds: lower_x > upper_xprime, decided in log space
        eta, eta_tilde: The anisotropy ratio and its threshold (eta_tilde is None when x1 >= x2)
    """
    params: Params
    x: Vertex
    lower_x: float
    log_lower_x: float
    upper_xprime_main: float
    upper_xprime_tail: float
    upper_xprime: float
    log_upper_xprime: float
    holds: bool
    eta: float
    eta_tilde: Optional[float] = None

    def to_record(self) -> dict:
        return {
            "p_h": float(self.params.p_h), "p_v": float(self.params.p_v), "x": list(self.x),
            "lower_x": self.lower_x, "log_lower_x": self.log_lower_x,
            "upper_xprime_main": self.upper_xprime_main, "upper_xprime_tail": self.upper_xprime_tail,
            "upper_xprime": self.upper_xprime, "log_upper_xprime": self.log_upper_xprime,
            "holds": self.holds, "eta": self.eta, "eta_tilde": self.eta_tilde,
        }


def inequality_certificate(params: Params, x: Vertex) -> BoundReport:
    """
    Compare the lower bound at x with the upper bound at x'.

    When ``holds`` is true the bounds certify tau^f(0, x) > tau^f(0, x') for
    these parameters.

    Args:
        params: Parameters with lambda_h < 4^-3
        x: Target vertex

    Returns:
        BoundReport
    """
    x1, x2 = _check_x(x)
    upper = upper_bound(params, x)
    log_low = log_lower_bound(params, x)
    holds = log_low > upper.log_total
    threshold = eta_tilde(params.p_h, x1, x2) if x1 < x2 else None
    report = BoundReport(params, (x1, x2), _exp(log_low), log_low, upper.main, upper.tail, upper.total,
                         upper.log_total, holds, float(params.eta), threshold)
    logger.debug(f"Certificate x={x} p_h={float(params.p_h)} eta={float(params.eta):.6g}: holds={holds}")
    return report


def sweep_bounds(p_h_grid: Iterable[float], eta_grid: Sequence[float], xs: Sequence[Vertex]) -> pd.DataFrame:
    """
    inequality_certificate over a (p_h, eta, x) grid.

    Returns:
        DataFrame with columns (p_h, p_v, eta, x1, x2, lower, upper_main, upper_tail, holds)
    """
    rows = []
    for p_h in p_h_grid:
        for eta in eta_grid:
            params = params_from_eta(p_h, eta)
            for x in xs:
                report = inequality_certificate(params, x)
                rows.append({"p_h": float(params.p_h), "p_v": float(params.p_v), "eta": float(eta),
                             "x1": x[0], "x2": x[1], "lower": report.lower_x,
                             "upper_main": report.upper_xprime_main, "upper_tail": report.upper_xprime_tail,
                             "holds": report.holds})
    return pd.DataFrame(rows, columns=["p_h", "p_v", "eta", "x1", "x2", "lower", "upper_main",
                                       "upper_tail", "holds"])
