"""
Numerical search for a p_h above which the bounds order tau(0, x) over tau(0, x').
"""

from typing import Callable, List, Optional, Tuple
from dataclasses import dataclass, field
import logging

import numpy as np

from src.percolation.bounds.bounds import cached_beta, eta_tilde, f_limit, f_limit_bracket, line_points
from src.percolation.exceptions import DomainValidityError

logger = logging.getLogger("threshold")

CERTIFICATE_NOTE = ("numerical: eta < eta_tilde checked for n <= n_max on a finite p_h grid, "
                    "plus the alpha = 1 limit bracket; not a proof for every n")


@dataclass(frozen=True)
class CertificateRow:
    n: int
    x1: int
    x2: int
    beta: int
    eta_tilde: float


@dataclass(frozen=True)
class ThresholdReport:
    """
    Outcome of the p_star search.

    Attributes:
        eta, rho, n_max: Search inputs
        found: Whether some grid p_h satisfied every condition
        p_star: Smallest such grid p_h (None when not found)
        rows: eta_tilde per n at p_star
        eta_tilde_inf: Smallest eta_tilde over the rows
        f_alpha_1, f_alpha_max: Limit bracket at p_star
        grid_size: Number of p_h grid points
        violations_above: Grid points above p_star where the condition fails
        note: What the certificate does and does not establish
    """
    eta: float
    rho: float
    n_max: int
    found: bool
    p_star: Optional[float]
    rows: Tuple[CertificateRow, ...] = ()
    eta_tilde_inf: Optional[float] = None
    f_alpha_1: Optional[float] = None
    f_alpha_max: Optional[float] = None
    grid_size: int = 0
    violations_above: Tuple[float, ...] = field(default=())
    note: str = CERTIFICATE_NOTE

    def to_record(self) -> dict:
        return {
            "eta": self.eta, "rho": self.rho, "n_max": self.n_max, "found": self.found,
            "p_star": self.p_star, "eta_tilde_inf": self.eta_tilde_inf,
            "f_alpha_1": self.f_alpha_1, "f_alpha_max": self.f_alpha_max,
            "grid_size": self.grid_size, "violations_above": list(self.violations_above),
            "rows": [{"n": r.n, "x1": r.x1, "x2": r.x2, "beta": str(r.beta), "eta_tilde": r.eta_tilde}
                     for r in self.rows],
            "note": self.note,
        }


def p_h_grid(grid_size: int = 400, lambda_min: float = 1e-12) -> List[float]:
    """Ascending p_h values with lambda_h spread geometrically over (lambda_min, 1/64)."""
    lambdas = np.geomspace(1 / 64 * (1 - 1e-9), lambda_min, grid_size)
    return [float(1 / (1 + lam)) for lam in lambdas]


def _first_satisfied(grid: List[float], predicate: Callable[[float], bool]) -> int:
    """Index of the first grid point where a monotone predicate holds (len(grid) when none does)."""
    lo, hi = 0, len(grid)
    while lo < hi:
        mid = (lo + hi) // 2
        if predicate(grid[mid]):
            hi = mid
        else:
            lo = mid + 1
    return lo


def p_star_search(eta: float, rho, n_max: int, grid_size: int = 400) -> ThresholdReport:
    """
    Smallest grid p_h with eta < eta_tilde(p_h, n q, n p) for all n <= n_max and eta < f(p_h, rho, 1).

    The grid is bisected; the condition is then rechecked on every grid
    point above the result and failures are reported, not hidden.

    Args:
        eta: Anisotropy ratio, 0 < eta < 1
        rho: Slope p / q > 1
        n_max: Number of line points checked
        grid_size: Number of p_h grid points

    Returns:
        ThresholdReport (found=False when even the largest grid p_h fails)
    """
    if not 0 < eta < 1:
        raise DomainValidityError(f"eta must lie in (0, 1), got {eta}")
    if n_max < 1:
        raise DomainValidityError(f"n_max must be positive, got {n_max}")
    points = line_points(rho, n_max)
    for x in points:
        cached_beta(x)

    def satisfied(p_h: float) -> bool:
        if not eta < f_limit(p_h, rho, 1.0):
            return False
        return all(eta < eta_tilde(p_h, x1, x2) for x1, x2 in points)

    grid = p_h_grid(grid_size)
    index = _first_satisfied(grid, satisfied)
    if index == len(grid):
        logger.warning(f"No p_h on the grid certifies eta={eta}, rho={rho}, n_max={n_max}")
        return ThresholdReport(float(eta), float(rho), n_max, False, None, grid_size=grid_size)

    p_star = grid[index]
    violations = tuple(p for p in grid[index + 1:] if not satisfied(p))
    if violations:
        logger.warning(f"Condition fails at {len(violations)} grid points above p*={p_star}")
    rows = tuple(CertificateRow(n, x1, x2, cached_beta((x1, x2)), eta_tilde(p_star, x1, x2))
                 for n, (x1, x2) in enumerate(points, start=1))
    f_low, f_high = f_limit_bracket(p_star, rho)
    logger.info(f"p_star(eta={eta}, rho={rho}, n_max={n_max}) = {p_star:.12g}")
    return ThresholdReport(float(eta), float(rho), n_max, True, p_star, rows,
                           min(r.eta_tilde for r in rows), f_low, f_high, grid_size, violations)
