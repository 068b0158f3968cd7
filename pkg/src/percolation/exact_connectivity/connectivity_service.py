"""
Exact connectivity service.

Picks an exact engine for a region and runs the monotonicity probe over
nested boxes.
"""

from typing import List, Sequence
import logging

from config.config import settings
from src.percolation.core.model import LatticeRegion, Params, Vertex
from src.percolation.exact_connectivity.brute_force import tau_fN_bruteforce
from src.percolation.exact_connectivity.exact_result import ExactResult
from src.percolation.exact_connectivity.transfer_matrix import tau_fN_transfer
from src.percolation.exceptions import DomainValidityError, InvariantViolation

logger = logging.getLogger("connectivity_service")

ENGINES = ("auto", "brute", "brute_rational", "transfer")


def choose_engine(region: LatticeRegion, params: Params) -> str:
    """Transfer matrix whenever the frontier fits, brute force otherwise."""
    if min(region.width, region.height) <= settings.FRONTIER_CAP:
        return "transfer"
    if params.is_exact and region.n_edges <= settings.RATIONAL_EDGE_CAP:
        return "brute_rational"
    return "brute"


def tau_fN(region: LatticeRegion, params: Params, x: Vertex, y: Vertex, engine: str = "auto",
           threads: int = 0) -> ExactResult:
    """
    Exact tau^{f,N}(x, y) with the requested engine.

    Args:
        region: Finite box
        params: Percolation parameters
        x, y: Interior vertices
        engine: One of auto, brute, brute_rational, transfer
        threads: Worker threads for brute force

    Returns:
        ExactResult
    """
    if engine not in ENGINES:
        raise DomainValidityError(f"Unknown engine {engine!r}, expected one of {ENGINES}")
    if engine == "auto":
        engine = choose_engine(region, params)
        logger.debug(f"Engine auto -> {engine} for {region.describe()}")
    if engine == "transfer":
        return tau_fN_transfer(region, params, x, y)
    return tau_fN_bruteforce(region, params, x, y, exact=(engine == "brute_rational"), threads=threads)


def _nested(inner: LatticeRegion, outer: LatticeRegion) -> bool:
    return (outer.x_lo <= inner.x_lo and inner.x_hi <= outer.x_hi
            and outer.y_lo <= inner.y_lo and inner.y_hi <= outer.y_hi)


def tau_fN_monotonicity_probe(params: Params, x: Vertex, y: Vertex, regions: Sequence[LatticeRegion],
                              engine: str = "auto", rel_tol: float = 1e-12) -> List[ExactResult]:
    """
    tau^{f,N} over nested boxes, checked to be nondecreasing.

    Monotonicity in the box is a checked assumption here: a decrease beyond
    rel_tol raises InvariantViolation.

    Args:
        params: Percolation parameters
        x, y: Vertices interior to every region
        regions: Boxes, each contained in the next
        engine: Exact engine name
        rel_tol: Relative slack allowed for rounding

    Returns:
        One ExactResult per region
    """
    for inner, outer in zip(regions, regions[1:]):
        if not _nested(inner, outer):
            raise DomainValidityError(f"{inner.describe()} is not contained in {outer.describe()}")

    results = [tau_fN(region, params, x, y, engine) for region in regions]
    for previous, current in zip(results, results[1:]):
        if current.value < previous.value * (1 - rel_tol):
            raise InvariantViolation(
                "monotonicity in N",
                f"{current.region.describe()} gives {current.value:.6e} < {previous.value:.6e} "
                f"on {previous.region.describe()}")
    logger.info(f"Monotonicity probe over {len(regions)} regions: "
                f"{[f'{r.value:.6e}' for r in results]} (checked assumption)")
    return results
