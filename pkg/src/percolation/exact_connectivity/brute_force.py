"""
Brute-force configuration sums over every edge configuration of a region.

Configurations are generated in Gray-code order in vectorised chunks. Only
the number of closed horizontal and closed vertical edges of each success
is kept, so the final weighted sum runs over a small histogram and can be
done in floats or exact fractions from the same enumeration.
"""

from typing import Callable, Iterator, List, Optional, Tuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
import logging
import math
import time

import numpy as np

from config.config import settings, resolve_threads
from src.percolation.core.clusters import label_clusters, truncated_event_batch
from src.percolation.core.model import LatticeRegion, Params, Probability, Vertex
from src.percolation.exact_connectivity.exact_result import Engine, ExactResult
from src.percolation.exceptions import DomainValidityError
from src.utils.budget.limiter import require_within

logger = logging.getLogger("brute_force")

ChunkFilter = Callable[[np.ndarray], np.ndarray]


def gray_code_chunks(n_edges: int, chunk_bits: int) -> Iterator[int]:
    """Start offsets of the chunks covering 0 .. 2^n_edges - 1."""
    total = 1 << n_edges
    size = min(total, 1 << chunk_bits)
    return iter(range(0, total, size))


def closed_masks(start: int, size: int, n_edges: int) -> np.ndarray:
    """
    Closed-edge masks for configurations start .. start + size - 1 in Gray-code order.

    Returns:
        Boolean array (size, n_edges), True where the edge is closed
    """
    i = np.arange(start, start + size, dtype=np.int64)
    gray = i ^ (i >> 1)
    shifts = np.arange(n_edges, dtype=np.int64)
    return ((gray[:, None] >> shifts) & 1).astype(bool)


def closed_count_histogram(region: LatticeRegion, keep: Optional[ChunkFilter] = None,
                           threads: int = 1, chunk_bits: Optional[int] = None) -> np.ndarray:
    """
    Histogram of (|C^h|, |C^v|) over all configurations, optionally filtered.

    Args:
        region: Region whose configurations are enumerated
        keep: Maps a chunk of closed masks to a boolean array selecting configurations
        threads: Worker threads; chunk histograms are merged in chunk order
        chunk_bits: Chunk size exponent (defaults to settings.BRUTE_FORCE_CHUNK_BITS)

    Returns:
        Integer array of shape (n_h_edges + 1, n_v_edges + 1)
    """
    n_edges, n_h = region.n_edges, region.n_h_edges
    bits = chunk_bits if chunk_bits is not None else settings.BRUTE_FORCE_CHUNK_BITS
    size = min(1 << n_edges, 1 << bits)
    shape = (n_h + 1, region.n_v_edges + 1)

    def one_chunk(start: int) -> np.ndarray:
        closed = closed_masks(start, size, n_edges)
        if keep is not None:
            closed = closed[keep(closed)]
        hist = np.zeros(shape, dtype=np.int64)
        if closed.shape[0]:
            np.add.at(hist, (closed[:, :n_h].sum(axis=1), closed[:, n_h:].sum(axis=1)), 1)
        return hist

    starts = list(gray_code_chunks(n_edges, bits))
    logger.debug(f"Enumerating {1 << n_edges} configurations in {len(starts)} chunks")
    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            parts = list(executor.map(one_chunk, starts))
    else:
        parts = [one_chunk(s) for s in starts]

    total = np.zeros(shape, dtype=np.int64)
    for part in parts:
        total += part
    return total


def _cells(hist: np.ndarray) -> List[Tuple[int, int]]:
    return [(int(a), int(b)) for a, b in zip(*np.nonzero(hist))]


def weighted_sum(hist: np.ndarray, region: LatticeRegion, params: Params, exact: bool) -> Probability:
    """
    Sum of configuration probabilities given a (|C^h|, |C^v|) histogram.

    Args:
        hist: Histogram from closed_count_histogram
        region: Region of the configurations
        params: Percolation parameters
        exact: Use Fraction arithmetic (params must be Fractions)

    Returns:
        Probability as float or Fraction
    """
    n_h, n_v = region.n_h_edges, region.n_v_edges
    p_h, p_v = params.p_h, params.p_v
    if exact:
        p_h, p_v = Fraction(p_h), Fraction(p_v)
        return sum((int(hist[c_h, c_v]) * (1 - p_h) ** c_h * p_h ** (n_h - c_h)
                    * (1 - p_v) ** c_v * p_v ** (n_v - c_v)
                    for c_h, c_v in _cells(hist)), Fraction(0))
    p_h, p_v = float(p_h), float(p_v)
    return math.fsum(float(hist[c_h, c_v]) * (1 - p_h) ** c_h * p_h ** (n_h - c_h)
                     * (1 - p_v) ** c_v * p_v ** (n_v - c_v)
                     for c_h, c_v in _cells(hist))


def success_histogram(region: LatticeRegion, x: Vertex, y: Vertex, threads: int = 0) -> np.ndarray:
    """
    (|C^h|, |C^v|) histogram of the configurations where the truncated event occurs.

    The histogram does not depend on the parameters, so one enumeration
    serves a whole parameter grid through weighted_sum.
    """
    region.require_interior(x, y)
    us, vs = region.endpoint_indices
    x_index, y_index = region.vertex_index(x), region.vertex_index(y)
    boundary = region.boundary_indices

    def success(closed: np.ndarray) -> np.ndarray:
        labels = label_clusters(~closed, us, vs, region.n_vertices)
        return truncated_event_batch(labels, x_index, y_index, boundary)

    return closed_count_histogram(region, success, resolve_threads(threads))


def tau_fN_bruteforce(region: LatticeRegion, params: Params, x: Vertex, y: Vertex,
                      exact: Optional[bool] = None, threads: int = 0,
                      edge_cap: Optional[int] = None) -> ExactResult:
    """
    tau^{f,N}(x, y) by summing over all 2^|E| configurations.

    Args:
        region: Finite box, at most BRUTE_FORCE_EDGE_CAP edges
        params: Percolation parameters
        x, y: Vertices of the region interior
        exact: Fraction arithmetic (default: when params are Fractions); needs at most RATIONAL_EDGE_CAP edges
        threads: Worker threads (0 means all cores)
        edge_cap: Override of the edge cap

    Returns:
        ExactResult from the brute_force or brute_force_rational engine
    """
    region.require_interior(x, y)
    exact = params.is_exact if exact is None else exact
    cap = edge_cap if edge_cap is not None else settings.BRUTE_FORCE_EDGE_CAP
    require_within("brute-force edges", region.n_edges, cap,
                   "use --engine transfer or raise PERCOLAB_BRUTE_FORCE_EDGE_CAP")
    if exact:
        require_within("rational brute-force edges", region.n_edges, settings.RATIONAL_EDGE_CAP,
                       "drop exact arithmetic or raise PERCOLAB_RATIONAL_EDGE_CAP")
        if not params.is_exact:
            raise DomainValidityError("Exact arithmetic needs Fraction parameters")

    start = time.time()
    hist = success_histogram(region, x, y, threads)
    value = weighted_sum(hist, region, params, exact)
    elapsed = (time.time() - start) * 1000
    engine = Engine.BRUTE_FORCE_RATIONAL if exact else Engine.BRUTE_FORCE
    logger.info(f"Brute force on {region.describe()} ({region.n_edges} edges, {int(hist.sum())} successes) "
                f"took {elapsed:.1f} ms")
    return ExactResult.build(value, engine, region, params, x, y, elapsed)


@dataclass(frozen=True)
class PartitionIdentityReport:
    """
    Check of sum_C lambda_h^|C^h| lambda_v^|C^v| = p_h^-|E^h| p_v^-|E^v|.

    Attributes:
        lhs: Enumerated sum over all closed sets
        rhs: Closed form
        relative_error: |lhs - rhs| / rhs
        holds: Within tolerance (exact equality in rational mode)
        exact: Whether Fraction arithmetic was used
    """
    region: LatticeRegion
    params: Params
    lhs: Probability
    rhs: Probability
    relative_error: float
    holds: bool
    exact: bool


def partition_identity_check(region: LatticeRegion, params: Params, exact: Optional[bool] = None,
                             tolerance: float = 1e-10, threads: int = 0,
                             hist: Optional[np.ndarray] = None) -> PartitionIdentityReport:
    """
    Verify the partition-function identity by enumerating every closed edge set.

    Args:
        region: Region with at most PARTITION_IDENTITY_EDGE_CAP edges
        params: Parameters with p_h > 0
        exact: Fraction arithmetic (default: when params are Fractions and edges fit RATIONAL_EDGE_CAP)
        tolerance: Relative tolerance in float mode
        threads: Worker threads (0 means all cores)
        hist: Unfiltered closed-count histogram of the region, reused across parameter points

    Returns:
        PartitionIdentityReport
    """
    require_within("partition-identity edges", region.n_edges, settings.PARTITION_IDENTITY_EDGE_CAP,
                   "raise PERCOLAB_PARTITION_IDENTITY_EDGE_CAP")
    if exact is None:
        exact = params.is_exact and region.n_edges <= settings.RATIONAL_EDGE_CAP
    elif exact:
        require_within("rational brute-force edges", region.n_edges, settings.RATIONAL_EDGE_CAP)

    if hist is None:
        hist = closed_count_histogram(region, None, resolve_threads(threads))
    n_h, n_v = region.n_h_edges, region.n_v_edges
    if exact:
        lam_h, lam_v = Fraction(params.lambda_h), Fraction(params.lambda_v)
        lhs = sum((int(hist[a, b]) * lam_h ** a * lam_v ** b for a, b in _cells(hist)), Fraction(0))
        rhs = 1 / (Fraction(params.p_h) ** n_h * Fraction(params.p_v) ** n_v)
        rel = float(abs(lhs - rhs) / rhs)
        holds = lhs == rhs
    else:
        lam_h, lam_v = float(params.lambda_h), float(params.lambda_v)
        lhs = math.fsum(float(hist[a, b]) * lam_h ** a * lam_v ** b for a, b in _cells(hist))
        rhs = float(params.p_h) ** -n_h * float(params.p_v) ** -n_v
        rel = abs(lhs - rhs) / rhs
        holds = rel <= tolerance
    logger.info(f"Partition identity on {region.describe()}: lhs={float(lhs):.12g} rhs={float(rhs):.12g} "
                f"rel={rel:.2e}")
    return PartitionIdentityReport(region, params, lhs, rhs, rel, holds, exact)
