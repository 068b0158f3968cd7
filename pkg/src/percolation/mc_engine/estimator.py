"""
Monte Carlo estimation of tau^{f,N}(x, y).

Samples are drawn in fixed-size blocks. Block ``b`` of a run with seed
``s`` always uses the Philox stream keyed by SeedSequence([s, b]), so an
estimate depends only on (seed, n, region, params, x, y) and never on how
many threads processed the blocks.

Naive sampling cannot resolve the values found for p_h close to 1
(1e-12 and below); this engine is for cross-checks at moderate parameters.
"""

from typing import Dict, Iterable, List, Tuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
import logging
import math
import time

import numpy as np
import pandas as pd
from scipy.stats import norm

from config.config import settings, resolve_threads
from src.percolation.core.clusters import label_clusters, truncated_event_batch
from src.percolation.core.model import Configuration, LatticeRegion, Params, Vertex, reflect
from src.percolation.exceptions import DomainValidityError

logger = logging.getLogger("mc_engine")

Z95 = float(norm.ppf(0.975))


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Counter-based stream for one sample block."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))


def edge_probabilities(region: LatticeRegion, params: Params) -> np.ndarray:
    """Opening probability of every edge in edge-index order."""
    probs = np.empty(region.n_edges, dtype=np.float64)
    probs[:region.n_h_edges] = float(params.p_h)
    probs[region.n_h_edges:] = float(params.p_v)
    return probs


def sample_uniforms(region: LatticeRegion, rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.random((size, region.n_edges))


def sample_open_masks(region: LatticeRegion, params: Params, rng: np.random.Generator, size: int) -> np.ndarray:
    """Boolean array (size, n_edges), True for open edges."""
    return sample_uniforms(region, rng, size) < edge_probabilities(region, params)


def sample_config(region: LatticeRegion, params: Params, rng: np.random.Generator) -> Configuration:
    """
    One configuration of independent bond percolation.

    Args:
        region: Finite box
        params: Percolation parameters
        rng: numpy Generator

    Returns:
        Configuration (bit set means closed)
    """
    open_mask = sample_open_masks(region, params, rng, 1)[0]
    return Configuration.from_closed_array(region, ~open_mask)


def _interval(p_hat: float, n: int, successes: int) -> Tuple[Tuple[float, float], str]:
    if successes < settings.MC_SMALL_COUNT:
        denom = 1 + Z95 ** 2 / n
        center = (p_hat + Z95 ** 2 / (2 * n)) / denom
        half = Z95 * math.sqrt(p_hat * (1 - p_hat) / n + Z95 ** 2 / (4 * n ** 2)) / denom
        lo, hi, method = center - half, center + half, "wilson"
    else:
        se = math.sqrt(p_hat * (1 - p_hat) / n)
        lo, hi, method = p_hat - Z95 * se, p_hat + Z95 * se, "normal"
    return (max(0.0, lo), min(1.0, hi)), method


@dataclass(frozen=True)
class Estimate:
    """
    Monte Carlo estimate of a probability.

    Attributes:
        p_hat: Empirical frequency
        n_samples: Number of samples
        successes: Number of samples where the event occurred
        std_err: sqrt(p_hat (1 - p_hat) / n)
        ci95: 95% interval clipped to [0, 1]
        ci_method: "normal", or "wilson" when successes are fewer than MC_SMALL_COUNT
        seed: Master seed
        runtime_ms: Wall-clock time
    """
    p_hat: float
    n_samples: int
    successes: int
    std_err: float
    ci95: Tuple[float, float]
    ci_method: str
    seed: int
    runtime_ms: float = 0.0

    @classmethod
    def from_counts(cls, successes: int, n: int, seed: int, runtime_ms: float = 0.0) -> "Estimate":
        p_hat = successes / n
        ci, method = _interval(p_hat, n, successes)
        return cls(p_hat, n, successes, math.sqrt(p_hat * (1 - p_hat) / n), ci, method, seed, runtime_ms)

    def to_record(self) -> Dict[str, float]:
        return {"seed": self.seed, "n": self.n_samples, "p_hat": self.p_hat, "std_err": self.std_err,
                "ci_lo": self.ci95[0], "ci_hi": self.ci95[1], "ci_method": self.ci_method,
                "runtime_ms": self.runtime_ms}


def _block_sizes(n: int) -> List[int]:
    size = settings.MC_BLOCK_SIZE
    full, rest = divmod(n, size)
    return [size] * full + ([rest] if rest else [])


def _run_blocks(n: int, threads: int, work) -> List:
    sizes = _block_sizes(n)
    jobs = list(enumerate(sizes))
    workers = resolve_threads(threads)
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(lambda job: work(*job), jobs))
    return [work(b, s) for b, s in jobs]


def estimate_tau_fN(region: LatticeRegion, params: Params, x: Vertex, y: Vertex, n: int, seed: int,
                    threads: int = 0) -> Estimate:
    """
    Empirical frequency of the truncated connectivity event.

    Args:
        region: Finite box
        params: Percolation parameters
        x, y: Interior vertices
        n: Number of samples, at least 1
        seed: Master seed
        threads: Worker threads (0 means all cores)

    Returns:
        Estimate
    """
    region.require_interior(x, y)
    if n < 1:
        raise DomainValidityError(f"Sample count must be positive, got {n}")
    start = time.time()
    us, vs = region.endpoint_indices
    probs = edge_probabilities(region, params)
    x_index, y_index = region.vertex_index(x), region.vertex_index(y)
    boundary = region.boundary_indices

    def work(block: int, size: int) -> int:
        open_mask = sample_uniforms(region, block_rng(seed, block), size) < probs
        labels = label_clusters(open_mask, us, vs, region.n_vertices)
        return int(truncated_event_batch(labels, x_index, y_index, boundary).sum())

    successes = sum(_run_blocks(n, threads, work))
    elapsed = (time.time() - start) * 1000
    estimate = Estimate.from_counts(successes, n, seed, elapsed)
    logger.info(f"MC {region.describe()} x={x} y={y}: {successes}/{n} successes in {elapsed:.1f} ms")
    return estimate


@dataclass(frozen=True)
class PairedEstimate:
    """
    Paired estimate of tau(0, x) - tau(0, x').

    Attributes:
        d_hat: Mean of 1[0~x] - 1[0~x'] over the same configurations
        std_err: Standard error of d_hat from the paired differences
        ci95: Normal interval for the difference
        marginal_x, marginal_x_prime: The two marginal estimates
        coupled_d_hat: Difference with the x'-event evaluated on the reflected-uniform configuration
        coupled_std_err: Standard error of coupled_d_hat
        n_samples, seed: Run identity
    """
    x: Vertex
    x_prime: Vertex
    d_hat: float
    std_err: float
    ci95: Tuple[float, float]
    marginal_x: Estimate
    marginal_x_prime: Estimate
    coupled_d_hat: float
    coupled_std_err: float
    coupled_ci95: Tuple[float, float]
    n_samples: int
    seed: int
    runtime_ms: float = 0.0

    def to_record(self) -> Dict[str, object]:
        record = asdict(self)
        record["marginal_x"] = self.marginal_x.to_record()
        record["marginal_x_prime"] = self.marginal_x_prime.to_record()
        return record


def _paired_stats(total: int, squares: int, n: int) -> Tuple[float, float, Tuple[float, float]]:
    """Mean, standard error and normal CI of a {-1, 0, 1} sample from its sum and sum of squares."""
    mean = total / n
    var = (squares - n * mean ** 2) / (n - 1) if n > 1 else 0.0
    se = math.sqrt(max(var, 0.0) / n)
    return mean, se, (max(-1.0, mean - Z95 * se), min(1.0, mean + Z95 * se))


def estimate_pair_difference(region: LatticeRegion, params: Params, x: Vertex, n: int, seed: int,
                             threads: int = 0) -> PairedEstimate:
    """
    Paired Monte Carlo estimate of tau(0, x) - tau(0, x') on a symmetric box.

    Each sample drives omega with uniforms U. Both events are read off omega.
    The control reads the x'-event off omega~, driven by U reflected across
    the diagonal (so omega~ has the law of omega); under isotropy omega~ is
    the reflection of omega and the coupled difference vanishes.

    Args:
        region: Box symmetric under the diagonal reflection
        params: Percolation parameters
        x: Target vertex (x' is its reflection)
        n: Number of samples
        seed: Master seed
        threads: Worker threads (0 means all cores)

    Returns:
        PairedEstimate
    """
    if not region.is_diagonally_symmetric:
        raise DomainValidityError(f"{region.describe()} is not symmetric under the diagonal reflection")
    x_prime = reflect(x)
    origin = (0, 0)
    region.require_interior(origin, x, x_prime)
    if n < 1:
        raise DomainValidityError(f"Sample count must be positive, got {n}")

    start = time.time()
    us, vs = region.endpoint_indices
    probs = edge_probabilities(region, params)
    perm = region.reflection_permutation
    o_index, x_index, xp_index = (region.vertex_index(v) for v in (origin, x, x_prime))
    boundary = region.boundary_indices

    def work(block: int, size: int) -> Tuple[int, int, int, int, int]:
        uniforms = sample_uniforms(region, block_rng(seed, block), size)
        labels = label_clusters(uniforms < probs, us, vs, region.n_vertices)
        a = truncated_event_batch(labels, o_index, x_index, boundary)
        b = truncated_event_batch(labels, o_index, xp_index, boundary)
        # the edge at index perm[i] in omega~ reuses the uniform of edge i
        reflected = np.empty_like(uniforms)
        reflected[:, perm] = uniforms
        labels_r = label_clusters(reflected < probs, us, vs, region.n_vertices)
        c = truncated_event_batch(labels_r, o_index, xp_index, boundary)
        return int(a.sum()), int(b.sum()), int(c.sum()), int((a != b).sum()), int((a != c).sum())

    parts = _run_blocks(n, threads, work)
    n_a, n_b, n_c, diff_ab, diff_ac = (sum(p[i] for p in parts) for i in range(5))
    elapsed = (time.time() - start) * 1000

    d_hat, se, ci = _paired_stats(n_a - n_b, diff_ab, n)
    c_hat, c_se, c_ci = _paired_stats(n_a - n_c, diff_ac, n)
    logger.info(f"Paired MC x={x} on {region.describe()}: d_hat={d_hat:.3e}+-{se:.1e}, "
                f"coupled={c_hat:.3e}+-{c_se:.1e}")
    return PairedEstimate(
        tuple(x), x_prime, d_hat, se, ci,
        Estimate.from_counts(n_a, n, seed, elapsed), Estimate.from_counts(n_b, n, seed, elapsed),
        c_hat, c_se, c_ci, n, seed, elapsed,
    )


def sweep(region: LatticeRegion, param_grid: Iterable[Params], x: Vertex, y: Vertex, n: int, seed: int,
          threads: int = 0) -> pd.DataFrame:
    """
    estimate_tau_fN over a parameter grid.

    Returns:
        DataFrame with one row per parameter point
    """
    rows = []
    for params in param_grid:
        estimate = estimate_tau_fN(region, params, x, y, n, seed, threads)
        rows.append({"p_h": float(params.p_h), "p_v": float(params.p_v), **estimate.to_record()})
    return pd.DataFrame(rows)
