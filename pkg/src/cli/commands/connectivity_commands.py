"""
exact and mc commands.
"""

from typing import Any, Dict, List, Tuple
import argparse
import logging

from src.cli.run_config import RunConfig, build_params
from src.percolation.exact_connectivity.connectivity_service import tau_fN
from src.percolation.mc_engine.estimator import estimate_pair_difference, estimate_tau_fN
from src.percolation.schemas.result_schemas import EstimateRecord, ExactResultRecord, PairedEstimateRecord

logger = logging.getLogger("cli.connectivity")


def run_exact(cfg: RunConfig) -> Tuple[List[Dict[str, Any]], int]:
    """Exact tau^{f,N}(x, y); brute_rational keeps the parameters as fractions."""
    region, x, y = cfg.require("region", "x", "y")
    engine = cfg.get("engine")
    params = build_params(cfg.get("p_h"), cfg.get("p_v"), cfg.get("eta"), exact=(engine == "brute_rational"))
    result = tau_fN(region, params, x, y, engine, cfg.threads)
    return [ExactResultRecord(**result.to_record()).dict()], 0


def run_mc(cfg: RunConfig) -> Tuple[List[Dict[str, Any]], int]:
    """
    Monte Carlo estimate of tau^{f,N}(x, y), or with --pair the paired
    difference tau(0, x) - tau(0, x') on a diagonally symmetric box.
    """
    region, x, n, seed = cfg.require("region", "x", "n", "seed")
    if n < 1:
        raise argparse.ArgumentTypeError(f"--n must be positive, got {n}")
    params = build_params(cfg.get("p_h"), cfg.get("p_v"), cfg.get("eta"))

    if cfg.get("pair"):
        paired = estimate_pair_difference(region, params, x, n, seed, cfg.threads)
        return [PairedEstimateRecord(**paired.to_record()).dict()], 0

    (y,) = cfg.require("y")
    estimate = estimate_tau_fN(region, params, x, y, n, seed, cfg.threads)
    record = EstimateRecord(p_h=float(params.p_h), p_v=float(params.p_v), **estimate.to_record())
    return [record.dict()], 0
