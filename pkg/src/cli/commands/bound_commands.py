"""
bounds and threshold commands.
"""

from typing import Any, Dict, List, Tuple
import argparse
import logging

from src.cli.run_config import RunConfig, build_params
from src.percolation.bounds.bounds import inequality_certificate
from src.percolation.bounds.threshold import p_star_search
from src.percolation.schemas.result_schemas import BoundReportRecord, ThresholdRecord

logger = logging.getLogger("cli.bounds")


def run_bounds(cfg: RunConfig) -> Tuple[List[Dict[str, Any]], int]:
    """Lower bound at x against the upper bound at x'."""
    (x,) = cfg.require("x")
    if x[0] <= 0 or x[1] <= 0:
        raise argparse.ArgumentTypeError(f"--x must have positive coordinates, got {x}")
    params = build_params(cfg.get("p_h"), cfg.get("p_v"), cfg.get("eta"))
    report = inequality_certificate(params, x)
    logger.info(f"bounds x={x} p_h={float(params.p_h)} eta={float(params.eta):.6g}: holds={report.holds}")
    return [BoundReportRecord(**report.to_record()).dict()], 0


def run_threshold(cfg: RunConfig) -> Tuple[List[Dict[str, Any]], int]:
    """Grid search for p_star(eta, rho) along the first n_max points of the line."""
    eta, rho, n_max = cfg.require("eta", "rho", "n_max")
    if rho <= 1:
        raise argparse.ArgumentTypeError(f"--rho must exceed 1, got {rho}")
    if n_max < 1:
        raise argparse.ArgumentTypeError(f"--n-max must be positive, got {n_max}")
    report = p_star_search(float(eta), rho, n_max, cfg.get("grid_size"))
    return [ThresholdRecord(**report.to_record()).dict()], 0
