"""
beta and census commands.
"""

from typing import Any, Dict, List, Tuple
from fractions import Fraction
import argparse
import logging

from config.config import resolve_threads
from src.cli.run_config import RunConfig
from src.percolation.contours.census import census, census_to_frame, lemma_reports
from src.percolation.contours.minimal_contours import alpha_sequence, beta
from src.percolation.core.model import Vertex, norm_x
from src.percolation.exceptions import InvariantViolation
from src.percolation.schemas.result_schemas import CensusRow, LemmaRow
from src.utils.budget.limiter import SearchBudget

logger = logging.getLogger("cli.contours")


def target_from(cfg: RunConfig) -> Vertex:
    """x from the positional pair or --x; both coordinates must be positive."""
    x1, x2 = cfg.get("x1"), cfg.get("x2")
    if x1 is None or x2 is None:
        if cfg.get("x") is None:
            raise argparse.ArgumentTypeError(f"{cfg.command} needs x1 x2 or --x")
        x1, x2 = cfg.get("x")
    if x1 <= 0 or x2 <= 0:
        raise argparse.ArgumentTypeError(f"x must have positive coordinates, got ({x1}, {x2})")
    return (x1, x2)


def run_beta(cfg: RunConfig) -> Tuple[List[Dict[str, Any]], int]:
    """beta_x for one target, or the alpha_n table along a slope with --rho."""
    budget = SearchBudget(cfg.get("budget"), "beta DP states", "raise --budget")
    if cfg.get("rho") is not None and cfg.get("x1") is None and cfg.get("x") is None:
        rho = cfg.get("rho")
        if Fraction(rho).denominator != 1:
            raise argparse.ArgumentTypeError(f"beta --rho needs an integer slope, got {rho}")
        (n_max,) = cfg.require("n_max")
        if n_max < 1:
            raise argparse.ArgumentTypeError(f"--n-max must be positive, got {n_max}")
        rho = int(rho)
        if n_max == 1:
            b = beta((1, rho), budget)
            return [{"n": 1, "x1": 1, "x2": rho, "alpha": b, "root": float(b)}], 0
        sequence = alpha_sequence(rho, n_max, budget)
        if not sequence.ok:
            raise InvariantViolation(
                "alpha supermultiplicativity",
                f"violations {sequence.supermultiplicative_violations} {sequence.root_bound_violations}")
        return [{"n": r.n, "x1": r.n, "x2": rho * r.n, "alpha": r.alpha, "root": r.root}
                for r in sequence.rows], 0

    x = target_from(cfg)
    value = beta(x, budget)
    logger.info(f"beta{x} = {value}")
    return [{"x1": x[0], "x2": x[1], "norm": norm_x(x), "beta": value}], 0


def run_census(cfg: RunConfig) -> Tuple[List[Dict[str, Any]], int]:
    """
    Contour counts up to n_max followed by the counting-lemma rows.

    Records carry a ``table`` column ("census" or "lemma"). The exit status
    is 1 when a lemma row fails.
    """
    x = target_from(cfg)
    n_max = cfg.get("n_max")
    if n_max is None:
        raise argparse.ArgumentTypeError("census needs n_max (positional or --n-max)")
    if n_max < norm_x(x):
        raise argparse.ArgumentTypeError(f"n_max={n_max} is below ||x||={norm_x(x)}")

    result = census(x, n_max, budget=cfg.get("budget"), workers=resolve_threads(cfg.threads))
    records = [{"table": "census", **CensusRow(**row).dict()}
               for row in census_to_frame(result).to_dict("records")]

    status = 0
    for report in lemma_reports(result):
        fields = dict(report.__dict__)
        x1, x2 = fields.pop("x")
        lemma = LemmaRow(x1=x1, x2=x2, **fields)
        if not lemma.holds:
            logger.error(f"Counting lemma fails for x={x}, m={lemma.m}: {lemma.lhs} > {lemma.rhs}")
            status = 1
        records.append({"table": "lemma", **lemma.dict()})
    if result.rejected:
        logger.warning(f"{result.rejected} closed walks failed the contour test")
    return records, status
