"""
Command-line entry point: ``python -m src.cli.main <command> [options]``.

Exit codes: 0 success, 1 invariant failure, 2 usage, 3 resource budget,
4 domain validity.
"""

from typing import Any, Callable, Dict, List, Optional
from fractions import Fraction
import argparse
import logging
import sys

from config.config import get_config, settings
from src.cli.commands.bound_commands import run_bounds, run_threshold
from src.cli.commands.connectivity_commands import run_exact, run_mc
from src.cli.commands.contour_commands import run_beta, run_census
from src.cli.commands.verify_command import FAULTS, run_verify
from src.cli.run_config import (
    RunConfig, environment_overrides, load_config_file, probability_type, region_type, vertex_type,
)
from src.percolation.exact_connectivity.connectivity_service import ENGINES
from src.percolation.exceptions import (
    DomainValidityError, InvalidCircuitError, InvariantViolation, ResourceBudgetExceeded,
)
from src.percolation.schemas.result_schemas import RunHeader, write_output

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_DOMAIN = 4

# option name -> (converter for config-file / environment strings, built-in default)
OPTIONS: Dict[str, Any] = {
    "p_h": (probability_type, None),
    "p_v": (probability_type, None),
    "eta": (probability_type, None),
    "x": (vertex_type, None),
    "y": (vertex_type, None),
    "region": (region_type, None),
    "n": (int, None),
    "seed": (int, None),
    "n_max": (int, None),
    "rho": (Fraction, None),
    "engine": (str, "auto"),
    "budget": (int, settings.ENUMERATION_BUDGET),
    "grid_size": (int, 400),
    "out": (str, None),
    "format": (str, settings.DEFAULT_FORMAT),
    "threads": (int, settings.THREADS),
}

HANDLERS: Dict[str, Callable] = {
    "beta": run_beta,
    "census": run_census,
    "exact": run_exact,
    "mc": run_mc,
    "bounds": run_bounds,
    "threshold": run_threshold,
    "verify": run_verify,
}


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting, so main() owns the exit code."""

    def error(self, message):
        raise argparse.ArgumentTypeError(f"{self.prog}: {message}")


def _common_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("common")
    group.add_argument("--out", help="Output file (default: stdout)")
    group.add_argument("--format", choices=["json", "csv"], help="Output format")
    group.add_argument("--threads", type=int, help="Worker cap, 0 means all cores")
    group.add_argument("--config", help="Flat key=value file; flags win on conflict")
    group.add_argument("--budget", type=int, help="Search-node / DP-state budget")


def _params_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p-h", dest="p_h", type=probability_type, help="Horizontal opening probability")
    parser.add_argument("--p-v", dest="p_v", type=probability_type, help="Vertical opening probability")
    parser.add_argument("--eta", type=probability_type, help="Anisotropy ratio lambda_v / lambda_h")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="percolab", description="Anisotropic bond percolation laboratory")
    parser.add_argument("--version", action="version", version=f"{settings.APP_NAME} {settings.APP_VERSION}")
    commands = parser.add_subparsers(dest="command", parser_class=_Parser)
    commands.required = True

    beta = commands.add_parser("beta", help="Number of minimal contours, or the alpha_n table")
    beta.add_argument("x1", type=int, nargs="?")
    beta.add_argument("x2", type=int, nargs="?")
    beta.add_argument("--x", type=vertex_type, help="Target as 'x1,x2'")
    beta.add_argument("--rho", type=Fraction, help="Integer slope for the alpha_n table")
    beta.add_argument("--n-max", dest="n_max", type=int, help="Largest n of the alpha_n table")

    census = commands.add_parser("census", help="Contour census and counting-lemma table")
    census.add_argument("x1", type=int, nargs="?")
    census.add_argument("x2", type=int, nargs="?")
    census.add_argument("n_max", type=int, nargs="?")
    census.add_argument("--x", type=vertex_type, help="Target as 'x1,x2'")
    census.add_argument("--n-max", dest="n_max_flag", type=int, help="Largest contour length")

    exact = commands.add_parser("exact", help="Exact finite-volume truncated connectivity")
    _params_options(exact)
    exact.add_argument("--region", type=region_type, help="'N' or 'x_lo,x_hi,y_lo,y_hi'")
    exact.add_argument("--x", type=vertex_type)
    exact.add_argument("--y", type=vertex_type)
    exact.add_argument("--engine", choices=ENGINES)

    mc = commands.add_parser("mc", help="Monte Carlo estimate of the truncated connectivity")
    _params_options(mc)
    mc.add_argument("--region", type=region_type, help="'N' or 'x_lo,x_hi,y_lo,y_hi'")
    mc.add_argument("--x", type=vertex_type)
    mc.add_argument("--y", type=vertex_type)
    mc.add_argument("--n", type=int, help="Number of samples")
    mc.add_argument("--seed", type=int, help="Master seed (required)")
    mc.add_argument("--pair", action="store_true", help="Paired estimate of tau(0, x) - tau(0, x')")

    bounds = commands.add_parser("bounds", help="Lower bound at x against upper bound at x'")
    _params_options(bounds)
    bounds.add_argument("--x", type=vertex_type)

    threshold = commands.add_parser("threshold", help="Numerical p_star(eta, rho) search")
    threshold.add_argument("--eta", type=probability_type)
    threshold.add_argument("--rho", type=Fraction)
    threshold.add_argument("--n-max", dest="n_max", type=int)
    threshold.add_argument("--grid-size", dest="grid_size", type=int)

    verify = commands.add_parser("verify", help="Cross-engine invariant suite")
    verify.add_argument("--fast", action="store_true", help="Reduced subset")
    verify.add_argument("--fault-inject", dest="fault_inject", choices=FAULTS, help="Corrupt a quantity on purpose")

    for sub in (beta, census, exact, mc, bounds, threshold, verify):
        _common_options(sub)
    return parser


def resolve_options(args: argparse.Namespace) -> RunConfig:
    """
    Fill options left unset on the command line.

    Config-file values win over PERCOLAB_* environment values, which win
    over the built-in defaults.
    """
    if getattr(args, "n_max_flag", None) is not None:
        if args.n_max is not None and args.n_max != args.n_max_flag:
            raise argparse.ArgumentTypeError("n_max given twice with different values")
        args.n_max = args.n_max_flag
    if hasattr(args, "n_max_flag"):
        del args.n_max_flag

    present = [key for key in OPTIONS if hasattr(args, key)]
    file_values = load_config_file(args.config)
    env_values = environment_overrides(present)
    for key in present:
        if getattr(args, key) is not None:
            continue
        convert, default = OPTIONS[key]
        raw = file_values.get(key, env_values.get(key))
        setattr(args, key, convert(raw) if raw is not None else default)
    return RunConfig.from_namespace(args)


def _configure_logging() -> None:
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )


def emit(cfg: RunConfig, records: List[Any]) -> None:
    header = RunHeader(command=cfg.command, config=cfg.header_config())
    if cfg.out:
        with open(cfg.out, "w") as stream:
            write_output(stream, header, records, cfg.fmt)
        logger.info(f"Wrote {len(records)} records to {cfg.out}")
    else:
        write_output(sys.stdout, header, records, cfg.fmt)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run one command and map errors to exit codes.

    Args:
        argv: Arguments without the program name (default: sys.argv[1:])

    Returns:
        Process exit code
    """
    _configure_logging()
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_options(args)
        logger.debug(f"Engine configuration: {get_config()}")
        records, status = HANDLERS[cfg.command](cfg)
        emit(cfg, records)
        return status
    except InvariantViolation as e:
        logger.error(f"Invariant violated: {e}")
        return EXIT_INVARIANT
    except ResourceBudgetExceeded as e:
        logger.error(f"Resource budget: {e}")
        return EXIT_BUDGET
    except (DomainValidityError, InvalidCircuitError) as e:
        logger.error(f"Domain validity: {e}")
        return EXIT_DOMAIN
    except (argparse.ArgumentTypeError, ValueError, OSError) as e:
        logger.error(f"Usage: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
