"""
Run configuration for the command-line front end.

Option values are resolved in this order: command-line flag, then the flat
``key=value`` file given with ``--config``, then ``PERCOLAB_<KEY>``
environment variables, then the built-in default.
"""

from typing import Any, Dict, Optional, Tuple
from dataclasses import dataclass, field
from fractions import Fraction
import argparse
import os

from config.config import settings
from src.percolation.core.model import LatticeRegion, Params, Vertex, make_params, params_from_eta

ENV_PREFIX = "PERCOLAB_"


def load_config_file(path: Optional[str]) -> Dict[str, str]:
    """
    Read a flat key=value file; blank lines and lines starting with # are skipped.

    Keys use the flag spelling without dashes (``p-h`` or ``p_h``).
    """
    if not path:
        return {}
    values = {}
    with open(path) as handle:
        for number, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise argparse.ArgumentTypeError(f"{path}:{number}: expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def environment_overrides(keys) -> Dict[str, str]:
    """Values of PERCOLAB_<KEY> for the given option names."""
    found = {}
    for key in keys:
        value = os.environ.get(ENV_PREFIX + key.upper())
        if value is not None:
            found[key] = value
    return found


def vertex_type(text: str) -> Vertex:
    """Parse "a,b" into a vertex."""
    try:
        a, b = (int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a vertex as 'a,b', got {text!r}")
    return (a, b)


def region_type(text: str) -> LatticeRegion:
    """Parse "N" (the box [-N, N]^2) or "x_lo,x_hi,y_lo,y_hi"."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return LatticeRegion.centered(int(parts[0]))
        if len(parts) == 4:
            return LatticeRegion(*(int(p) for p in parts))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected a region as 'N' or 'x_lo,x_hi,y_lo,y_hi', got {text!r}")


def probability_type(text: str) -> Fraction:
    """Probabilities are read exactly; engines convert to floats when needed."""
    try:
        value = Fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a probability, got {text!r}")
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1], got {text}")
    return value


def build_params(p_h: Optional[Fraction], p_v: Optional[Fraction], eta: Optional[Fraction],
                 exact: bool = False) -> Params:
    """
    Parameters from (p_h, p_v) or (p_h, eta).

    Args:
        exact: Keep Fractions; otherwise the parameters are floats

    Raises:
        argparse.ArgumentTypeError: if the combination of flags is incomplete
    """
    if p_h is None or (p_v is None) == (eta is None):
        raise argparse.ArgumentTypeError("give --p-h together with exactly one of --p-v and --eta")
    if eta is not None:
        params = params_from_eta(Fraction(p_h), Fraction(eta)) if exact else params_from_eta(float(p_h), float(eta))
        return params
    if exact:
        return make_params(Fraction(p_h), Fraction(p_v))
    return make_params(float(p_h), float(p_v))


@dataclass(frozen=True)
class RunConfig:
    """
    Fully resolved options of one run; embedded in every output header.

    Attributes:
        command: Sub-command name
        options: Resolved option values (flags, config file, environment, defaults)
        out: Output path (None for stdout)
        fmt: Output format, json or csv
        threads: Worker thread cap (0 means all cores)
    """
    command: str
    options: Dict[str, Any] = field(default_factory=dict)
    out: Optional[str] = None
    fmt: str = settings.DEFAULT_FORMAT
    threads: int = settings.THREADS

    @classmethod
    def from_namespace(cls, args: argparse.Namespace) -> "RunConfig":
        skip = {"handler", "command", "config", "out", "format", "threads"}
        options = {k: v for k, v in vars(args).items() if k not in skip}
        return cls(args.command, options, args.out, args.format, args.threads)

    def header_config(self) -> Dict[str, Any]:
        def plain(value):
            if isinstance(value, LatticeRegion):
                return value.describe()
            if isinstance(value, Fraction):
                return str(value)
            if isinstance(value, tuple):
                return list(value)
            return value

        config = {k: plain(v) for k, v in self.options.items()}
        config.update(format=self.fmt, threads=self.threads)
        return config

    def get(self, key: str, default: Any = None) -> Any:
        return self.options.get(key, default)

    def require(self, *keys: str) -> Tuple[Any, ...]:
        missing = [k for k in keys if self.options.get(k) is None]
        if missing:
            flags = ", ".join("--" + k.replace("_", "-") for k in missing)
            raise argparse.ArgumentTypeError(f"{self.command} needs {flags}")
        return tuple(self.options[k] for k in keys)
