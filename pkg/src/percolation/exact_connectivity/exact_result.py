"""
Result type shared by the exact engines.
"""
from typing import Any, Dict, Optional
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
import math

from src.percolation.core.model import LatticeRegion, Params, Probability, Vertex


class Engine(str, Enum):
    BRUTE_FORCE = "brute_force"
    BRUTE_FORCE_RATIONAL = "brute_force_rational"
    TRANSFER_MATRIX = "transfer_matrix"


def safe_log(value: Probability) -> float:
    """Natural log that survives Fractions far below the float range."""
    if value <= 0:
        return -math.inf
    if isinstance(value, Fraction):
        return math.log(value.numerator) - math.log(value.denominator)
    return math.log(value)


@dataclass(frozen=True)
class ExactResult:
    """
    Exact finite-volume truncated connectivity tau^{f,N}(x, y).

    Attributes:
        value: Probability as a float
        log_value: Natural log of the probability (-inf when it is 0)
        engine: Engine that produced the value
        region: Finite box the event lives in
        params: Percolation parameters
        x, y: The two vertices
        runtime_ms: Wall-clock time of the computation
        exact_value: The value as a Fraction when computed in exact arithmetic
    """
    value: float
    log_value: float
    engine: Engine
    region: LatticeRegion
    params: Params
    x: Vertex
    y: Vertex
    runtime_ms: float = 0.0
    exact_value: Optional[Fraction] = None

    @classmethod
    def build(cls, value: Probability, engine: Engine, region: LatticeRegion, params: Params,
              x: Vertex, y: Vertex, runtime_ms: float) -> "ExactResult":
        exact = value if isinstance(value, Fraction) else None
        return cls(float(value), safe_log(value), engine, region, params, tuple(x), tuple(y), runtime_ms, exact)

    def to_record(self) -> Dict[str, Any]:
        return {
            "engine": self.engine.value,
            "region": self.region.describe(),
            "p_h": float(self.params.p_h),
            "p_v": float(self.params.p_v),
            "x": list(self.x),
            "y": list(self.y),
            "value": self.value,
            "log_value": self.log_value,
            "runtime_ms": self.runtime_ms,
            "exact_value": str(self.exact_value) if self.exact_value is not None else None,
        }
