"""
Result Schemas Module

This module defines the Pydantic schemas for every machine-readable record the
laboratory writes, and the JSON / CSV writers that carry a run header.
"""

from pydantic import BaseModel, Field
from typing import Dict, List, Any, Optional, Sequence, TextIO
import json

import pandas as pd

from config.config import settings


class RunHeader(BaseModel):
    """Header written at the top of every output."""
    tool: str = settings.APP_NAME
    version: str = settings.APP_VERSION
    command: str
    config: Dict[str, Any] = Field(default_factory=dict)


class ExactResultRecord(BaseModel):
    engine: str
    region: str
    p_h: float
    p_v: float
    x: List[int]
    y: List[int]
    value: float
    log_value: float
    runtime_ms: float
    exact_value: Optional[str] = None


class EstimateRecord(BaseModel):
    seed: int
    n: int
    p_hat: float
    std_err: float
    ci_lo: float
    ci_hi: float
    ci_method: str
    runtime_ms: float
    p_h: Optional[float] = None
    p_v: Optional[float] = None


class PairedEstimateRecord(BaseModel):
    x: List[int]
    x_prime: List[int]
    d_hat: float
    std_err: float
    ci95: List[float]
    marginal_x: EstimateRecord
    marginal_x_prime: EstimateRecord
    coupled_d_hat: float
    coupled_std_err: float
    coupled_ci95: List[float]
    n_samples: int
    seed: int
    runtime_ms: float


class BoundReportRecord(BaseModel):
    p_h: float
    p_v: float
    x: List[int]
    lower_x: float
    log_lower_x: float
    upper_xprime_main: float
    upper_xprime_tail: float
    upper_xprime: float
    log_upper_xprime: float
    holds: bool
    eta: float
    eta_tilde: Optional[float] = None


class ThresholdRecord(BaseModel):
    eta: float
    rho: float
    n_max: int
    found: bool
    p_star: Optional[float] = None
    eta_tilde_inf: Optional[float] = None
    f_alpha_1: Optional[float] = None
    f_alpha_max: Optional[float] = None
    grid_size: int
    violations_above: List[float] = Field(default_factory=list)
    rows: List[Dict[str, Any]] = Field(default_factory=list)
    note: str


class CensusRow(BaseModel):
    x1: int
    x2: int
    n: int
    count: int


class LemmaRow(BaseModel):
    x1: int
    x2: int
    m: int
    lhs: int
    rhs: int
    holds: bool
    anchor_rhs: int
    anchor_max: int
    aggregate_rhs: int
    anchor_holds: bool


class VerifyRow(BaseModel):
    check: str
    passed: bool
    detail: str = ""


def _plain(record: Any) -> Dict[str, Any]:
    return record.dict() if isinstance(record, BaseModel) else dict(record)


def to_json(header: RunHeader, records: Sequence[Any]) -> str:
    """{"header": ..., "records": [...]} as indented JSON; big integers stay exact."""
    document = {"header": json.loads(header.json()), "records": [_plain(r) for r in records]}
    return json.dumps(document, indent=2, default=str)


def to_csv(header: RunHeader, records: Sequence[Any]) -> str:
    """CSV with a commented first line carrying the header."""
    frame = pd.DataFrame([_plain(r) for r in records])
    return f"# {header.json()}\n" + frame.to_csv(index=False)


def write_output(stream: TextIO, header: RunHeader, records: Sequence[Any], fmt: str) -> None:
    """
    Write records in the requested format.

    Args:
        stream: Open text stream
        header: Run header
        records: Pydantic records or plain dicts
        fmt: "json" or "csv"
    """
    if fmt == "json":
        stream.write(to_json(header, records) + "\n")
    elif fmt == "csv":
        stream.write(to_csv(header, records))
    else:
        raise ValueError(f"Unknown output format: {fmt}")
