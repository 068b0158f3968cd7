"""
Core Model Module

This module provides the shared domain types of the laboratory: percolation
parameters, rectangular lattice regions with a frozen edge indexing, edge
configurations and the target-pair geometry (x and its reflection x').
"""

from typing import Dict, List, Tuple, Iterator, Union
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
import numbers
import logging

import numpy as np

from src.percolation.exceptions import DomainValidityError, InteriorViolationError

logger = logging.getLogger("core_model")

Vertex = Tuple[int, int]
Edge = Tuple[Vertex, Vertex]
Probability = Union[float, Fraction]


def make_edge(a: Vertex, b: Vertex) -> Edge:
    """Normalise an edge of Z^2 so that its endpoints are in lexicographic order."""
    if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
        raise DomainValidityError(f"{a} and {b} are not nearest neighbours")
    return (a, b) if a < b else (b, a)


def is_horizontal(edge: Edge) -> bool:
    """True for edges joining (x, y) and (x + 1, y)."""
    return edge[0][1] == edge[1][1]


def incident_edges(v: Vertex) -> List[Edge]:
    """The four edges of Z^2 incident to ``v``."""
    x, y = v
    return [make_edge(v, (x + 1, y)), make_edge(v, (x - 1, y)),
            make_edge(v, (x, y + 1)), make_edge(v, (x, y - 1))]


def reflect(v: Vertex) -> Vertex:
    """Swap-reflection across the diagonal: (x1, x2) -> (x2, x1)."""
    return (v[1], v[0])


def reflect_edge(edge: Edge) -> Edge:
    return make_edge(reflect(edge[0]), reflect(edge[1]))


def norm_x(x: Vertex) -> int:
    """
    Number of bonds of a minimal contour surrounding {0, x}.

    Args:
        x: Vertex with positive coordinates

    Returns:
        2 * (x1 + x2 + 2)
    """
    x1, x2 = x
    if x1 <= 0 or x2 <= 0:
        raise DomainValidityError(f"norm_x needs positive coordinates, got {x}")
    return 2 * (x1 + x2 + 2)


@dataclass(frozen=True)
class Params:
    """
    Anisotropic bond percolation parameters.

    Horizontal edges are open with probability ``p_h``, vertical edges with
    ``p_v``. The closed-to-open odds and their ratio are derived on demand so
    they can never drift from the probabilities. Probabilities may be floats
    or ``Fraction`` instances; fractions keep the derived quantities exact.
    """
    p_h: Probability
    p_v: Probability

    def __post_init__(self):
        for name, p in (("p_h", self.p_h), ("p_v", self.p_v)):
            if not isinstance(p, numbers.Real) or not 0 <= p <= 1:
                raise DomainValidityError(f"{name} must be a probability in [0, 1], got {p!r}")
        if self.p_h > self.p_v:
            raise DomainValidityError(f"p_h <= p_v is required, got p_h={self.p_h}, p_v={self.p_v}")

    @property
    def lambda_h(self) -> Probability:
        if self.p_h == 0:
            raise DomainValidityError("lambda_h is undefined for p_h = 0")
        return (1 - self.p_h) / self.p_h

    @property
    def lambda_v(self) -> Probability:
        if self.p_v == 0:
            raise DomainValidityError("lambda_v is undefined for p_v = 0")
        return (1 - self.p_v) / self.p_v

    @property
    def eta(self) -> Probability:
        lambda_h = self.lambda_h
        if lambda_h == 0:
            # p_h = p_v = 1: isotropic limit
            return 1
        return self.lambda_v / lambda_h

    @property
    def is_exact(self) -> bool:
        return isinstance(self.p_h, Fraction) and isinstance(self.p_v, Fraction)

    def as_float(self) -> "Params":
        return Params(float(self.p_h), float(self.p_v))

    def to_dict(self) -> Dict[str, float]:
        summary = {"p_h": float(self.p_h), "p_v": float(self.p_v)}
        if self.p_h > 0:
            summary.update(lambda_h=float(self.lambda_h), lambda_v=float(self.lambda_v), eta=float(self.eta))
        return summary


def make_params(p_h: Probability, p_v: Probability) -> Params:
    """
    Build validated parameters with derived odds.

    Args:
        p_h: Opening probability of horizontal edges, 0 < p_h <= p_v
        p_v: Opening probability of vertical edges, p_v <= 1

    Returns:
        Params with lambda_h, lambda_v and eta available
    """
    if not isinstance(p_h, numbers.Real) or p_h <= 0:
        raise DomainValidityError(f"p_h must be positive, got {p_h!r}")
    return Params(p_h, p_v)


def params_from_eta(p_h: Probability, eta: Probability) -> Params:
    """
    Parameters with a prescribed anisotropy ratio.

    Args:
        p_h: Horizontal probability, 0 < p_h < 1
        eta: Target ratio lambda_v / lambda_h, 0 < eta <= 1

    Returns:
        Params with p_v = 1 / (1 + eta * lambda_h)
    """
    if not 0 < p_h < 1:
        raise DomainValidityError(f"p_h must lie in (0, 1), got {p_h}")
    if not 0 < eta <= 1:
        raise DomainValidityError(f"eta must lie in (0, 1], got {eta}")
    lambda_h = (1 - p_h) / p_h
    p_v = 1 / (1 + eta * lambda_h)
    # eta = 1 can round p_v a hair below p_h in floating point
    if p_v < p_h:
        p_v = p_h
    return make_params(p_h, p_v)


@dataclass(frozen=True)
class LatticeRegion:
    """
    Finite vertex box [x_lo, x_hi] x [y_lo, y_hi] of Z^2.

    Edge indexing is frozen: all horizontal edges first in row-major order
    (row y_lo first, left to right), then all vertical edges in row-major
    order (the edge from row y to y + 1, left to right). Configuration
    bitsets, brute-force enumeration and exported files depend on it.
    """
    x_lo: int
    x_hi: int
    y_lo: int
    y_hi: int

    def __post_init__(self):
        if self.x_lo > self.x_hi or self.y_lo > self.y_hi:
            raise DomainValidityError(f"Empty region {self.describe()}")

    @classmethod
    def centered(cls, n: int) -> "LatticeRegion":
        """The square box V_N = [-N, N] x [-N, N]."""
        return cls(-n, n, -n, n)

    def describe(self) -> str:
        return f"[{self.x_lo},{self.x_hi}]x[{self.y_lo},{self.y_hi}]"

    @property
    def width(self) -> int:
        return self.x_hi - self.x_lo + 1

    @property
    def height(self) -> int:
        return self.y_hi - self.y_lo + 1

    @property
    def n_vertices(self) -> int:
        return self.width * self.height

    @property
    def n_h_edges(self) -> int:
        return (self.width - 1) * self.height

    @property
    def n_v_edges(self) -> int:
        return self.width * (self.height - 1)

    @property
    def n_edges(self) -> int:
        return self.n_h_edges + self.n_v_edges

    def contains(self, v: Vertex) -> bool:
        return self.x_lo <= v[0] <= self.x_hi and self.y_lo <= v[1] <= self.y_hi

    def is_boundary(self, v: Vertex) -> bool:
        """Internal vertex boundary: box vertices adjacent to the complement."""
        return self.contains(v) and (v[0] in (self.x_lo, self.x_hi) or v[1] in (self.y_lo, self.y_hi))

    def is_interior(self, v: Vertex) -> bool:
        return self.contains(v) and not self.is_boundary(v)

    def require_interior(self, *vertices: Vertex) -> None:
        for v in vertices:
            if not self.is_interior(v):
                raise InteriorViolationError(f"{v} is not in the interior of {self.describe()}")

    def vertices(self) -> Iterator[Vertex]:
        for y in range(self.y_lo, self.y_hi + 1):
            for x in range(self.x_lo, self.x_hi + 1):
                yield (x, y)

    def vertex_index(self, v: Vertex) -> int:
        if not self.contains(v):
            raise DomainValidityError(f"{v} is outside {self.describe()}")
        return (v[1] - self.y_lo) * self.width + (v[0] - self.x_lo)

    def vertex_at(self, index: int) -> Vertex:
        y, x = divmod(index, self.width)
        return (x + self.x_lo, y + self.y_lo)

    def edge_index(self, edge: Edge) -> int:
        a, b = make_edge(*edge)
        if not (self.contains(a) and self.contains(b)):
            raise DomainValidityError(f"Edge {edge} is not inside {self.describe()}")
        if is_horizontal((a, b)):
            return (a[1] - self.y_lo) * (self.width - 1) + (a[0] - self.x_lo)
        return self.n_h_edges + (a[1] - self.y_lo) * self.width + (a[0] - self.x_lo)

    def edge_at(self, index: int) -> Edge:
        if not 0 <= index < self.n_edges:
            raise DomainValidityError(f"Edge index {index} out of range for {self.describe()}")
        if index < self.n_h_edges:
            row, col = divmod(index, self.width - 1)
            a = (self.x_lo + col, self.y_lo + row)
            return (a, (a[0] + 1, a[1]))
        row, col = divmod(index - self.n_h_edges, self.width)
        a = (self.x_lo + col, self.y_lo + row)
        return (a, (a[0], a[1] + 1))

    def is_horizontal_index(self, index: int) -> bool:
        return index < self.n_h_edges

    def edges(self) -> List[Edge]:
        return [self.edge_at(i) for i in range(self.n_edges)]

    def contains_edges(self, edges) -> bool:
        return all(self.contains(a) and self.contains(b) for a, b in edges)

    @cached_property
    def endpoint_indices(self) -> Tuple[np.ndarray, np.ndarray]:
        """Vertex indices of both endpoints of every edge, in edge-index order."""
        us = np.empty(self.n_edges, dtype=np.int64)
        vs = np.empty(self.n_edges, dtype=np.int64)
        for i in range(self.n_edges):
            a, b = self.edge_at(i)
            us[i] = self.vertex_index(a)
            vs[i] = self.vertex_index(b)
        return us, vs

    @cached_property
    def boundary_indices(self) -> np.ndarray:
        return np.array([self.vertex_index(v) for v in self.vertices() if self.is_boundary(v)], dtype=np.int64)

    @property
    def is_diagonally_symmetric(self) -> bool:
        return self.x_lo == self.y_lo and self.x_hi == self.y_hi

    @cached_property
    def reflection_permutation(self) -> np.ndarray:
        """``perm[i]`` is the index of the diagonal reflection of edge ``i``."""
        if not self.is_diagonally_symmetric:
            raise DomainValidityError(f"{self.describe()} is not symmetric under the diagonal reflection")
        return np.array([self.edge_index(reflect_edge(self.edge_at(i))) for i in range(self.n_edges)],
                        dtype=np.int64)


@dataclass(frozen=True)
class Configuration:
    """
    Open/closed assignment of every edge of a region.

    ``closed`` is a bitset over the region's edge index space: bit ``i`` set
    means edge ``i`` is closed.
    """
    region: LatticeRegion
    closed: int

    def __post_init__(self):
        if self.closed < 0 or self.closed >> self.region.n_edges:
            raise DomainValidityError("Configuration bitset is longer than the region's edge count")

    @classmethod
    def from_closed_array(cls, region: LatticeRegion, closed: np.ndarray) -> "Configuration":
        bits = 0
        for i in np.flatnonzero(np.asarray(closed, dtype=bool)):
            bits |= 1 << int(i)
        return cls(region, bits)

    @classmethod
    def from_closed_edges(cls, region: LatticeRegion, edges) -> "Configuration":
        bits = 0
        for edge in edges:
            bits |= 1 << region.edge_index(edge)
        return cls(region, bits)

    def is_closed(self, index: int) -> bool:
        return bool(self.closed >> index & 1)

    def closed_array(self) -> np.ndarray:
        return np.array([self.is_closed(i) for i in range(self.region.n_edges)], dtype=bool)

    def open_array(self) -> np.ndarray:
        return ~self.closed_array()

    def closed_edges(self) -> List[Edge]:
        return [self.region.edge_at(i) for i in range(self.region.n_edges) if self.is_closed(i)]

    @property
    def closed_counts(self) -> Tuple[int, int]:
        """(|C^h|, |C^v|)."""
        n_h = self.region.n_h_edges
        h_mask = (1 << n_h) - 1
        return bin(self.closed & h_mask).count("1"), bin(self.closed >> n_h).count("1")

    def probability(self, params: Params) -> Probability:
        """Product measure weight of this configuration."""
        c_h, c_v = self.closed_counts
        o_h = self.region.n_h_edges - c_h
        o_v = self.region.n_v_edges - c_v
        return (params.p_h ** o_h) * ((1 - params.p_h) ** c_h) * (params.p_v ** o_v) * ((1 - params.p_v) ** c_v)


@dataclass(frozen=True)
class TargetPair:
    """
    Target vertex x with 0 < x1 < x2 and its reflection x' = (x2, x1).
    """
    x: Vertex
    x_prime: Vertex = field(init=False)
    norm: int = field(init=False)
    slope: Fraction = field(init=False)

    def __post_init__(self):
        x1, x2 = self.x
        if not 0 < x1 < x2:
            raise DomainValidityError(f"Target pair needs 0 < x1 < x2, got {self.x}")
        object.__setattr__(self, "x_prime", reflect(self.x))
        object.__setattr__(self, "norm", norm_x(self.x))
        object.__setattr__(self, "slope", Fraction(x2, x1))
