"""
Minimal contours surrounding {0, x}.

A minimal contour has exactly 2(x2 + 1) horizontal and 2(x1 + 1) vertical
edges. Its dual circuit runs through u = (-1/2, -1/2) and
w = (x1 + 1/2, x2 + 1/2) and splits there into two monotone dual paths that
meet only at u and w. Counting those path pairs gives beta_x.
"""

from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple
from dataclasses import dataclass
from math import comb, exp, log
import logging

from src.percolation.core.model import Edge, Vertex, make_edge, is_horizontal, norm_x
from src.percolation.contours.contour_model import (
    Contour, DualCircuit, dual_of, primal_of, walk, word_encode,
)
from src.percolation.exceptions import DomainValidityError, InvalidCircuitError, InvariantViolation
from src.utils.budget.limiter import SearchBudget

logger = logging.getLogger("minimal_contours")


def _check_target(x: Vertex) -> Tuple[int, int]:
    x1, x2 = x
    if x1 <= 0 or x2 <= 0:
        raise DomainValidityError(f"Target needs positive coordinates, got {x}")
    return x1, x2


def beta(x: Vertex, budget: Optional[SearchBudget] = None) -> int:
    """
    Number of minimal contours surrounding {0, x}.

    Dynamic programming over pairs of monotone dual paths from u to w that
    advance one step each per round. The state after t steps is the pair of
    path heights (upper, lower); the upper path must stay strictly above the
    lower one everywhere except at u and w.

    Args:
        x: Target vertex with positive coordinates
        budget: Optional budget charged one token per DP state

    Returns:
        beta_x as an exact integer
    """
    x1, x2 = _check_target(x)
    width, height = x1 + 1, x2 + 1
    length = width + height
    states: Dict[Tuple[int, int], int] = {(0, 0): 1}

    for t in range(1, length + 1):
        nxt: Dict[Tuple[int, int], int] = {}
        for (y_up, y_low), count in states.items():
            for dy_up in (0, 1):
                ny_up = y_up + dy_up
                if ny_up > height or t - ny_up > width:
                    continue
                for dy_low in (0, 1):
                    ny_low = y_low + dy_low
                    if ny_low > height or t - ny_low > width:
                        continue
                    if t < length and ny_up <= ny_low:
                        continue
                    key = (ny_up, ny_low)
                    nxt[key] = nxt.get(key, 0) + count
        if budget is not None:
            budget.consume(len(nxt))
        states = nxt

    return states.get((height, height), 0)


def beta_narayana(x: Vertex) -> int:
    """
    Closed form for beta_x: the Narayana number N(x1 + x2 + 1, x1 + 1).

    Minimal contours are in bijection with staircase polygons filling an
    (x1 + 1) x (x2 + 1) box. Used as a cross-check only.
    """
    x1, x2 = _check_target(x)
    n, k = x1 + x2 + 1, x1 + 1
    return comb(n, k) * comb(n, k - 1) // n


def beta_lgv(x: Vertex) -> int:
    """
    beta_x as a 2 x 2 Lindstrom-Gessel-Viennot determinant.

    After removing the shared endpoints the two dual paths are vertex-disjoint
    monotone paths from (0, 1) to (x1, x2 + 1) and from (1, 0) to (x1 + 1, x2).
    """
    x1, x2 = _check_target(x)
    n = x1 + x2
    return comb(n, x1) ** 2 - comb(n, x1 + 1) * comb(n, x1 - 1)


def _path_pairs(width: int, height: int) -> Iterator[Tuple[str, str]]:
    """Ordered pairs (upper, lower) of monotone U/R words from u to w meeting only at the ends."""
    length = width + height

    def extend(t, up, low, w_up, w_low):
        if t == length:
            if up == low == (width, height):
                yield "".join(w_up), "".join(w_low)
            return
        for s_up, (dx_up, dy_up) in (("U", (0, 1)), ("R", (1, 0))):
            n_up = (up[0] + dx_up, up[1] + dy_up)
            if n_up[0] > width or n_up[1] > height:
                continue
            for s_low, (dx_low, dy_low) in (("R", (1, 0)), ("U", (0, 1))):
                n_low = (low[0] + dx_low, low[1] + dy_low)
                if n_low[0] > width or n_low[1] > height:
                    continue
                if t + 1 < length and n_up[0] >= n_low[0]:
                    continue
                w_up.append(s_up)
                w_low.append(s_low)
                yield from extend(t + 1, n_up, n_low, w_up, w_low)
                w_up.pop()
                w_low.pop()

    yield from extend(0, (0, 0), (0, 0), [], [])


def minimal_circuits(x: Vertex) -> Iterator[DualCircuit]:
    """
    Dual circuits of all minimal contours around {0, x}, based at u and going up first.

    The word is the upper path from u to w followed by the lower path walked
    back from w to u.
    """
    x1, x2 = _check_target(x)
    swap = {"R": "L", "U": "D"}
    for upper, lower in _path_pairs(x1 + 1, x2 + 1):
        back = "".join(swap[c] for c in reversed(lower))
        yield DualCircuit((0, 0), upper + back)


def enumerate_minimal_contours(x: Vertex) -> List[Contour]:
    """
    All minimal contours surrounding {0, x}.

    Returns:
        List of Contour objects; its length equals beta(x)
    """
    contours = []
    for circuit in minimal_circuits(x):
        contour = Contour.from_edges(primal_of(circuit))
        if not contour.surrounds((0, 0), x):
            raise InvariantViolation("minimal contour", f"{circuit.word} does not surround 0 and {x}")
        contours.append(contour)
    logger.debug(f"Enumerated {len(contours)} minimal contours for x={x}")
    return contours


@dataclass(frozen=True)
class AlphaRow:
    n: int
    alpha: int
    root: float


@dataclass(frozen=True)
class AlphaSequence:
    """
    alpha_n = beta((n, rho * n)) for n = 1..n_max with checked properties.

    Attributes:
        rho: Integer slope
        rows: One row per n
        supermultiplicative_violations: Pairs (n, m) with alpha_{n+m} < alpha_n * alpha_m
        root_bound_violations: n with alpha_n^(1/n) outside [1, 4^(1 + rho)]
    """
    rho: int
    rows: Tuple[AlphaRow, ...]
    supermultiplicative_violations: Tuple[Tuple[int, int], ...]
    root_bound_violations: Tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.supermultiplicative_violations and not self.root_bound_violations

    def alpha(self, n: int) -> int:
        return self.rows[n - 1].alpha


def alpha_sequence(rho: int, n_max: int, budget: Optional[SearchBudget] = None) -> AlphaSequence:
    """
    Root sequence of minimal-contour counts along the line x = (n, rho * n).

    Args:
        rho: Positive integer slope
        n_max: Largest n, at least 2
        budget: Optional DP-state budget

    Returns:
        AlphaSequence with rows and flagged violations
    """
    if not isinstance(rho, int) or rho < 1:
        raise DomainValidityError(f"rho must be a positive integer, got {rho!r}")
    if n_max < 2:
        raise DomainValidityError(f"n_max must be at least 2, got {n_max}")

    alphas = [beta((n, rho * n), budget) for n in range(1, n_max + 1)]
    rows = tuple(AlphaRow(n, a, exp(log(a) / n)) for n, a in enumerate(alphas, start=1))

    ceiling = 4 ** (1 + rho)
    # exact integer form of 1 <= alpha_n^(1/n) <= 4^(1+rho)
    root_violations = tuple(r.n for r in rows if not 1 <= r.alpha <= ceiling ** r.n)
    super_violations = []
    for n in range(1, n_max + 1):
        for m in range(1, n_max - n + 1):
            if alphas[n + m - 1] < alphas[n - 1] * alphas[m - 1]:
                super_violations.append((n, m))

    if super_violations or root_violations:
        logger.warning(f"alpha_sequence(rho={rho}) flagged {super_violations} {root_violations}")
    return AlphaSequence(rho, rows, tuple(super_violations), root_violations)


@dataclass(frozen=True)
class CompanionPaths:
    """
    Companion set of a minimal contour.

    Attributes:
        sigma1, sigma2: Vertex sequences of two shortest primal paths from 0 to x
        q: The four corner edges at 0 and x shared by every minimal contour
        t_edges: sigma1 union sigma2 as an edge set
        t_h, t_v: Horizontal / vertical edge counts of t_edges
    """
    sigma1: Tuple[Vertex, ...]
    sigma2: Tuple[Vertex, ...]
    q: FrozenSet[Edge]
    t_edges: FrozenSet[Edge]
    t_h: int
    t_v: int


def corner_edges(x: Vertex) -> FrozenSet[Edge]:
    x1, x2 = x
    return frozenset({
        make_edge((-1, 0), (0, 0)),
        make_edge((0, -1), (0, 0)),
        make_edge((x1, x2), (x1, x2 + 1)),
        make_edge((x1, x2), (x1 + 1, x2)),
    })


def _path_edges(path: Tuple[Vertex, ...]) -> List[Edge]:
    return [make_edge(a, b) for a, b in zip(path, path[1:])]


def companion_paths(contour: Contour, x: Vertex) -> CompanionPaths:
    """
    Two shortest paths from 0 to x inside a minimal contour.

    The dual circuit minus the corner edges Q is two disjoint dual paths;
    shifting the upper one by (1/2, -1/2) and the lower one by (-1/2, 1/2)
    puts them on the primal lattice as paths from 0 to x.

    Args:
        contour: Minimal contour surrounding {0, x}
        x: Target vertex

    Returns:
        CompanionPaths with the validated edge counts
    """
    x1, x2 = _check_target(x)
    norm = norm_x(x)
    if len(contour) != norm or not contour.surrounds((0, 0), x):
        raise InvalidCircuitError(f"Not a minimal contour surrounding 0 and {x}")
    q = corner_edges(x)
    if not q <= contour.edges:
        raise InvalidCircuitError("Minimal contour is missing a corner edge")

    k, word = word_encode(dual_of(contour))
    if k != 0:
        raise InvalidCircuitError(f"Minimal contour anchored at column {k}, expected 0")
    points = walk((0, 0), word)
    w_index = points.index((x1 + 1, x2 + 1))

    # drop the Q steps at both ends of each half
    upper = points[1:w_index]
    lower = points[w_index + 1:-1]
    sigma1 = tuple((i, j - 1) for i, j in upper)
    sigma2 = tuple((i - 1, j) for i, j in reversed(lower))
    if sigma1[0] != (0, 0) or sigma1[-1] != x or sigma2[0] != (0, 0) or sigma2[-1] != x:
        raise InvariantViolation("companion paths", f"endpoints {sigma1[0]}..{sigma1[-1]}, {sigma2[0]}..{sigma2[-1]}")

    t_edges = frozenset(_path_edges(sigma1)) | frozenset(_path_edges(sigma2))
    t_h = sum(1 for e in t_edges if is_horizontal(e))
    t_v = len(t_edges) - t_h

    if not (t_h <= 2 * x1 < contour.v_count and t_v <= 2 * x2 < contour.h_count):
        raise InvariantViolation("companion edge counts",
                                 f"|t^h|={t_h}, |t^v|={t_v}, |gamma^v|={contour.v_count}, |gamma^h|={contour.h_count}")
    if not t_edges <= contour.interior_edges():
        raise InvariantViolation("companion paths", "t_gamma leaves the interior edge set")

    return CompanionPaths(sigma1, sigma2, q, t_edges, t_h, t_v)

