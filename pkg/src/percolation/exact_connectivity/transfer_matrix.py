"""
Transfer-matrix evaluation of tau^{f,N}(x, y).

The region is swept column by column, one vertex at a time. The frontier
is one column of vertices; a state records how the frontier vertices are
joined by open paths through the already-decided edges (a set partition in
restricted-growth form) and, per block, whether the block holds x, holds y
or has touched the internal boundary. When a block leaves the frontier its
cluster is complete: an untouched block holding x and y settles the event,
and any other block holding x or y kills the state.
"""

from typing import Dict, List, Optional, Tuple
from dataclasses import dataclass
from fractions import Fraction
import logging
import math
import time

from config.config import settings
from src.percolation.core.model import LatticeRegion, Params, Probability, Vertex
from src.percolation.exact_connectivity.exact_result import Engine, ExactResult
from src.utils.budget.limiter import require_within

logger = logging.getLogger("transfer_matrix")

HAS_X = 1
HAS_Y = 2
TOUCHED = 4


@dataclass(frozen=True)
class FrontierState:
    """
    Canonical frontier state.

    Attributes:
        labels: Block label of each frontier slot, in restricted-growth form
        flags: Bitmask per block (HAS_X, HAS_Y, TOUCHED)
    """
    labels: Tuple[int, ...]
    flags: Tuple[int, ...]

    @classmethod
    def canonical(cls, labels: List[int], flags: Dict[int, int]) -> "FrontierState":
        remap: Dict[int, int] = {}
        out = []
        for label in labels:
            if label not in remap:
                remap[label] = len(remap)
            out.append(remap[label])
        new_flags = [0] * len(remap)
        for old, new in remap.items():
            new_flags[new] = flags[old]
        return cls(tuple(out), tuple(new_flags))

    def is_dead(self) -> bool:
        """A block holding x or y has touched the boundary."""
        return any(f & TOUCHED and f & (HAS_X | HAS_Y) for f in self.flags)


@dataclass(frozen=True)
class _Grid:
    """Region in sweep coordinates: columns are swept, rows form the frontier."""
    n_cols: int
    n_rows: int
    p_between: Probability
    p_within: Probability
    x: Tuple[int, int]
    y: Tuple[int, int]

    def flags_of(self, c: int, r: int) -> int:
        f = 0
        if (c, r) == self.x:
            f |= HAS_X
        if (c, r) == self.y:
            f |= HAS_Y
        if c in (0, self.n_cols - 1) or r in (0, self.n_rows - 1):
            f |= TOUCHED
        return f


def _to_grid(region: LatticeRegion, params: Params, x: Vertex, y: Vertex) -> Tuple[_Grid, bool]:
    """Orient the sweep so the frontier is the shorter side."""
    transpose = region.height > region.width
    if transpose:
        def at(v):
            return (v[1] - region.y_lo, v[0] - region.x_lo)
        grid = _Grid(region.height, region.width, params.p_v, params.p_h, at(x), at(y))
    else:
        def at(v):
            return (v[0] - region.x_lo, v[1] - region.y_lo)
        grid = _Grid(region.width, region.height, params.p_h, params.p_v, at(x), at(y))
    return grid, transpose


def _close_block(state_labels: List[int], flags: Dict[int, int], label: int) -> Optional[bool]:
    """
    Outcome of a block leaving the frontier.

    Returns:
        True when it settles the event, False when it kills the state,
        None when it is irrelevant
    """
    if label in state_labels:
        return None
    f = flags.pop(label)
    if f & (HAS_X | HAS_Y) == (HAS_X | HAS_Y) and not f & TOUCHED:
        return True
    if f & (HAS_X | HAS_Y):
        return False
    return None


def _merge(labels: List[int], flags: Dict[int, int], keep: int, drop: int) -> None:
    if keep == drop:
        return
    for i, label in enumerate(labels):
        if label == drop:
            labels[i] = keep
    flags[keep] |= flags.pop(drop)


def tau_fN_transfer(region: LatticeRegion, params: Params, x: Vertex, y: Vertex,
                    frontier_cap: Optional[int] = None, state_budget: Optional[int] = None) -> ExactResult:
    """
    tau^{f,N}(x, y) by a column sweep over frontier states.

    Args:
        region: Finite box whose shorter side is at most the frontier cap
        params: Percolation parameters (Fractions give an exact result)
        x, y: Vertices of the region interior
        frontier_cap: Override of settings.FRONTIER_CAP
        state_budget: Override of settings.TRANSFER_STATE_BUDGET

    Returns:
        ExactResult from the transfer_matrix engine
    """
    region.require_interior(x, y)
    cap = frontier_cap if frontier_cap is not None else settings.FRONTIER_CAP
    budget = state_budget if state_budget is not None else settings.TRANSFER_STATE_BUDGET
    grid, transposed = _to_grid(region, params, x, y)
    require_within("frontier vertices", grid.n_rows, cap, "use --engine brute or raise PERCOLAB_FRONTIER_CAP")

    exact = params.is_exact
    collapse = (lambda parts: sum(parts, Fraction(0))) if exact else math.fsum
    one = Fraction(1) if exact else 1.0
    if exact:
        p_between, p_within = Fraction(grid.p_between), Fraction(grid.p_within)
    else:
        p_between, p_within = float(grid.p_between), float(grid.p_within)

    start = time.time()
    successes: List[Probability] = []
    # empty frontier before the first column: slots hold no vertex yet
    states: Dict[Optional[FrontierState], Probability] = {None: one}
    peak = 1

    for c in range(grid.n_cols):
        for r in range(grid.n_rows):
            pending: Dict[FrontierState, List[Probability]] = {}
            for state, weight in states.items():
                for h_open in ((False, True) if c > 0 else (None,)):
                    for v_open in ((False, True) if r > 0 else (None,)):
                        w = weight
                        if h_open is not None:
                            w = w * (p_between if h_open else 1 - p_between)
                        if v_open is not None:
                            w = w * (p_within if v_open else 1 - p_within)
                        if not w:
                            continue
                        outcome = _step(state, grid, c, r, h_open, v_open)
                        if outcome is True:
                            successes.append(w)
                        elif isinstance(outcome, FrontierState):
                            pending.setdefault(outcome, []).append(w)
            states = {s: collapse(ws) for s, ws in pending.items()}
            peak = max(peak, len(states))
            require_within("transfer-matrix states", len(states), budget,
                           "raise PERCOLAB_TRANSFER_STATE_BUDGET or use a smaller region")
        logger.debug(f"Column {c + 1}/{grid.n_cols}: {len(states)} states")

    for state, weight in states.items():
        labels = list(state.labels)
        flags = dict(enumerate(state.flags))
        for label in set(labels):
            f = flags[label]
            if f & (HAS_X | HAS_Y) == (HAS_X | HAS_Y) and not f & TOUCHED:
                successes.append(weight)

    value = collapse(successes)
    elapsed = (time.time() - start) * 1000
    logger.info(f"Transfer matrix on {region.describe()} (frontier {grid.n_rows}, transposed={transposed}, "
                f"peak {peak} states) took {elapsed:.1f} ms")
    return ExactResult.build(value, Engine.TRANSFER_MATRIX, region, params, x, y, elapsed)


def _step(state: Optional[FrontierState], grid: _Grid, c: int, r: int,
          h_open: Optional[bool], v_open: Optional[bool]):
    """
    Add vertex (c, r) with its left and lower edges decided.

    Returns:
        True if the event is settled, False if the state dies, otherwise the new state
    """
    if state is None:
        labels: List[int] = []
        flags: Dict[int, int] = {}
    else:
        labels = list(state.labels)
        flags = dict(enumerate(state.flags))

    fresh = max(flags, default=-1) + 1
    flags[fresh] = grid.flags_of(c, r)

    if c == 0:
        # first column: slots are appended
        labels.append(fresh)
        if v_open:
            _merge(labels, flags, labels[r - 1], fresh)
    else:
        old = labels[r]
        if h_open:
            flags[old] |= flags.pop(fresh)
            current = old
        else:
            current = fresh
        if v_open:
            below = labels[r - 1]
            _merge(labels, flags, below, current)
            current = below
        labels[r] = current
        if not h_open:
            outcome = _close_block(labels, flags, old)
            if outcome is not None:
                return outcome

    new_state = FrontierState.canonical(labels, flags)
    if new_state.is_dead():
        return False
    return new_state
