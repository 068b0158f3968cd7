"""
Contour census: exact counts of contours of each length surrounding {0, x}.

Every contour around the origin cuts the x-axis somewhere left of it. The
search fixes the leftmost such crossing, the dual edge from (k - 1/2, -1/2)
to (k - 1/2, 1/2), walks it upwards and then grows self-avoiding dual walks
until they close. Walks that cannot still reach around x and back in the
remaining steps are pruned.
"""

from typing import Dict, List, Optional, Tuple
from dataclasses import dataclass, field
from math import comb
import hashlib
import logging
import multiprocessing
import time

import pandas as pd

from config.config import settings
from src.percolation.core.model import Vertex, is_horizontal, norm_x
from src.percolation.contours.contour_model import Contour, DualCircuit, STEPS, is_contour, primal_of
from src.percolation.contours.minimal_contours import beta as beta_dp
from src.percolation.exceptions import DomainValidityError, InvariantViolation
from src.utils.budget.limiter import SearchBudget, SharedSearchBudget

logger = logging.getLogger("census")

# nodes are charged to the budget in batches of this size
_CHARGE_EVERY = 4096

_BUDGET_RESOURCE = "census search nodes"
_BUDGET_HINT = "raise --budget or lower --n-max"


@dataclass(frozen=True)
class ContourCensus:
    """
    Exact contour counts |Gamma^n| for ||x|| <= n <= n_max.

    Attributes:
        x: Target vertex
        n_max: Largest enumerated length
        counts: Length -> number of contours surrounding {0, x}
        anchor_counts: (length, k) -> contours whose leftmost x-axis crossing is column k
        beta: Number of minimal contours (counts at length ||x||)
        nodes: Search nodes visited
        rejected: Closed walks that surrounded both points but failed the contour test
        members: Contours found, only when requested
    """
    x: Vertex
    n_max: int
    counts: Dict[int, int]
    anchor_counts: Dict[Tuple[int, int], int]
    beta: int
    nodes: int
    rejected: int = 0
    members: Tuple[Contour, ...] = field(default=(), repr=False)

    @property
    def norm(self) -> int:
        return norm_x(self.x)

    def covers(self, n: int) -> bool:
        return self.norm <= n <= self.n_max

    def count(self, n: int) -> int:
        if n < self.norm:
            return 0
        if n > self.n_max:
            raise DomainValidityError(f"Census for x={self.x} stops at n={self.n_max}, asked for {n}")
        return self.counts[n]

    def anchors(self, n: int) -> Dict[int, int]:
        """Per-anchor counts at length n, keyed by column k."""
        return {k: c for (length, k), c in self.anchor_counts.items() if length == n}


@dataclass
class _Partition:
    counts: Dict[Tuple[int, int], int]
    nodes: int
    rejected: int
    members: List[Contour]


def _crosses_axis_row(p: Vertex, letter: str, row: int) -> bool:
    """The step crosses a horizontal primal edge lying on the given row."""
    return (letter == "U" and p[1] == row) or (letter == "D" and p[1] == row + 1)


def _surrounds_by_parity(points: List[Vertex], word: str, v: Vertex) -> bool:
    """Ray casting to the left of primal vertex v: odd number of crossings means inside."""
    a, b = v
    crossings = 0
    for p, c in zip(points, word):
        if _crosses_axis_row(p, c, b) and p[0] <= a:
            crossings += 1
    return crossings % 2 == 1


def _explore(x: Vertex, n_max: int, k: int, second: Optional[str],
             budget: SearchBudget, keep_members: bool) -> _Partition:
    """
    Depth-first search for one anchor column (and optionally one second step).

    Returns per-(length, k) counts. Nodes are charged to ``budget``, which
    raises ResourceBudgetExceeded once it is spent.
    """
    x1, x2 = x
    norm = norm_x(x)
    col_target, row_target = x1 + 1, x2 + 1
    min_h, min_v = 2 * row_target, 2 * col_target
    base = (k, 0)
    first = (k, 1)

    visited = {base, first}
    points: List[Vertex] = [base, first]
    word: List[str] = ["U"]
    counts: Dict[Tuple[int, int], int] = {}
    seen_digests = set()
    members: List[Contour] = []
    state = {"pending": 0, "nodes": 0, "rejected": 0}

    def charge():
        state["pending"] += 1
        if state["pending"] >= _CHARGE_EVERY:
            budget.consume(state["pending"])
            state["nodes"] += state["pending"]
            state["pending"] = 0

    def distance_needed(q: Vertex, max_col: int, max_row: int) -> int:
        if max_col < col_target:
            dx = (col_target - q[0]) + (col_target - k)
        else:
            dx = abs(q[0] - k)
        if max_row < row_target:
            dy = (row_target - q[1]) + row_target
        else:
            dy = abs(q[1])
        return dx + dy

    def record(closing: str):
        full_word = "".join(word) + closing
        length = len(full_word)
        closed_points = points + [base]
        if not (_surrounds_by_parity(closed_points, full_word, (0, 0))
                and _surrounds_by_parity(closed_points, full_word, x)):
            return
        circuit = DualCircuit(base, full_word)
        edges = primal_of(circuit)
        ok, interior = is_contour(edges)
        if not ok or (0, 0) not in interior or x not in interior:
            state["rejected"] += 1
            logger.warning(f"Closed dual walk {full_word} at k={k} rejected by the contour test")
            return

        h = sum(1 for e in edges if is_horizontal(e))
        v = length - h
        if h < min_h or v < min_v or ((h == min_h and v == min_v) != (length == norm)):
            raise InvariantViolation("contour edge counts", f"|h|={h}, |v|={v}, n={length}, x={x}")

        digest = hashlib.blake2b(repr(sorted(edges)).encode(), digest_size=16).digest()
        if digest in seen_digests:
            raise InvariantViolation("census dedup", f"contour {full_word} at k={k} found twice")
        seen_digests.add(digest)
        counts[(length, k)] = counts.get((length, k), 0) + 1
        if keep_members:
            members.append(Contour(edges, interior))

    def extend(p: Vertex, steps: int, max_col: int, max_row: int, letters: str):
        remaining = n_max - steps - 1
        for letter in letters:
            di, dj = STEPS[letter]
            q = (p[0] + di, p[1] + dj)
            if _crosses_axis_row(p, letter, 0) and p[0] < k:
                continue
            if q == base:
                if steps + 1 >= norm:
                    record(letter)
                continue
            if q in visited:
                continue
            n_col, n_row = max(max_col, q[0]), max(max_row, q[1])
            if distance_needed(q, n_col, n_row) > remaining:
                continue
            charge()
            visited.add(q)
            points.append(q)
            word.append(letter)
            extend(q, steps + 1, n_col, n_row, "RULD")
            word.pop()
            points.pop()
            visited.discard(q)

    extend(first, 1, k, 1, second if second is not None else "RUL")
    budget.consume(state["pending"])
    state["nodes"] += state["pending"]
    return _Partition(counts, state["nodes"], state["rejected"], members)


# shared node counter, set in each pool worker
_shared_nodes = None


def _init_worker(counter) -> None:
    global _shared_nodes
    _shared_nodes = counter


def _explore_task(args) -> _Partition:
    x, n_max, k, second, limit, keep_members = args
    budget = SharedSearchBudget(limit, _shared_nodes, _BUDGET_RESOURCE, _BUDGET_HINT)
    return _explore(x, n_max, k, second, budget, keep_members)


def anchor_columns(x: Vertex, n_max: int) -> List[int]:
    """Admissible leftmost-crossing columns k for contours of length <= n_max."""
    norm = norm_x(x)
    return list(range(-((n_max - norm) // 2), 1))


def census(x: Vertex, n_max: int, budget: Optional[int] = None, workers: int = 1,
           keep_members: bool = False) -> ContourCensus:
    """
    Exhaustive census of contours surrounding {0, x} up to length n_max.

    Args:
        x: Target vertex with positive coordinates
        n_max: Largest contour length, at least ||x||
        budget: Search-node cap (defaults to settings.ENUMERATION_BUDGET)
        workers: Processes used to explore (anchor, second step) partitions
        keep_members: Keep every contour found on the result

    Returns:
        ContourCensus with exact counts

    Raises:
        ResourceBudgetExceeded: if the search needs more nodes than the budget
    """
    x1, x2 = x
    if x1 <= 0 or x2 <= 0:
        raise DomainValidityError(f"Target needs positive coordinates, got {x}")
    norm = norm_x(x)
    if n_max < norm:
        raise DomainValidityError(f"n_max={n_max} is below ||x||={norm}")
    limit = budget if budget is not None else settings.ENUMERATION_BUDGET

    start = time.time()
    columns = anchor_columns(x, n_max)
    if workers > 1:
        tasks = [(x, n_max, k, s, limit, keep_members) for k in columns for s in "RUL"]
        counter = multiprocessing.Value("q", 0)
        with multiprocessing.Pool(workers, initializer=_init_worker, initargs=(counter,)) as pool:
            parts = pool.map(_explore_task, tasks)
    else:
        node_budget = SearchBudget(limit, _BUDGET_RESOURCE, _BUDGET_HINT)
        parts = [_explore(x, n_max, k, None, node_budget, keep_members) for k in columns]

    nodes = sum(p.nodes for p in parts)

    anchor_counts: Dict[Tuple[int, int], int] = {}
    for part in parts:
        for key, c in part.counts.items():
            anchor_counts[key] = anchor_counts.get(key, 0) + c
    counts = {n: 0 for n in range(norm, n_max + 1)}
    for (n, _), c in anchor_counts.items():
        counts[n] += c

    members = tuple(m for p in parts for m in p.members)
    result = ContourCensus(x, n_max, counts, anchor_counts, counts[norm], nodes,
                           sum(p.rejected for p in parts), members)

    expected = beta_dp(x)
    if result.beta != expected:
        raise InvariantViolation("census beta", f"census found {result.beta} minimal contours, DP gives {expected}")
    logger.info(f"Census x={x} n<={n_max}: {nodes} nodes in {time.time() - start:.2f}s, counts={counts}")
    return result


@dataclass(frozen=True)
class LemmaReport:
    """
    Counting-lemma check for one m.

    Attributes:
        lhs: |Gamma^{||x|| + m}|
        rhs: 12^m * C(||x||, m) * beta_x
        holds: lhs <= rhs
        anchor_rhs: Per-anchor ceiling 3^m * C(||x|| + m, m) * beta_x
        anchor_max: Largest per-anchor count at this length
        aggregate_rhs: anchor_rhs times the number of admissible anchors
        anchor_holds: Every per-anchor count and the total respect their ceilings
    """
    x: Vertex
    m: int
    lhs: int
    rhs: int
    holds: bool
    anchor_rhs: int
    anchor_max: int
    aggregate_rhs: int
    anchor_holds: bool


def verify_counting_lemma(x: Vertex, m: int, census_result: ContourCensus) -> LemmaReport:
    """
    Compare census counts at length ||x|| + m with the counting-lemma ceilings.

    Args:
        x: Target vertex (must match the census)
        m: Excess length, 0 <= m <= ||x|| / 2
        census_result: Census covering ||x|| + m

    Returns:
        LemmaReport with both ceilings
    """
    norm = norm_x(x)
    if tuple(x) != tuple(census_result.x):
        raise DomainValidityError(f"Census is for x={census_result.x}, not {x}")
    if not 0 <= m <= norm // 2:
        raise DomainValidityError(f"m={m} outside 0..{norm // 2}")
    if not census_result.covers(norm + m):
        raise DomainValidityError(f"Census stops at n={census_result.n_max}, needs {norm + m}")

    b = census_result.beta
    lhs = census_result.count(norm + m)
    rhs = 12 ** m * comb(norm, m) * b
    anchor_rhs = 3 ** m * comb(norm + m, m) * b
    per_anchor = census_result.anchors(norm + m)
    anchor_max = max(per_anchor.values(), default=0)
    aggregate_rhs = max(m, 1) * anchor_rhs
    anchor_holds = anchor_max <= anchor_rhs and lhs <= aggregate_rhs
    return LemmaReport(tuple(x), m, lhs, rhs, lhs <= rhs, anchor_rhs, anchor_max, aggregate_rhs, anchor_holds)


def census_to_frame(census_result: ContourCensus) -> pd.DataFrame:
    """Census as a table with columns (x1, x2, n, count); counts stay Python ints."""
    x1, x2 = census_result.x
    rows = [{"x1": x1, "x2": x2, "n": n, "count": c} for n, c in sorted(census_result.counts.items())]
    frame = pd.DataFrame(rows, columns=["x1", "x2", "n", "count"])
    frame["count"] = frame["count"].astype(object)
    return frame


def lemma_reports(census_result: ContourCensus, m_max: Optional[int] = None) -> List[LemmaReport]:
    """Counting-lemma reports for every m the census covers."""
    norm = census_result.norm
    top = min(norm // 2, census_result.n_max - norm)
    if m_max is not None:
        top = min(top, m_max)
    return [verify_counting_lemma(census_result.x, m, census_result) for m in range(top + 1)]


def lemma_table(census_result: ContourCensus, m_max: Optional[int] = None) -> pd.DataFrame:
    """lemma_reports as a table; big counts stay Python ints."""
    frame = pd.DataFrame([r.__dict__ for r in lemma_reports(census_result, m_max)])
    for col in ("lhs", "rhs", "anchor_rhs", "anchor_max", "aggregate_rhs"):
        frame[col] = frame[col].astype(object)
    return frame
