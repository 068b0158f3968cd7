"""
Contour Model Module

This module provides contours of Z^2 (minimal cut-sets with exactly one
finite complementary component) and their duals, self-avoiding circuits on
the dual lattice written as words over {R, L, U, D}.

Dual vertices are stored as integer pairs: (i, j) stands for the point
(i - 1/2, j - 1/2), the lower-left corner of the unit cell around primal
vertex (i, j).
"""

from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union
from dataclasses import dataclass, field
from collections import deque
import logging

from src.percolation.core.model import Edge, Vertex, is_horizontal, make_edge
from src.percolation.exceptions import InvalidCircuitError

logger = logging.getLogger("contour_model")

DualVertex = Tuple[int, int]

STEPS: Dict[str, Tuple[int, int]] = {"R": (1, 0), "L": (-1, 0), "U": (0, 1), "D": (0, -1)}
INVERSE = {"R": "L", "L": "R", "U": "D", "D": "U"}


def crossed_edge(p: DualVertex, letter: str) -> Edge:
    """
    The primal edge crossed by the dual step ``letter`` taken from ``p``.

    Args:
        p: Dual vertex (integer representation)
        letter: One of R, L, U, D

    Returns:
        Normalised primal edge
    """
    i, j = p
    if letter == "U":
        return ((i - 1, j), (i, j))
    if letter == "D":
        return ((i - 1, j - 1), (i, j - 1))
    if letter == "R":
        return ((i, j - 1), (i, j))
    if letter == "L":
        return ((i - 1, j - 1), (i - 1, j))
    raise InvalidCircuitError(f"Unknown step letter {letter!r}")


def dual_segment(edge: Edge) -> Tuple[DualVertex, DualVertex]:
    """The two dual vertices joined by the dual of a primal edge."""
    (a, b), _ = make_edge(*edge)
    if is_horizontal(edge):
        return (a + 1, b), (a + 1, b + 1)
    return (a, b + 1), (a + 1, b + 1)


def walk(base: DualVertex, word: str) -> List[DualVertex]:
    """Dual vertices visited by ``word`` from ``base`` (base repeated at the end for circuits)."""
    points = [base]
    i, j = base
    for letter in word:
        if letter not in STEPS:
            raise InvalidCircuitError(f"Unknown step letter {letter!r} in {word!r}")
        di, dj = STEPS[letter]
        i, j = i + di, j + dj
        points.append((i, j))
    return points


@dataclass(frozen=True)
class DualCircuit:
    """
    Self-avoiding closed walk on the dual lattice.

    Attributes:
        base: Starting dual vertex (integer representation)
        word: Steps over the alphabet {R, L, U, D}
    """
    base: DualVertex
    word: str

    def __post_init__(self):
        n = len(self.word)
        if n < 4 or n % 2:
            raise InvalidCircuitError(f"Circuit length must be even and >= 4, got {n}")
        points = walk(self.base, self.word)
        if points[-1] != self.base:
            raise InvalidCircuitError(f"Word {self.word!r} is not closed")
        if len(set(points[:-1])) != n:
            raise InvalidCircuitError(f"Word {self.word!r} is self-intersecting")

    @property
    def base_point(self) -> Tuple[float, float]:
        """Base vertex in lattice coordinates (half-integers)."""
        return (self.base[0] - 0.5, self.base[1] - 0.5)

    @property
    def vertices(self) -> List[DualVertex]:
        return walk(self.base, self.word)[:-1]

    def __len__(self) -> int:
        return len(self.word)

    def primal_edges(self) -> FrozenSet[Edge]:
        return primal_of(self)

    def reversed(self) -> "DualCircuit":
        """Same circuit walked in the opposite direction from the same base."""
        return DualCircuit(self.base, "".join(INVERSE[c] for c in reversed(self.word)))

    def rotated(self, start: int) -> "DualCircuit":
        """Same circuit and direction, starting at step ``start``."""
        points = walk(self.base, self.word)
        return DualCircuit(points[start], self.word[start:] + self.word[:start])


@dataclass(frozen=True)
class Contour:
    """
    Finite edge set of Z^2 whose removal leaves exactly one finite component.

    Attributes:
        edges: The contour's primal edges
        interior: Vertex set of the finite component (I_gamma)
        h_count: Number of horizontal edges
        v_count: Number of vertical edges
    """
    edges: FrozenSet[Edge]
    interior: FrozenSet[Vertex]
    h_count: int = field(init=False)
    v_count: int = field(init=False)

    def __post_init__(self):
        h = sum(1 for e in self.edges if is_horizontal(e))
        object.__setattr__(self, "h_count", h)
        object.__setattr__(self, "v_count", len(self.edges) - h)

    @classmethod
    def from_edges(cls, edges: Iterable[Edge]) -> "Contour":
        edge_set = frozenset(make_edge(*e) for e in edges)
        ok, interior = is_contour(edge_set)
        if not ok:
            raise InvalidCircuitError("Edge set is not a contour")
        return cls(edge_set, interior)

    def __len__(self) -> int:
        return len(self.edges)

    def surrounds(self, *vertices: Vertex) -> bool:
        return all(v in self.interior for v in vertices)

    def interior_edges(self) -> FrozenSet[Edge]:
        """E_gamma: edges with both endpoints in the interior."""
        inside = set()
        for (x, y) in self.interior:
            for nb in ((x + 1, y), (x, y + 1)):
                if nb in self.interior:
                    inside.add(((x, y), nb))
        return frozenset(inside)


def _neighbours(v: Vertex) -> Tuple[Vertex, ...]:
    x, y = v
    return ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1))


def is_contour(edges: Iterable[Edge]) -> Tuple[bool, Optional[FrozenSet[Vertex]]]:
    """
    Test whether a finite edge set is a contour.

    The complement graph is explored inside the bounding box of the edge
    endpoints grown by one; everything reachable from the box frame belongs
    to the infinite component.

    Args:
        edges: Finite set of primal edges

    Returns:
        (True, interior) for a contour, (False, None) otherwise
    """
    try:
        removed = {make_edge(*e) for e in edges}
    except Exception:
        return False, None
    if not removed:
        return False, None

    xs = [v[0] for e in removed for v in e]
    ys = [v[1] for e in removed for v in e]
    x_lo, x_hi, y_lo, y_hi = min(xs) - 1, max(xs) + 1, min(ys) - 1, max(ys) + 1

    def inside(v: Vertex) -> bool:
        return x_lo <= v[0] <= x_hi and y_lo <= v[1] <= y_hi

    def flood(start: Vertex, seen: set) -> set:
        component = {start}
        queue = deque([start])
        seen.add(start)
        while queue:
            v = queue.popleft()
            for nb in _neighbours(v):
                if inside(nb) and nb not in seen and make_edge(v, nb) not in removed:
                    seen.add(nb)
                    component.add(nb)
                    queue.append(nb)
        return component

    seen: set = set()
    flood((x_lo, y_lo), seen)

    finite = []
    for x in range(x_lo, x_hi + 1):
        for y in range(y_lo, y_hi + 1):
            if (x, y) not in seen:
                finite.append(flood((x, y), seen))
                if len(finite) > 1:
                    return False, None
    if len(finite) != 1:
        return False, None

    interior = finite[0]
    for a, b in removed:
        if (a in interior) == (b in interior):
            return False, None
    return True, frozenset(interior)


def primal_of(circuit: DualCircuit) -> FrozenSet[Edge]:
    """Primal edges crossed by a dual circuit."""
    points = walk(circuit.base, circuit.word)
    return frozenset(crossed_edge(p, c) for p, c in zip(points, circuit.word))


def dual_of(contour: Union[Contour, Iterable[Edge]]) -> DualCircuit:
    """
    Dual circuit of a contour.

    The walk starts at the lowest of the leftmost dual vertices and goes up
    first (clockwise).

    Args:
        contour: Contour or raw edge set

    Returns:
        DualCircuit whose primal edges are the contour's edges
    """
    edges = contour.edges if isinstance(contour, Contour) else frozenset(make_edge(*e) for e in contour)
    adjacency: Dict[DualVertex, List[DualVertex]] = {}
    for edge in edges:
        p, q = dual_segment(edge)
        adjacency.setdefault(p, []).append(q)
        adjacency.setdefault(q, []).append(p)
    if not adjacency or any(len(nbs) != 2 for nbs in adjacency.values()):
        raise InvalidCircuitError("Dual of the edge set is not a circuit")

    start = min(adjacency)
    letters = {v: k for k, v in STEPS.items()}
    word = []
    previous, current = start, (start[0], start[1] + 1)
    if current not in adjacency[start]:
        raise InvalidCircuitError("Dual of the edge set is not a circuit")
    word.append("U")
    while current != start:
        a, b = adjacency[current]
        nxt = b if a == previous else a
        word.append(letters[(nxt[0] - current[0], nxt[1] - current[1])])
        previous, current = current, nxt
        if len(word) > len(adjacency):
            raise InvalidCircuitError("Dual walk does not close")
    if len(word) != len(adjacency):
        raise InvalidCircuitError("Dual of the edge set has more than one circuit")
    return DualCircuit(start, "".join(word))


def leftmost_crossing(circuit: DualCircuit) -> Optional[int]:
    """Column k of the leftmost dual edge of the circuit crossing the x-axis (None if it never does)."""
    points = walk(circuit.base, circuit.word)
    columns = [p[0] for p, c in zip(points, circuit.word)
               if (c == "U" and p[1] == 0) or (c == "D" and p[1] == 1)]
    return min(columns) if columns else None


def word_encode(circuit: DualCircuit, require_origin_side: bool = True) -> Tuple[int, str]:
    """
    Canonical word of a circuit.

    The word starts on the leftmost dual edge crossing the x-axis, the edge
    from (k - 1/2, -1/2) to (k - 1/2, 1/2), walked upwards.

    Args:
        circuit: Dual circuit
        require_origin_side: Reject circuits whose leftmost crossing lies to
            the right of the origin (they cannot surround it)

    Returns:
        (k, word) with the circuit based at dual vertex (k, 0)
    """
    k = leftmost_crossing(circuit)
    if k is None:
        raise InvalidCircuitError("Circuit does not cross the x-axis")
    if require_origin_side and k > 0:
        raise InvalidCircuitError(f"Leftmost x-axis crossing at column {k} lies right of the origin")

    for candidate in (circuit, circuit.reversed()):
        points = walk(candidate.base, candidate.word)
        for t, (p, c) in enumerate(zip(points, candidate.word)):
            if c == "U" and p == (k, 0):
                return k, candidate.word[t:] + candidate.word[:t]
    raise InvalidCircuitError("Anchor edge not found")  # unreachable for valid circuits


def word_decode(base: Union[int, DualVertex], word: str) -> DualCircuit:
    """
    Circuit realised by ``word`` from ``base``.

    Args:
        base: Anchor column k (base (k, 0)) or an explicit dual vertex
        word: Steps over {R, L, U, D}

    Returns:
        Validated DualCircuit
    """
    start = (base, 0) if isinstance(base, int) else tuple(base)
    return DualCircuit(start, word)
