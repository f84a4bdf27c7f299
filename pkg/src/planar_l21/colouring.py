"""Two-coloured perfect matchings and coloured orientations.

A two-coloured perfect matching (2CPM) colours every vertex black or white so
that each vertex has exactly one neighbour of its own colour.  The "almost"
variant imposes the constraint only on vertices of degree at least two.
Coloured orientations add a partial edge orientation on exactly the
monochromatic edges, with degree bounds and a special rule for out-vertices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Set, Tuple

from .errors import CapacityError, ValidationError
from .graphs import Edge, Graph, edge_key

BLACK = "B"
WHITE = "W"

FORWARD = "F"  # oriented low id -> high id
BACKWARD = "B"
UNORIENTED = "U"

TwoColouring = Dict[int, str]

ENUMERATION_VERTEX_LIMIT = 60
BITMASK_SWEEP_LIMIT = 20


def _check_total(graph: Graph, colouring: TwoColouring) -> List[int]:
    bits = []
    for v in range(graph.n):
        c = colouring.get(v)
        if c not in (BLACK, WHITE):
            raise ValidationError(f"colouring is not total: vertex {v}")
        bits.append(0 if c == BLACK else 1)
    return bits


def _same_colour_count(graph: Graph, bits: List[int], v: int) -> int:
    return sum(1 for u in graph.neighbours(v) if bits[u] == bits[v])


def verify_2cpm(graph: Graph, colouring: TwoColouring) -> bool:
    """Every vertex has exactly one neighbour of its own colour."""
    bits = _check_total(graph, colouring)
    return all(_same_colour_count(graph, bits, v) == 1 for v in range(graph.n))


def verify_almost_2cpm(graph: Graph, colouring: TwoColouring) -> bool:
    """The 2CPM constraint restricted to vertices of degree at least two."""
    bits = _check_total(graph, colouring)
    return all(
        _same_colour_count(graph, bits, v) == 1
        for v in range(graph.n)
        if graph.degree(v) >= 2
    )


def swap_colours(colouring: TwoColouring) -> TwoColouring:
    return {v: WHITE if c == BLACK else BLACK for v, c in colouring.items()}


class _MatchingSearch:
    """Backtracking with unit propagation over black/white colourings.

    Branch order is BFS from the lowest id of each component, black first;
    the first completion found is therefore canonical.
    """

    def __init__(self, graph: Graph, almost: bool):
        self.graph = graph
        self.almost = almost
        self.order = self._bfs_order()
        self.colour: List[Optional[int]] = [None] * graph.n
        self.counts = [[0] * graph.n, [0] * graph.n]  # decided neighbours by colour
        self.undec = [graph.degree(v) for v in range(graph.n)]
        self.trail: List[int] = []

    def _bfs_order(self) -> List[int]:
        order = []
        seen = [False] * self.graph.n
        for start in range(self.graph.n):
            if seen[start]:
                continue
            seen[start] = True
            queue = [start]
            head = 0
            while head < len(queue):
                u = queue[head]
                head += 1
                order.append(u)
                for w in self.graph.neighbours(u):
                    if not seen[w]:
                        seen[w] = True
                        queue.append(w)
        return order

    def _constrained(self, v: int) -> bool:
        return self.graph.degree(v) >= 2 or not self.almost

    def _dead_choice(self, v: int, c: int) -> bool:
        # colour c at v can no longer end up with exactly one same-coloured
        # neighbour
        return self.counts[c][v] > 1 or (self.counts[c][v] == 0 and self.undec[v] == 0)

    def _examine(self, w: int, queue: List[Tuple[int, int]]) -> bool:
        cw = self.colour[w]
        if cw is not None:
            if not self._constrained(w):
                return True
            same = self.counts[cw][w]
            if same > 1:
                return False
            if same == 0 and self.undec[w] == 0:
                return False
            if self.undec[w] > 0:
                if same == 1:
                    for u in self.graph.neighbours(w):
                        if self.colour[u] is None:
                            queue.append((u, 1 - cw))
                elif same == 0 and self.undec[w] == 1:
                    for u in self.graph.neighbours(w):
                        if self.colour[u] is None:
                            queue.append((u, cw))
            return True
        if not self._constrained(w):
            return True
        dead0 = self._dead_choice(w, 0)
        dead1 = self._dead_choice(w, 1)
        if dead0 and dead1:
            return False
        if dead0:
            queue.append((w, 1))
        elif dead1:
            queue.append((w, 0))
        return True

    def assign(self, v: int, c: int) -> bool:
        queue = [(v, c)]
        while queue:
            v, c = queue.pop()
            if self.colour[v] is not None:
                if self.colour[v] != c:
                    return False
                continue
            self.colour[v] = c
            self.trail.append(v)
            for u in self.graph.neighbours(v):
                self.counts[c][u] += 1
                self.undec[u] -= 1
            if not self._examine(v, queue):
                return False
            for u in self.graph.neighbours(v):
                if not self._examine(u, queue):
                    return False
        return True

    def undo_to(self, mark: int) -> None:
        while len(self.trail) > mark:
            v = self.trail.pop()
            c = self.colour[v]
            self.colour[v] = None
            for u in self.graph.neighbours(v):
                self.counts[c][u] -= 1
                self.undec[u] += 1

    def solutions(self, first_only: bool) -> Iterable[Tuple[int, ...]]:
        if not self.almost and any(self.graph.degree(v) == 0 for v in range(self.graph.n)):
            return  # a vertex with no neighbours can never be matched
        yield from self._search(0, first_only)

    def _search(self, pos: int, first_only: bool):
        n = self.graph.n
        while pos < n and self.colour[self.order[pos]] is not None:
            pos += 1
        if pos == n:
            yield tuple(self.colour)  # fully decided and violation-free
            return
        v = self.order[pos]
        for c in (0, 1):
            mark = len(self.trail)
            if self.assign(v, c):
                found = False
                for sol in self._search(pos + 1, first_only):
                    found = True
                    yield sol
                    if first_only:
                        break
                if first_only and found:
                    self.undo_to(mark)
                    return
            self.undo_to(mark)


def _bits_to_colouring(bits: Tuple[int, ...]) -> TwoColouring:
    return {v: WHITE if b else BLACK for v, b in enumerate(bits)}


def _colouring_key(bits: Tuple[int, ...]) -> int:
    # little-endian: vertex 0 is the least significant bit
    return sum(b << v for v, b in enumerate(bits))


def solve_2cpm(graph: Graph, pinned: Optional[TwoColouring] = None) -> Optional[TwoColouring]:
    """First 2CPM completion respecting the pins, or None.

    Pass ``almost=True`` via `solve_almost_2cpm` for the degree-relaxed
    variant; both search black before white in BFS order.
    """
    return _solve_matching(graph, pinned, almost=False)


def solve_almost_2cpm(graph: Graph, pinned: Optional[TwoColouring] = None) -> Optional[TwoColouring]:
    return _solve_matching(graph, pinned, almost=True)


def _solve_matching(graph: Graph, pinned: Optional[TwoColouring], almost: bool):
    search = _MatchingSearch(graph, almost=almost)
    if pinned:
        for v, c in sorted(pinned.items()):
            if not (0 <= v < graph.n):
                raise ValidationError(f"pinned vertex {v} not in graph")
            if c not in (BLACK, WHITE):
                raise ValidationError(f"bad pinned colour {c!r} at {v}")
            if not search.assign(v, 0 if c == BLACK else 1):
                return None
    for bits in search.solutions(first_only=True):
        return _bits_to_colouring(bits)
    return None


def enumerate_almost_2cpm(graph: Graph) -> List[TwoColouring]:
    """All almost two-coloured perfect matchings, in canonical order."""
    if graph.n > ENUMERATION_VERTEX_LIMIT:
        raise CapacityError(
            f"{graph.n} vertices exceed enumeration limit {ENUMERATION_VERTEX_LIMIT}"
        )
    search = _MatchingSearch(graph, almost=True)
    found = sorted(search.solutions(first_only=False), key=_colouring_key)
    return [_bits_to_colouring(bits) for bits in found]


def enumerate_2cpm_bitmask(graph: Graph) -> List[TwoColouring]:
    """Exhaustive bitmask sweep; the cross-check oracle for small graphs."""
    if graph.n > BITMASK_SWEEP_LIMIT:
        raise CapacityError(f"{graph.n} vertices exceed sweep limit {BITMASK_SWEEP_LIMIT}")
    out = []
    for mask in range(1 << graph.n):
        bits = tuple((mask >> v) & 1 for v in range(graph.n))
        ok = True
        for v in range(graph.n):
            same = sum(1 for u in graph.neighbours(v) if bits[u] == bits[v])
            if same != 1:
                ok = False
                break
        if ok:
            out.append(_bits_to_colouring(bits))
    return out


# ---------------------------------------------------------------------------
# Coloured orientations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ColouredOrientation:
    colouring: Dict[int, str]
    orientation: Dict[Edge, str]  # edge_key -> FORWARD / BACKWARD / UNORIENTED

    def oriented_pairs(self) -> List[Tuple[int, int]]:
        """Directed edges (tail, head) of the oriented part."""
        out = []
        for (u, v), d in sorted(self.orientation.items()):
            if d == FORWARD:
                out.append((u, v))
            elif d == BACKWARD:
                out.append((v, u))
        return out


def _check_orientation_structure(graph: Graph, co: ColouredOrientation) -> None:
    bits = _check_total(graph, co.colouring)
    for e in graph.sorted_edges():
        d = co.orientation.get(e)
        if d not in (FORWARD, BACKWARD, UNORIENTED):
            raise ValidationError(f"edge {e} has no orientation entry")
        u, v = e
        if bits[u] != bits[v] and d != UNORIENTED:
            raise ValidationError(f"dichromatic edge {e} carries an orientation")
    for e in co.orientation:
        if e not in graph.edges:
            raise ValidationError(f"orientation names foreign edge {e}")


def verify_coloured_orientation(
    graph: Graph, co: ColouredOrientation, out_vertices: Set[int]
) -> bool:
    """Check the four defining conditions of a coloured orientation.

    An orientation entry on a dichromatic edge is malformed input and raises;
    a monochromatic edge left unoriented merely fails the check.
    """
    _check_orientation_structure(graph, co)
    bits = [0 if co.colouring[v] == BLACK else 1 for v in range(graph.n)]
    for v in range(graph.n):
        opposite = sum(1 for u in graph.neighbours(v) if bits[u] != bits[v])
        if opposite > 1:
            return False
    for u, v in graph.sorted_edges():
        if bits[u] == bits[v] and co.orientation[(u, v)] == UNORIENTED:
            return False
    indeg = [0] * graph.n
    outdeg = [0] * graph.n
    for tail, head in co.oriented_pairs():
        outdeg[tail] += 1
        indeg[head] += 1
    for v in range(graph.n):
        if v in out_vertices:
            if indeg[v] != 0:
                return False
        else:
            if indeg[v] > 1 or outdeg[v] > 2:
                return False
    return True


def is_good_orientation(graph: Graph, co: ColouredOrientation, out_vertices: Set[int]) -> bool:
    """Good: every degree-3 vertex has one opposite-colour neighbour and
    indegree = outdegree = 1."""
    if not verify_coloured_orientation(graph, co, out_vertices):
        raise ValidationError("input is not a coloured orientation")
    bits = [0 if co.colouring[v] == BLACK else 1 for v in range(graph.n)]
    indeg = [0] * graph.n
    outdeg = [0] * graph.n
    for tail, head in co.oriented_pairs():
        outdeg[tail] += 1
        indeg[head] += 1
    for v in range(graph.n):
        if graph.degree(v) != 3:
            continue
        opposite = sum(1 for u in graph.neighbours(v) if bits[u] != bits[v])
        if opposite != 1 or indeg[v] != 1 or outdeg[v] != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def colouring_to_json(colouring: TwoColouring) -> str:
    return json.dumps({"colours": {str(v): c for v, c in colouring.items()}}, sort_keys=True) + "\n"


def colouring_from_json(text: str) -> TwoColouring:
    doc = json.loads(text)
    return {int(v): c for v, c in doc["colours"].items()}


def orientation_to_json(co: ColouredOrientation) -> str:
    doc = {
        "colours": {str(v): c for v, c in co.colouring.items()},
        "edges": {f"{u}-{v}": d for (u, v), d in co.orientation.items()},
    }
    return json.dumps(doc, sort_keys=True) + "\n"


def orientation_from_json(text: str) -> ColouredOrientation:
    doc = json.loads(text)
    colouring = {int(v): c for v, c in doc["colours"].items()}
    orientation = {}
    for key, d in doc["edges"].items():
        u, v = key.split("-")
        orientation[edge_key(int(u), int(v))] = d
    return ColouredOrientation(colouring, orientation)
