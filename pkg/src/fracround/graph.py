"""Graphs, sparse fixed-point edge vectors and matchings."""
from __future__ import annotations

from collections import deque
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .errors import InputError, StructuralError
from .fixedpoint import ONE, to_fraction


class DynGraph:
    """Simple undirected graph on vertices 0..n-1 with stable edge ids.

    Each vertex keeps an insertion-ordered dict of incident edge ids, which
    gives O(1) insert and O(1) remove by id.
    """

    def __init__(self, n: int, side: Optional[list[int]] = None):
        if n < 0:
            raise InputError("vertex count must be nonnegative")
        if side is not None and len(side) != n:
            raise InputError("side assignment must cover every vertex")
        self.n = n
        self.side = list(side) if side is not None else None
        self._ends: dict[int, tuple[int, int]] = {}
        self._pair: dict[tuple[int, int], int] = {}
        self._adj: list[dict[int, None]] = [{} for _ in range(n)]
        self._next_id = 0

    @classmethod
    def from_edges(cls, n, pairs: Iterable[tuple[int, int]], side=None) -> "DynGraph":
        g = cls(n, side)
        for u, v in pairs:
            g.add_edge(u, v)
        return g

    @property
    def m(self) -> int:
        return len(self._ends)

    @property
    def bipartite(self) -> bool:
        return self.side is not None

    def _check_vertex(self, v):
        if not (0 <= v < self.n):
            raise InputError(f"vertex {v} out of range 0..{self.n - 1}")

    def add_edge(self, u: int, v: int) -> int:
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            raise InputError(f"self-loop at vertex {u}")
        key = (u, v) if u < v else (v, u)
        if key in self._pair:
            raise InputError(f"edge {key} already present")
        if self.side is not None and self.side[u] == self.side[v]:
            raise InputError(f"edge {key} does not cross the bipartition")
        eid = self._next_id
        self._next_id += 1
        self._ends[eid] = key
        self._pair[key] = eid
        self._adj[u][eid] = None
        self._adj[v][eid] = None
        return eid

    def ensure_edge(self, u: int, v: int) -> int:
        eid = self.edge_id(u, v)
        return self.add_edge(u, v) if eid is None else eid

    def remove_edge(self, eid: int) -> None:
        u, v = self._ends.pop(eid)
        del self._pair[(u, v)]
        del self._adj[u][eid]
        del self._adj[v][eid]

    def edge_id(self, u: int, v: int) -> Optional[int]:
        return self._pair.get((u, v) if u < v else (v, u))

    def has_edge(self, eid: int) -> bool:
        return eid in self._ends

    def endpoints(self, eid: int) -> tuple[int, int]:
        return self._ends[eid]

    def incident(self, v: int) -> Iterable[int]:
        return self._adj[v].keys()

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def edges(self) -> Iterator[int]:
        return iter(self._ends)

    def edge_pairs(self) -> Iterator[tuple[int, tuple[int, int]]]:
        return iter(self._ends.items())

    def two_coloring(self) -> Optional[list[int]]:
        """Declared sides, or a BFS 2-coloring, or None if an odd cycle exists."""
        if self.side is not None:
            return list(self.side)
        color = [-1] * self.n
        for s in range(self.n):
            if color[s] >= 0:
                continue
            color[s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for e in self._adj[u]:
                    a, b = self._ends[e]
                    w = b if a == u else a
                    if color[w] < 0:
                        color[w] = 1 - color[u]
                        queue.append(w)
                    elif color[w] == color[u]:
                        return None
        return color

    def copy(self) -> "DynGraph":
        g = DynGraph(self.n, self.side)
        g._ends = dict(self._ends)
        g._pair = dict(self._pair)
        g._adj = [dict(a) for a in self._adj]
        g._next_id = self._next_id
        return g


class FracVector:
    """Sparse nonnegative edge vector with cached norm and vertex loads.

    Values are fixed-point numerators over 2**52; zero entries are not stored.
    """

    __slots__ = ("graph", "_w", "_load", "_norm")

    def __init__(self, graph: DynGraph, values: Optional[dict[int, int]] = None):
        self.graph = graph
        self._w: dict[int, int] = {}
        self._load = [0] * graph.n
        self._norm = 0
        if values:
            for e, w in values.items():
                self.set(e, w)

    def get(self, e: int) -> int:
        return self._w.get(e, 0)

    def __getitem__(self, e: int) -> int:
        return self._w.get(e, 0)

    def __contains__(self, e: int) -> bool:
        return e in self._w

    def __len__(self) -> int:
        return len(self._w)

    def set(self, e: int, w: int) -> int:
        """Set x_e = w and return the previous value."""
        if w < 0:
            raise InputError(f"negative weight on edge {e}")
        if not self.graph.has_edge(e):
            raise StructuralError(f"edge {e} is not in the graph")
        old = self._w.get(e, 0)
        if old == w:
            return old
        u, v = self.graph.endpoints(e)
        d = w - old
        self._load[u] += d
        self._load[v] += d
        self._norm += d
        if w:
            self._w[e] = w
        else:
            del self._w[e]
        return old

    def support(self):
        return self._w.keys()

    def items(self):
        return self._w.items()

    @property
    def norm(self) -> int:
        return self._norm

    def norm_fraction(self) -> Fraction:
        return to_fraction(self._norm)

    def load(self, v: int) -> int:
        return self._load[v]

    @property
    def loads(self) -> list[int]:
        return self._load

    def min_weight(self) -> int:
        return min(self._w.values()) if self._w else 0

    def uniform_weight(self) -> Optional[int]:
        """The common value if every support entry is equal, else None."""
        vals = iter(self._w.values())
        first = next(vals, None)
        if first is None:
            return None
        for w in vals:
            if w != first:
                return None
        return first

    def copy(self) -> "FracVector":
        y = FracVector.__new__(FracVector)
        y.graph = self.graph
        y._w = dict(self._w)
        y._load = list(self._load)
        y._norm = self._norm
        return y

    def restrict(self, edges: Iterable[int]) -> "FracVector":
        y = FracVector(self.graph)
        for e in edges:
            w = self._w.get(e)
            if w:
                y.set(e, w)
        return y

    def is_fractional_matching(self) -> bool:
        return all(load <= ONE for load in self._load)

    def cache_consistent(self) -> bool:
        load = [0] * self.graph.n
        for e, w in self._w.items():
            u, v = self.graph.endpoints(e)
            load[u] += w
            load[v] += w
        return load == self._load and sum(self._w.values()) == self._norm

    def as_fractions(self) -> dict[int, Fraction]:
        return {e: to_fraction(w) for e, w in self._w.items()}

    def __eq__(self, other) -> bool:
        return isinstance(other, FracVector) and self._w == other._w

    def __repr__(self) -> str:
        return f"FracVector(support={len(self._w)}, norm={float(to_fraction(self._norm)):.6g})"


class Matching:
    """Set of vertex-disjoint edges with a per-vertex matched-edge index."""

    def __init__(self, graph: DynGraph, edges: Iterable[int] = ()):
        self.graph = graph
        self.edges: set[int] = set()
        self.mate: dict[int, int] = {}
        for e in edges:
            self.add(e)

    def add(self, e: int) -> None:
        u, v = self.graph.endpoints(e)
        for w in (u, v):
            if w in self.mate:
                raise InputError(f"vertex {w} already matched by edge {self.mate[w]}")
        self.edges.add(e)
        self.mate[u] = e
        self.mate[v] = e

    def remove(self, e: int) -> None:
        u, v = self.graph.endpoints(e)
        self.edges.remove(e)
        del self.mate[u]
        del self.mate[v]

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, e) -> bool:
        return e in self.edges

    def __iter__(self):
        return iter(self.edges)


def is_matching(graph: DynGraph, edges: Iterable[int]) -> bool:
    seen = set()
    for e in edges:
        for w in graph.endpoints(e):
            if w in seen:
                return False
            seen.add(w)
    return True
