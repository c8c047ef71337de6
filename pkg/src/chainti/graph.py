"""Append-only undirected simple graph used to realize chain growth."""

from __future__ import annotations


class GraphError(ValueError):
    """Raised on an invalid vertex id, a self-loop or a duplicate edge."""


class Graph:
    """Undirected simple graph on dense integer vertex ids.

    Vertices are numbered ``0..vertex_count-1`` in creation order. Edges can
    only be added, never removed.
    """

    __slots__ = ("adjacency", "_n_edges", "_ends")

    def __init__(self, vertex_count: int = 0):
        if vertex_count < 0:
            raise GraphError(f"vertex_count must be non-negative, got {vertex_count}")
        self.adjacency: list[list[int]] = [[] for _ in range(vertex_count)]
        self._n_edges = 0
        # endpoints in insertion order, for vectorized index evaluation
        self._ends: tuple[list[int], list[int]] = ([], [])

    @property
    def vertex_count(self) -> int:
        return len(self.adjacency)

    @property
    def edge_count(self) -> int:
        return self._n_edges

    def add_vertices(self, k: int) -> list[int]:
        """Append ``k`` isolated vertices and return their ids."""
        start = len(self.adjacency)
        self.adjacency.extend([] for _ in range(k))
        return list(range(start, start + k))

    def _check(self, v: int) -> None:
        if not 0 <= v < len(self.adjacency):
            raise GraphError(f"invalid vertex id {v}")

    def add_edge(self, u: int, v: int) -> None:
        self._check(u)
        self._check(v)
        if u == v:
            raise GraphError(f"self-loop at vertex {u}")
        au = self.adjacency[u]
        if v in au:
            raise GraphError(f"duplicate edge ({min(u, v)}, {max(u, v)})")
        au.append(v)
        self.adjacency[v].append(u)
        self._n_edges += 1
        self._ends[0].append(u)
        self._ends[1].append(v)

    def add_cycle(self, vertices) -> None:
        """Add edges along ``vertices`` in cyclic order (last joins first)."""
        vertices = list(vertices)
        if len(vertices) < 3:
            raise GraphError("a cycle needs at least 3 vertices")
        for v in vertices:
            self._check(v)
        pairs = list(zip(vertices, vertices[1:] + vertices[:1]))
        # validate everything first so a failed call leaves the graph untouched
        seen = set()
        for u, v in pairs:
            key = (min(u, v), max(u, v))
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if key in seen or v in self.adjacency[u]:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
        for u, v in pairs:
            self.add_edge(u, v)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency]

    def degree_multiset(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for a in self.adjacency:
            counts[len(a)] = counts.get(len(a), 0) + 1
        return dict(sorted(counts.items()))

    def edge_list(self) -> list[tuple[int, int]]:
        """Every edge once as ``(min, max)``, sorted lexicographically."""
        out = []
        for u, nbrs in enumerate(self.adjacency):
            for v in sorted(nbrs):
                if u < v:
                    out.append((u, v))
        return out

    def edge_endpoints(self) -> tuple[list[int], list[int]]:
        """Two parallel lists of edge endpoints in insertion order."""
        return self._ends

    def copy(self) -> "Graph":
        g = Graph()
        g.adjacency = [list(a) for a in self.adjacency]
        g._n_edges = self._n_edges
        g._ends = (list(self._ends[0]), list(self._ends[1]))
        return g

    def to_csv_lines(self) -> list[str]:
        return [f"{u},{v}" for u, v in self.edge_list()]

    def __repr__(self) -> str:
        return f"Graph(vertices={self.vertex_count}, edges={self.edge_count})"


def new_graph(vertex_count: int) -> Graph:
    return Graph(vertex_count)
