"""Explicit fiber graphs, their weight orientation, and export formats.

Vertices are the fiber tables under their canonical dense ids; two vertices
are adjacent when one move maps one table to the other.  Adjacency is built
by applying every basis move at every vertex and hashing the result into the
fiber index, which is O(|V| * n^4) instead of O(|V|^2).

Orienting every edge toward the strictly smaller value of a weight vector
turns the graph into a DAG; with the standard weight (row + col)^2 the DAG
has a unique sink, located at the anti-diagonal table.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple

from .enumeration import Fiber
from .errors import SizeLimitExceededError, UnsupportedFormatError, ZeroWeightEdgeError
from .tables import ContingencyTable, MarkovMove, enumerate_basis_moves, apply_move, is_valid_move

DOT_VERTEX_LIMIT = 500


class EdgeOut(NamedTuple):
    neighbor: int
    move: MarkovMove  # canonically least move mapping this vertex to neighbor
    multiplicity: int  # number of distinct basis moves connecting the pair


@dataclass(frozen=True)
class FiberGraph:
    """Undirected simple graph on a fiber with move-labelled edges."""

    fiber: Fiber
    adjacency: tuple[tuple[EdgeOut, ...], ...]
    _neighbor_ids: tuple[tuple[int, ...], ...] = field(repr=False, compare=False, default=())

    def __post_init__(self) -> None:
        if not self._neighbor_ids:
            ids = tuple(tuple(e.neighbor for e in row) for row in self.adjacency)
            object.__setattr__(self, "_neighbor_ids", ids)

    @property
    def vertex_count(self) -> int:
        return len(self.fiber)

    @property
    def edge_count(self) -> int:
        return sum(len(row) for row in self.adjacency) // 2

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def degrees(self) -> list[int]:
        return [len(row) for row in self.adjacency]

    def neighbor_lists(self) -> tuple[tuple[int, ...], ...]:
        """Plain adjacency (neighbor ids only), for the graph algorithms."""
        return self._neighbor_ids

    def edges(self) -> list[tuple[int, int, int]]:
        """Sorted (u, v, multiplicity) triples with u < v."""
        out = []
        for u, row in enumerate(self.adjacency):
            for e in row:
                if u < e.neighbor:
                    out.append((u, e.neighbor, e.multiplicity))
        return out


def build_graph(fiber: Fiber) -> FiberGraph:
    """Adjacency of the fiber graph: v adjacent to u iff v = u + m for a basis move m."""
    n = fiber.n
    if n < 2 or len(fiber) == 0:
        return FiberGraph(fiber, tuple(() for _ in fiber))
    moves = enumerate_basis_moves(n)
    adjacency: list[tuple[EdgeOut, ...]] = []
    for t in fiber:
        by_neighbor: dict[int, list[MarkovMove]] = {}
        for m in moves:
            if is_valid_move(t, m):
                v = fiber.index_of(apply_move(t, m))
                by_neighbor.setdefault(v, []).append(m)
        adjacency.append(
            tuple(
                EdgeOut(v, min(ms), len(ms))
                for v, ms in sorted(by_neighbor.items())
            )
        )
    return FiberGraph(fiber, tuple(adjacency))


@dataclass(frozen=True)
class WeightVector:
    """Cell weights used to orient edges; w[i][j] is 1-based via construction."""

    n: int
    w: tuple[tuple[int, ...], ...]

    @classmethod
    def standard(cls, n: int) -> "WeightVector":
        """The (row + col)^2 weight, 1-based: symmetric and strictly increasing."""
        return cls(n, tuple(
            tuple((i + j + 2) ** 2 for j in range(n)) for i in range(n)
        ))

    def negate(self) -> "WeightVector":
        return WeightVector(self.n, tuple(tuple(-x for x in row) for row in self.w))

    def dot(self, t: ContingencyTable) -> int:
        return sum(
            self.w[i][j] * t.entries[i][j] for i in range(self.n) for j in range(self.n)
        )

    def move_weight(self, m: MarkovMove) -> int:
        """w . (move as matrix); the weight change along an edge using this move."""
        total = 0
        for (i, j) in m.added_cells():
            total += self.w[i][j]
        for (i, j) in m.subtracted_cells():
            total -= self.w[i][j]
        return total


@dataclass(frozen=True)
class OrientedFiberGraph:
    """Edge orientation of a fiber graph: u -> v whenever w.(v - u) < 0."""

    base: FiberGraph
    weight: WeightVector
    out_edges: tuple[tuple[int, ...], ...]

    def out_degree(self, u: int) -> int:
        return len(self.out_edges[u])


def orient(graph: FiberGraph, w: WeightVector) -> OrientedFiberGraph:
    """Direct every edge toward the strictly smaller w-value.

    Raises ZeroWeightEdgeError when some edge has weight change 0 (the
    weight vector then does not induce an orientation).  Any successful
    orientation is automatically acyclic: w.v strictly decreases along
    every directed edge.
    """
    if w.n != graph.fiber.n:
        raise ZeroWeightEdgeError(
            f"weight vector is for n={w.n}, graph is for n={graph.fiber.n}"
        )
    out: list[list[int]] = [[] for _ in range(graph.vertex_count)]
    for u, row in enumerate(graph.adjacency):
        for e in row:
            delta = w.move_weight(e.move)
            if delta == 0:
                raise ZeroWeightEdgeError(
                    f"edge {u} -- {e.neighbor} has zero weight change under w"
                )
            if delta < 0:
                out[u].append(e.neighbor)
    return OrientedFiberGraph(graph, w, tuple(tuple(sorted(o)) for o in out))


def find_sinks(og: OrientedFiberGraph) -> list[int]:
    """Vertex ids with out-degree 0."""
    return [u for u, o in enumerate(og.out_edges) if not o]


def is_acyclic(og: OrientedFiberGraph) -> bool:
    """Kahn topological sort; True when every vertex gets ordered."""
    n = len(og.out_edges)
    indeg = [0] * n
    for outs in og.out_edges:
        for v in outs:
            indeg[v] += 1
    queue = [u for u in range(n) if indeg[u] == 0]
    seen = 0
    while queue:
        u = queue.pop()
        seen += 1
        for v in og.out_edges[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    return seen == n


def export_graph(graph: FiberGraph | OrientedFiberGraph, fmt: str) -> str:
    """Deterministic rendering of a graph.

    ``edge-list``: one line per edge, "u v" (plus a multiplicity column when
    it exceeds 1); directed graphs list u -> v pairs.  ``dot``: Graphviz
    source with tables as node labels, guarded to 500 vertices.
    """
    oriented = isinstance(graph, OrientedFiberGraph)
    base = graph.base if oriented else graph
    if fmt == "edge-list":
        lines = []
        if oriented:
            for u, outs in enumerate(graph.out_edges):
                for v in outs:
                    lines.append(f"{u} {v}")
        else:
            for u, v, mult in base.edges():
                lines.append(f"{u} {v}" if mult == 1 else f"{u} {v} {mult}")
        return "\n".join(lines) + ("\n" if lines else "")
    if fmt == "dot":
        if base.vertex_count > DOT_VERTEX_LIMIT:
            raise SizeLimitExceededError(DOT_VERTEX_LIMIT, context="dot export")
        name = "digraph" if oriented else "graph"
        arrow = "->" if oriented else "--"
        lines = [f"{name} fiber {{"]
        for u, t in enumerate(base.fiber):
            label = "\\n".join(" ".join(str(x) for x in row) for row in t.entries)
            lines.append(f'  {u} [label="{label}"];')
        if oriented:
            for u, outs in enumerate(graph.out_edges):
                for v in outs:
                    lines.append(f"  {u} {arrow} {v};")
        else:
            for u, v, _ in base.edges():
                lines.append(f"  {u} {arrow} {v};")
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise UnsupportedFormatError(f"unknown graph format {fmt!r}")


def vertex_map_json(graph: FiberGraph | OrientedFiberGraph) -> str:
    """Sidecar JSON mapping vertex id -> table rows, for the edge-list export."""
    base = graph.base if isinstance(graph, OrientedFiberGraph) else graph
    return json.dumps(
        {str(u): t.rows() for u, t in enumerate(base.fiber)},
        separators=(",", ":"),
    )
