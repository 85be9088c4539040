"""Distances, connectivity, common moves, and detour-path structure of fiber graphs.

Everything here runs on plain adjacency lists, so the same machinery serves
fiber graphs, the double-cube counterexample graph, and the random graphs the
test oracles throw at it.  Local connectivity is Menger's count of internally
vertex-disjoint paths, computed as unit-capacity max-flow on the vertex-split
network.  Global vertex connectivity uses the classical exact scheme: one
minimum-degree vertex against all its non-neighbors, then all non-adjacent
pairs among its neighbors.
"""

from __future__ import annotations

import multiprocessing
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import (
    AdjacentPairError,
    DisconnectedGraphError,
    InvalidDimensionError,
    NotDistanceTwoError,
)
from .graphs import FiberGraph, OrientedFiberGraph
from .tables import (
    ContingencyTable,
    MarkovMove,
    apply_move,
    enumerate_basis_moves,
    is_valid_move,
    move_from_difference,
    scaled_permutation,
    valid_moves,
)

AdjacencyList = Sequence[Sequence[int]]
GraphLike = Union[FiberGraph, OrientedFiberGraph, AdjacencyList]


def adjacency_of(graph: GraphLike) -> tuple[tuple[int, ...], ...]:
    """Normalize any supported graph input to immutable adjacency lists."""
    if isinstance(graph, OrientedFiberGraph):
        return graph.base.neighbor_lists()
    if isinstance(graph, FiberGraph):
        return graph.neighbor_lists()
    return tuple(tuple(row) for row in graph)


# --- distances ---

def bfs_distances(graph: GraphLike, source: int) -> list[int]:
    """Shortest-path distances from source; -1 marks unreachable vertices."""
    adj = adjacency_of(graph)
    dist = [-1] * len(adj)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def distance_between(graph: GraphLike, u: int, v: int) -> int:
    """BFS distance from u to v, -1 when unreachable."""
    if u == v:
        return 0
    adj = adjacency_of(graph)
    dist = [-1] * len(adj)
    dist[u] = 0
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                if y == v:
                    return dist[y]
                queue.append(y)
    return -1


def _csr(adj: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    indptr = np.zeros(len(adj) + 1, dtype=np.int64)
    for u, row in enumerate(adj):
        indptr[u + 1] = indptr[u] + len(row)
    indices = np.empty(int(indptr[-1]), dtype=np.int64)
    for u, row in enumerate(adj):
        indices[indptr[u]:indptr[u + 1]] = row
    return indptr, indices


def diameter(graph: GraphLike) -> int:
    """Largest BFS distance over all source vertices.

    Vectorized frontier expansion over a CSR layout keeps the all-sources
    sweep fast enough for desk-scale fibers (thousands of vertices).
    Raises DisconnectedGraphError when some pair is unreachable.
    """
    adj = adjacency_of(graph)
    n = len(adj)
    if n == 0:
        raise InvalidDimensionError("diameter of an empty graph is undefined")
    if n == 1:
        return 0
    indptr, indices = _csr(adj)
    best = 0
    for s in range(n):
        dist = np.full(n, -1, dtype=np.int64)
        dist[s] = 0
        frontier = np.array([s], dtype=np.int64)
        level = 0
        while frontier.size:
            level += 1
            starts = indptr[frontier]
            counts = indptr[frontier + 1] - starts
            total = int(counts.sum())
            if total == 0:
                break
            prev = np.cumsum(counts) - counts
            flat = np.repeat(starts - prev, counts) + np.arange(total)
            nbrs = indices[flat]
            fresh = nbrs[dist[nbrs] < 0]
            if fresh.size == 0:
                break
            frontier = np.unique(fresh)
            dist[frontier] = level
        if (dist < 0).any():
            raise DisconnectedGraphError(
                f"vertex {int(np.flatnonzero(dist < 0)[0])} unreachable from {s}"
            )
        best = max(best, int(dist.max()))
    return best


def diameter_witness_pair(n: int, r: int) -> tuple[ContingencyTable, ContingencyTable]:
    """The pair (r*I, r*P), P the n-cycle sending row i to column i-1, at distance (n-1)r."""
    if n < 2:
        raise InvalidDimensionError(f"need n >= 2, got {n}")
    identity = scaled_permutation(n, r, list(range(n)))
    cycle = scaled_permutation(n, r, [(i - 1) % n for i in range(n)])
    return identity, cycle


def is_connected(graph: GraphLike) -> bool:
    adj = adjacency_of(graph)
    if len(adj) == 0:
        return True
    return all(d >= 0 for d in bfs_distances(adj, 0))


# --- local connectivity via vertex-split max-flow ---

class SplitNetwork:
    """Unit-capacity flow network with every vertex split into in/out halves.

    Built once per graph; each query copies the capacity template.  Flow from
    u_out to v_in equals the number of internally vertex-disjoint u-v paths.
    """

    def __init__(self, adj: Sequence[Sequence[int]]):
        n = len(adj)
        self.n = n
        self.arc_to: list[int] = []
        self.arc_cap: list[int] = []
        self.node_arcs: list[list[int]] = [[] for _ in range(2 * n)]

        def add(u: int, v: int, cap: int) -> None:
            self.node_arcs[u].append(len(self.arc_to))
            self.arc_to.append(v)
            self.arc_cap.append(cap)
            self.node_arcs[v].append(len(self.arc_to))
            self.arc_to.append(u)
            self.arc_cap.append(0)

        for x in range(n):
            add(2 * x, 2 * x + 1, 1)  # x_in -> x_out
        for x in range(n):
            for y in adj[x]:
                add(2 * x + 1, 2 * y, 1)  # x_out -> y_in

    def max_flow(
        self, s: int, t: int, bound: int | None = None
    ) -> tuple[int, list[int] | None]:
        """Flow value from s_out to t_in, capped at ``bound`` when given.

        Returns (flow, residual_caps); residual_caps is None when the search
        stopped at the bound (the true value may be larger).
        """
        caps = self.arc_cap.copy()
        source, sink = 2 * s + 1, 2 * t
        arc_to, node_arcs = self.arc_to, self.node_arcs
        flow = 0
        while bound is None or flow < bound:
            parent_arc = [-1] * (2 * self.n)
            parent_arc[source] = -2
            queue = deque([source])
            reached = False
            while queue and not reached:
                x = queue.popleft()
                for a in node_arcs[x]:
                    if caps[a] > 0:
                        y = arc_to[a]
                        if parent_arc[y] == -1:
                            parent_arc[y] = a
                            if y == sink:
                                reached = True
                                break
                            queue.append(y)
            if not reached:
                return flow, caps
            x = sink
            while x != source:
                a = parent_arc[x]
                caps[a] -= 1
                caps[a ^ 1] += 1
                x = arc_to[a ^ 1]
            flow += 1
        return flow, None

    def min_cut_vertices(self, caps: list[int], s: int) -> frozenset[int]:
        """Split vertices whose in-half is residual-reachable from s_out but whose
        out-half is not: exactly the vertices of a minimum vertex cut."""
        source = 2 * s + 1
        seen = [False] * (2 * self.n)
        seen[source] = True
        queue = deque([source])
        while queue:
            x = queue.popleft()
            for a in self.node_arcs[x]:
                if caps[a] > 0 and not seen[self.arc_to[a]]:
                    seen[self.arc_to[a]] = True
                    queue.append(self.arc_to[a])
        return frozenset(
            x for x in range(self.n) if seen[2 * x] and not seen[2 * x + 1]
        )


def local_connectivity(graph: GraphLike, u: int, v: int) -> int:
    """Maximum number of internally vertex-disjoint u-v paths (u, v non-adjacent)."""
    adj = adjacency_of(graph)
    if u == v:
        raise InvalidDimensionError("local connectivity needs two distinct vertices")
    if v in adj[u]:
        raise AdjacentPairError(
            f"vertices {u} and {v} are adjacent; the split-network reduction "
            "does not define their local connectivity"
        )
    flow, _ = SplitNetwork(adj).max_flow(u, v)
    return flow


# --- global vertex connectivity ---

@dataclass(frozen=True)
class ConnectivityReport:
    kappa: int
    witness_cut: frozenset[int] | None  # None only for complete graphs
    min_degree: int
    conjecture_holds: bool  # kappa == min_degree
    complete: bool = False


def _is_complete(adj: Sequence[Sequence[int]]) -> bool:
    n = len(adj)
    return all(len(set(row)) == n - 1 for row in adj)


def _connectivity_pairs(adj: Sequence[Sequence[int]]) -> tuple[int, list[tuple[int, int]]]:
    """The certifying pair family: a minimum-degree vertex s0 vs all its
    non-neighbors, then all non-adjacent pairs inside N(s0)."""
    degrees = [len(row) for row in adj]
    s0 = min(range(len(adj)), key=lambda x: (degrees[x], x))
    nbrs = set(adj[s0])
    pairs = [(s0, w) for w in range(len(adj)) if w != s0 and w not in nbrs]
    sorted_nbrs = sorted(nbrs)
    adj_sets = [set(row) for row in adj]
    for a in range(len(sorted_nbrs)):
        for b in range(a + 1, len(sorted_nbrs)):
            x, y = sorted_nbrs[a], sorted_nbrs[b]
            if y not in adj_sets[x]:
                pairs.append((x, y))
    return s0, pairs


_POOL_NETWORK: SplitNetwork | None = None


def _pool_init(adj: tuple[tuple[int, ...], ...]) -> None:
    global _POOL_NETWORK
    _POOL_NETWORK = SplitNetwork(adj)


def _pool_flow(job: tuple[int, int, int | None]) -> int:
    s, t, bound = job
    assert _POOL_NETWORK is not None
    flow, _ = _POOL_NETWORK.max_flow(s, t, bound)
    return flow


def _pair_flows(
    adj: tuple[tuple[int, ...], ...],
    pairs: list[tuple[int, int]],
    bound: int | None,
    workers: int,
) -> list[int]:
    """Flow value per pair, each capped at ``bound``; deterministic order.

    With workers > 1 the pairs are evaluated in a fork-based process pool and
    merged in submission order, so results do not depend on scheduling.
    """
    if workers <= 1 or len(pairs) < 4:
        net = SplitNetwork(adj)
        out = []
        cap = bound
        for s, t in pairs:
            flow, _ = net.max_flow(s, t, cap)
            out.append(flow)
            if cap is not None and flow < cap:
                cap = flow  # the running minimum caps later searches
        return out
    try:
        ctx = multiprocessing.get_context("fork")
    except ValueError:
        return _pair_flows(adj, pairs, bound, workers=1)
    jobs = [(s, t, bound) for s, t in pairs]
    with ProcessPoolExecutor(
        max_workers=workers, mp_context=ctx, initializer=_pool_init, initargs=(adj,)
    ) as pool:
        chunk = max(1, len(jobs) // (workers * 4))
        return list(pool.map(_pool_flow, jobs, chunksize=chunk))


def vertex_connectivity(graph: GraphLike, workers: int = 1) -> ConnectivityReport:
    """Exact vertex connectivity with a verified witness cut.

    Complete graphs get kappa = |V| - 1 and no cut; disconnected graphs get
    kappa = 0 with the empty cut.  Otherwise kappa is the minimum local
    connectivity over the certifying pair family, and the witness cut is
    re-checked by BFS before returning.
    """
    adj = adjacency_of(graph)
    n = len(adj)
    if n < 2:
        raise InvalidDimensionError("connectivity needs at least two vertices")
    min_degree = min(len(row) for row in adj)
    if not is_connected(adj):
        return ConnectivityReport(0, frozenset(), min_degree, min_degree == 0)
    if _is_complete(adj):
        return ConnectivityReport(n - 1, None, min_degree, min_degree == n - 1, complete=True)

    s0, pairs = _connectivity_pairs(adj)
    kappa = len(adj[s0])
    flows = _pair_flows(adj, pairs, bound=kappa, workers=workers)
    min_pair: tuple[int, int] | None = None
    for pair, flow in zip(pairs, flows):
        if flow < kappa:
            kappa = flow
            min_pair = pair

    if min_pair is None:
        # kappa equals the minimum degree; the neighborhood of s0 is a cut
        witness = frozenset(adj[s0])
    else:
        net = SplitNetwork(adj)
        _, caps = net.max_flow(min_pair[0], min_pair[1])
        assert caps is not None
        witness = net.min_cut_vertices(caps, min_pair[0])

    assert len(witness) == kappa, "witness cut size disagrees with kappa"
    assert not _connected_after_removal(adj, witness), "witness cut does not disconnect"
    return ConnectivityReport(kappa, witness, min_degree, kappa == min_degree)


def _connected_after_removal(adj: Sequence[Sequence[int]], removed: frozenset[int]) -> bool:
    n = len(adj)
    alive = [x for x in range(n) if x not in removed]
    if len(alive) <= 1:
        return True
    seen = {alive[0]}
    queue = deque([alive[0]])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in removed and y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen) == len(alive)


# --- Liu's criterion and distance-2 structure ---

def distance_two_pairs(graph: GraphLike) -> list[tuple[int, int]]:
    """All unordered pairs at distance exactly 2, via two-hop neighborhoods."""
    adj = adjacency_of(graph)
    adj_sets = [set(row) for row in adj]
    pairs = []
    for u in range(len(adj)):
        two_hop: set[int] = set()
        for x in adj[u]:
            two_hop.update(adj[x])
        for w in sorted(two_hop):
            if w > u and w not in adj_sets[u]:
                pairs.append((u, w))
    return pairs


@dataclass(frozen=True)
class LiuCheckResult:
    passed: bool
    threshold: int
    min_pair: tuple[int, int] | None
    min_value: int | None  # None when the graph has no distance-2 pair


def liu_check(graph: GraphLike, k: int, workers: int = 1) -> LiuCheckResult:
    """Check the k-disjoint-paths hypothesis over every distance-2 pair.

    Returns the minimizing pair and its exact disjoint-path count; passed is
    True when that minimum is >= k (vacuously true without distance-2 pairs).
    """
    adj = adjacency_of(graph)
    pairs = distance_two_pairs(adj)
    if not pairs:
        return LiuCheckResult(True, k, None, None)
    # min(deg u, deg v) over the pairs bounds the minimum from above, so
    # capping every search there keeps the reported minimum exact
    degrees = [len(row) for row in adj]
    cap = min(min(degrees[s], degrees[t]) for s, t in pairs)
    if workers > 1:
        flows = _pair_flows(adj, pairs, bound=cap, workers=workers)
    else:
        # adaptive: once some pair realizes the running minimum, later pairs
        # only need to reach it
        net = SplitNetwork(adj)
        flows = []
        for s, t in pairs:
            flow, _ = net.max_flow(s, t, cap)
            flows.append(flow)
            cap = min(cap, flow)
    best = min(flows)
    # a capped pair can report the minimum without attaining it; re-verify
    # candidates uncapped until one's exact flow equals the minimum
    net = SplitNetwork(adj)
    min_pair = None
    for pair, flow in zip(pairs, flows):
        if flow == best:
            exact, _ = net.max_flow(pair[0], pair[1])
            if exact == best:
                min_pair = pair
                break
    assert min_pair is not None
    return LiuCheckResult(best >= k, k, min_pair, best)


def common_moves(u: ContingencyTable, v: ContingencyTable) -> list[MarkovMove]:
    """Basis moves valid at both tables, in canonical order."""
    if u.n != v.n or u.r != v.r:
        raise InvalidDimensionError("tables live in different fibers")
    if u.n < 2:
        return []
    return [
        m
        for m in enumerate_basis_moves(u.n)
        if is_valid_move(u, m) and is_valid_move(v, m)
    ]


def min_common_moves_over_close_pairs(
    graph: FiberGraph, max_distance: int = 2
) -> tuple[int, tuple[int, int]] | None:
    """Minimum number of shared valid moves over all pairs within the distance.

    Valid-move sets are packed into per-vertex bitmasks once, so each pair
    costs a single AND + popcount.  Returns (count, (u, v)) for the first
    minimizing pair, or None when no qualifying pair exists.
    """
    if max_distance != 2:
        raise InvalidDimensionError("only max_distance=2 is supported")
    fiber = graph.fiber
    if fiber.n < 2:
        return None
    moves = enumerate_basis_moves(fiber.n)
    masks = []
    for t in fiber:
        mask = 0
        for bit, m in enumerate(moves):
            if is_valid_move(t, m):
                mask |= 1 << bit
        masks.append(mask)
    pairs = []
    for u, row in enumerate(graph.neighbor_lists()):
        pairs.extend((u, v) for v in row if v > u)
    pairs.extend(distance_two_pairs(graph))
    best: tuple[int, tuple[int, int]] | None = None
    for u, v in pairs:
        count = (masks[u] & masks[v]).bit_count()
        if best is None or count < best[0]:
            best = (count, (u, v))
    return best


# --- detour paths between distance-2 vertices ---

@dataclass(frozen=True)
class DetourPathReport:
    u: int
    v: int
    middle_moves: tuple[MarkovMove, MarkovMove]
    count_disjoint: int
    decomposition_count: int
    paths: tuple[tuple[int, ...], ...]  # kept pairwise internally-disjoint paths


def detour_paths(graph: FiberGraph, u: int, v: int) -> DetourPathReport:
    """Greedy internally-disjoint path family between a distance-2 pair.

    The pair is joined by a two-move sequence (d1, d2); the canonically first
    such decomposition is fixed.  Candidate paths are the direct length-2
    path, the alternate length-2 path through u + d2 (reached when the extra
    move equals d2 or -d1), and the four-step detours M, d1, d2, -M for every
    other extra move M.  Candidates are kept first-come in canonical move
    order whenever their interior avoids all previously kept paths.
    """
    fiber = graph.fiber
    tu, tv = fiber[u], fiber[v]
    adj_u = set(graph.neighbor_lists()[u])
    if u == v or v in adj_u:
        raise NotDistanceTwoError(f"vertices {u} and {v} are not at distance 2")

    decomps: list[tuple[MarkovMove, MarkovMove]] = []
    for m1 in valid_moves(tu):
        mid = apply_move(tu, m1)
        m2 = move_from_difference(mid, tv)
        if m2 is not None:
            decomps.append((m1, m2))
    if not decomps:
        raise NotDistanceTwoError(f"vertices {u} and {v} are not at distance 2")
    d1, d2 = decomps[0]

    direct_mid = fiber.index_of(apply_move(tu, d1))
    kept: list[tuple[int, ...]] = [(u, direct_mid, v)]
    used_internal: set[int] = {direct_mid}
    neg_d1, neg_d2 = d1.negate(), d2.negate()
    alternate_valid = is_valid_move(tu, d2)

    for move in enumerate_basis_moves(tu.n):
        if move == d1 or move == neg_d2:
            continue  # these collide with the direct path's interior
        if move == d2 or move == neg_d1:
            # both stand for the alternate length-2 path u -> u + d2 -> v
            if not alternate_valid:
                continue
            candidate = (u, fiber.index_of(apply_move(tu, d2)), v)
        else:
            if not is_valid_move(tu, move):
                continue
            a = apply_move(tu, move)
            if not is_valid_move(a, d1):
                continue
            b = apply_move(a, d1)
            if not is_valid_move(b, d2):
                continue
            c = apply_move(b, d2)
            assert is_valid_move(c, move.negate()), "final leg must land on v"
            ids = (fiber.index_of(a), fiber.index_of(b), fiber.index_of(c))
            if len(set(ids)) < 3 or u in ids or v in ids:
                continue
            candidate = (u, *ids, v)
        interior = set(candidate[1:-1])
        if interior & used_internal:
            continue
        kept.append(candidate)
        used_internal |= interior

    return DetourPathReport(
        u=u,
        v=v,
        middle_moves=(d1, d2),
        count_disjoint=len(kept),
        decomposition_count=len(decomps),
        paths=tuple(kept),
    )


# --- the double-cube counterexample ---

def hemmecke_graph(k: int) -> tuple[tuple[tuple[int, ...], ...], ConnectivityReport]:
    """Two k-cube skeletons joined by a single edge between all-zero corners.

    Vertex id = side * 2^k + corner_bits.  The graph has 2^(k+1) vertices,
    minimum degree k, and connectivity 1 (each bridge endpoint is a cut
    vertex), which is why its fiber needs large margins to be excluded.
    """
    if k < 1:
        raise InvalidDimensionError(f"need k >= 1, got {k}")
    size = 1 << k
    adj: list[list[int]] = [[] for _ in range(2 * size)]
    for side in (0, 1):
        base = side * size
        for mask in range(size):
            for bit in range(k):
                adj[base + mask].append(base + (mask ^ (1 << bit)))
    adj[0].append(size)
    adj[size].append(0)
    frozen = tuple(tuple(sorted(row)) for row in adj)
    return frozen, vertex_connectivity(frozen)


def hemmecke_matrix(k: int) -> tuple[list[list[int]], list[int]]:
    """(2k+1) x (4k+2) system whose non-negative solutions for b = e_{2k+1}
    form the double-cube fiber: each of the first 2k rows ties one variable
    pair to a cube selector, and the last row makes the selectors sum to 1."""
    if k < 1:
        raise InvalidDimensionError(f"need k >= 1, got {k}")
    cols = 4 * k + 2
    A: list[list[int]] = []
    for i in range(k):
        row = [0] * cols
        row[2 * i] = row[2 * i + 1] = 1
        row[4 * k] = -1
        A.append(row)
    for i in range(k):
        row = [0] * cols
        row[2 * k + 2 * i] = row[2 * k + 2 * i + 1] = 1
        row[4 * k + 1] = -1
        A.append(row)
    last = [0] * cols
    last[4 * k] = last[4 * k + 1] = 1
    A.append(last)
    b = [0] * (2 * k) + [1]
    return A, b


def articulation_vertices(graph: GraphLike) -> list[int]:
    """Vertices whose removal disconnects the graph (checked by removal + BFS)."""
    adj = adjacency_of(graph)
    return [
        x
        for x in range(len(adj))
        if not _connected_after_removal(adj, frozenset({x}))
    ]
