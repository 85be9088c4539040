from __future__ import annotations

import random

import pytest

from fibergraphs.analysis import (
    articulation_vertices,
    bfs_distances,
    common_moves,
    detour_paths,
    diameter,
    diameter_witness_pair,
    distance_between,
    distance_two_pairs,
    hemmecke_graph,
    is_connected,
    liu_check,
    local_connectivity,
    min_common_moves_over_close_pairs,
    vertex_connectivity,
)
from fibergraphs.enumeration import enumerate_fiber
from fibergraphs.errors import (
    AdjacentPairError,
    DisconnectedGraphError,
    NotDistanceTwoError,
)
from fibergraphs.graphs import build_graph
from fibergraphs.tables import degree, scaled_permutation, validate_table

from oracles import (
    brute_local_connectivity,
    brute_vertex_connectivity,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    path_graph,
    random_graph,
)


# --- distances ---

def test_bfs_on_g22_path(graph_2_2):
    diag = graph_2_2.fiber.index_of(validate_table(2, 2, [[2, 0], [0, 2]]))
    dist = bfs_distances(graph_2_2, diag)
    assert sorted(dist) == [0, 1, 2]
    assert dist[diag] == 0


def test_bfs_self_distance_zero(graph_3_2):
    assert bfs_distances(graph_3_2, 7)[7] == 0


def test_bfs_matches_vectorized_diameter(graph_3_2):
    # the numpy all-sources sweep and the plain BFS must agree
    by_bfs = max(max(bfs_distances(graph_3_2, s)) for s in range(graph_3_2.vertex_count))
    assert diameter(graph_3_2) == by_bfs


def test_distance_diag_to_antidiagonal_g32(graph_3_2):
    # the anti-diagonal pattern is a transposition away from the diagonal,
    # two applications of one move; it does not attain the diameter
    fiber = graph_3_2.fiber
    diag = fiber.index_of(scaled_permutation(3, 2, [0, 1, 2]))
    anti = fiber.index_of(scaled_permutation(3, 2, [2, 1, 0]))
    assert distance_between(graph_3_2, diag, anti) == 2


def test_diameter_formula_small():
    for n, r, expected in [(2, 2, 2), (2, 3, 3), (3, 1, 2), (3, 2, 4), (3, 3, 6)]:
        graph = build_graph(enumerate_fiber(n, r))
        assert diameter(graph) == expected


def test_diameter_witness_pair_attains():
    for n, r in [(2, 2), (3, 2), (3, 3)]:
        graph = build_graph(enumerate_fiber(n, r))
        a, b = diameter_witness_pair(n, r)
        u = graph.fiber.index_of(a)
        v = graph.fiber.index_of(b)
        assert distance_between(graph, u, v) == (n - 1) * r


def test_diameter_disconnected_raises():
    with pytest.raises(DisconnectedGraphError):
        diameter(((1,), (0,), ()))


def test_fiber_graphs_connected():
    for n, r in [(2, 3), (3, 2), (3, 3), (4, 2)]:
        assert is_connected(build_graph(enumerate_fiber(n, r)))


# --- local connectivity ---

def test_local_connectivity_path_ends(graph_2_2):
    assert local_connectivity(graph_2_2, 0, 2) == 1


def test_local_connectivity_cycle_opposites():
    c4 = cycle_graph(4)
    assert local_connectivity(c4, 0, 2) == 2


def test_local_connectivity_adjacent_rejected(graph_2_2):
    with pytest.raises(AdjacentPairError):
        local_connectivity(graph_2_2, 0, 1)


def test_local_connectivity_g33_distance_two(graph_3_3):
    for u, v in distance_two_pairs(graph_3_3)[:40]:
        assert local_connectivity(graph_3_3, u, v) >= 3


def test_local_connectivity_matches_path_packing_oracle():
    rng = random.Random(777)
    checked = 0
    for _ in range(60):
        n = rng.randint(4, 12)
        adj = random_graph(rng, n, rng.uniform(0.25, 0.5))
        non_adjacent = [
            (u, v)
            for u in range(n)
            for v in range(u + 1, n)
            if v not in adj[u]
        ]
        rng.shuffle(non_adjacent)
        for u, v in non_adjacent[:3]:
            assert local_connectivity(adj, u, v) == brute_local_connectivity(adj, u, v)
            checked += 1
    assert checked >= 100


# --- global connectivity ---

def test_vertex_connectivity_g2r_path():
    for r in (2, 3, 4):
        graph = build_graph(enumerate_fiber(2, r))
        report = vertex_connectivity(graph)
        assert report.kappa == 1
        assert report.min_degree == 1
        assert report.conjecture_holds


def test_vertex_connectivity_g33(graph_3_3):
    report = vertex_connectivity(graph_3_3)
    assert report.kappa == 3
    assert report.conjecture_holds
    assert report.witness_cut is not None and len(report.witness_cut) == 3


def test_vertex_connectivity_g31(graph_3_1):
    # outside the r > 2 hypothesis; empirical value cross-checked by brute force
    report = vertex_connectivity(graph_3_1)
    assert report.kappa == brute_vertex_connectivity(graph_3_1.neighbor_lists()) == 3


def test_witness_cut_disconnects(graph_3_3):
    report = vertex_connectivity(graph_3_3)
    adj = graph_3_3.neighbor_lists()
    removed = report.witness_cut
    alive = [x for x in range(len(adj)) if x not in removed]
    seen = {alive[0]}
    stack = [alive[0]]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in removed and y not in seen:
                seen.add(y)
                stack.append(y)
    assert len(seen) < len(alive)


def test_vertex_connectivity_complete_marker():
    report = vertex_connectivity(complete_graph(5))
    assert report.kappa == 4
    assert report.complete
    assert report.witness_cut is None


def test_vertex_connectivity_disconnected():
    report = vertex_connectivity(((1,), (0,), ()))
    assert report.kappa == 0
    assert report.witness_cut == frozenset()


def test_vertex_connectivity_structured_graphs():
    assert vertex_connectivity(cycle_graph(7)).kappa == 2
    assert vertex_connectivity(path_graph(6)).kappa == 1
    assert vertex_connectivity(complete_bipartite(3, 4)).kappa == 3


def test_vertex_connectivity_matches_brute_force_random():
    rng = random.Random(4242)
    for trial in range(60):
        n = rng.randint(4, 16)
        adj = random_graph(rng, n, rng.uniform(1.2, 3.5) / n)
        report = vertex_connectivity(adj)
        assert report.kappa == brute_vertex_connectivity(adj), adj
        assert report.kappa <= report.min_degree  # Whitney bound


def test_vertex_connectivity_parallel_workers_match(graph_3_3):
    sequential = vertex_connectivity(graph_3_3, workers=1)
    parallel = vertex_connectivity(graph_3_3, workers=2)
    assert parallel.kappa == sequential.kappa
    assert parallel.min_degree == sequential.min_degree


# --- Liu criterion and common moves ---

def test_liu_g33(graph_3_3):
    result = liu_check(graph_3_3, 3)
    assert result.passed
    assert result.min_value >= 3


def test_liu_g22_fails_for_two(graph_2_2):
    result = liu_check(graph_2_2, 2)
    assert not result.passed
    assert result.min_value == 1
    assert result.min_pair == (0, 2)


def test_liu_g32_empirical(graph_3_2):
    # r = 2 sits outside the theorem; record the computed value only
    result = liu_check(graph_3_2, 3)
    assert result.min_value == local_connectivity(graph_3_2, *result.min_pair)


def test_common_moves_self_is_degree(graph_3_3):
    for t in list(graph_3_3.fiber)[:10]:
        assert len(common_moves(t, t)) == degree(t)


def test_common_moves_g33_close_pairs(graph_3_3):
    result = min_common_moves_over_close_pairs(graph_3_3)
    assert result is not None
    assert result[0] >= 3


def test_common_moves_disjoint_supports_g41():
    identity = scaled_permutation(4, 1, [0, 1, 2, 3])
    reversal = scaled_permutation(4, 1, [3, 2, 1, 0])
    # disjoint supports, r = 1: the lemma does not apply and the count is 0
    assert common_moves(identity, reversal) == []


# --- detour paths ---

def test_detour_paths_g22_endpoints(graph_2_2):
    report = detour_paths(graph_2_2, 0, 2)
    assert report.count_disjoint == 1
    assert report.paths == ((0, 1, 2),)


def test_detour_paths_not_distance_two(graph_3_3):
    with pytest.raises(NotDistanceTwoError):
        detour_paths(graph_3_3, 0, 0)
    u = 0
    v = graph_3_3.neighbor_lists()[0][0]
    with pytest.raises(NotDistanceTwoError):
        detour_paths(graph_3_3, u, v)


def test_detour_paths_g33_all_pairs(graph_3_3):
    for u, v in distance_two_pairs(graph_3_3):
        report = detour_paths(graph_3_3, u, v)
        assert report.count_disjoint >= 3


def test_detour_paths_are_valid_and_disjoint(graph_3_3):
    adj = graph_3_3.neighbor_lists()
    for u, v in distance_two_pairs(graph_3_3)[:25]:
        report = detour_paths(graph_3_3, u, v)
        interiors: set[int] = set()
        for path in report.paths:
            assert path[0] == u and path[-1] == v
            for a, b in zip(path, path[1:]):
                assert b in adj[a]
            inner = set(path[1:-1])
            assert len(inner) == len(path) - 2
            assert not inner & interiors
            interiors |= inner
        d1, d2 = report.middle_moves
        assert report.decomposition_count >= 1


def test_detour_paths_g43_sampled(graph_4_3):
    pairs = distance_two_pairs(graph_4_3)
    for u, v in pairs[::211]:
        assert detour_paths(graph_4_3, u, v).count_disjoint >= 6


@pytest.mark.long
def test_detour_paths_g43_exhaustive(graph_4_3):
    for u, v in distance_two_pairs(graph_4_3):
        assert detour_paths(graph_4_3, u, v).count_disjoint >= 6


# --- double-cube counterexample ---

def test_hemmecke_k1_path():
    adj, report = hemmecke_graph(1)
    assert len(adj) == 4
    assert sorted(len(row) for row in adj) == [1, 1, 2, 2]
    assert report.kappa == 1
    assert report.min_degree == 1


def test_hemmecke_k2():
    adj, report = hemmecke_graph(2)
    assert len(adj) == 8
    assert report.min_degree == 2
    assert report.kappa == 1


def test_hemmecke_k3():
    adj, report = hemmecke_graph(3)
    assert len(adj) == 16
    assert report.min_degree == 3
    assert report.kappa == 1
    assert not report.conjecture_holds


def test_hemmecke_articulation_bridge_ends():
    adj, _ = hemmecke_graph(3)
    assert articulation_vertices(adj) == [0, 8]


def test_hemmecke_matches_brute_force():
    adj, report = hemmecke_graph(2)
    assert brute_vertex_connectivity(adj) == report.kappa == 1
