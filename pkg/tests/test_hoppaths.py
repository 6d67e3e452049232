import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from congest_cycles import (
    Graph,
    Network,
    build_csssp,
    gen_path,
    gen_random,
    h_hop_in_sssp,
    h_hop_out_sssp,
    multi_source_hop_sssp,
    reverse,
    verify_csssp,
    verify_h_hop_accurate,
)
from congest_cycles import oracle
from congest_cycles.hoppaths import HopTable, check_pointer_paths

INF = math.inf


def test_path_one_and_two_hops():
    g = gen_path([1, 2])
    assert h_hop_out_sssp(g, 0, 1).dist.tolist() == [0, 1, INF]
    t = h_hop_out_sssp(g, 0, 2)
    assert t.dist.tolist() == [0, 1, 3] and t.parent.tolist() == [0, 0, 1]
    assert t.hops.tolist() == [0, 1, 2]


def test_in_sssp_on_path():
    t = h_hop_in_sssp(gen_path([1, 2]), 2, 2)
    assert t.dist[0] == 3 and t.next.tolist() == [1, 2, 2]
    assert t.path(0) == [0, 1, 2]
    with pytest.raises(AttributeError):
        t.parent


def test_unreached_sentinels():
    t = h_hop_out_sssp(gen_path([1, 2]), 1, 5)
    assert t.dist[0] == INF and t.hops[0] == -1 and t.ptr[0] == -1 and t.path(0) is None


def test_full_depth_matches_dijkstra():
    g = gen_random(60, 4, 8)
    for s in (0, 17, 59):
        t = h_hop_out_sssp(g, s, g.n)
        assert np.array_equal(t.dist, oracle.dijkstra_sssp(g, s)[0])
        assert check_pointer_paths(t, g)


def test_in_equals_out_on_reverse():
    g = gen_random(50, 3, 2)
    for s in (0, 9):
        for h in (1, 4, 49):
            a = h_hop_in_sssp(g, s, h)
            b = h_hop_out_sssp(reverse(g), s, h)
            assert np.array_equal(a.dist, b.dist) and np.array_equal(a.ptr, b.ptr)


def test_undirected_in_equals_out():
    g = gen_random(40, 3, 6, directed=False)
    a, b = h_hop_in_sssp(g, 3, 6), h_hop_out_sssp(g, 3, 6)
    assert np.array_equal(a.dist, b.dist) and np.array_equal(a.ptr, b.ptr)


def test_multi_source_rounds_and_rows():
    g = gen_random(40, 3, 1)
    net = Network(g)
    tabs = multi_source_hop_sssp(net, [7, 2], 5)
    assert net.ledger.measured == 10
    assert [t.source for t in tabs] == [2, 7]
    for t in tabs:
        assert t.dist[t.source] == 0
        single = h_hop_out_sssp(g, t.source, 5)
        assert np.array_equal(single.dist, t.dist) and np.array_equal(single.ptr, t.ptr)


def test_multi_source_rejects_duplicates():
    with pytest.raises(ValueError):
        multi_source_hop_sssp(gen_path([1]), [0, 0], 1)


@pytest.mark.parametrize("directed", [True, False])
@pytest.mark.parametrize("direction", ["out", "in"])
def test_engines_agree(directed, direction):
    g = gen_random(30, 3, 12, directed=directed)
    a, b = Network(g), Network(g)
    ta = multi_source_hop_sssp(a, [0, 5, 11], 6, direction, engine="batched")
    tb = multi_source_hop_sssp(b, [0, 5, 11], 6, direction, engine="nodes")
    for x, y in zip(ta, tb):
        assert np.array_equal(x.dist, y.dist)
        assert np.array_equal(x.hops, y.hops)
        assert np.array_equal(x.ptr, y.ptr)
    assert a.ledger.to_csv() == b.ledger.to_csv()


def test_ties_prefer_fewer_hops_then_smaller_id():
    # 0->3 directly (4) ties 0->1->3 (2+2) and 0->2->3 (1+3)
    g = Graph(4, [(0, 3, 4), (0, 1, 2), (1, 3, 2), (0, 2, 1), (2, 3, 3)])
    assert h_hop_out_sssp(g, 0, 3).parent[3] == 0
    g = Graph(4, [(0, 1, 2), (1, 3, 2), (0, 2, 1), (2, 3, 3)])
    assert h_hop_out_sssp(g, 0, 3).parent[3] == 1


def test_stale_pointer_only_on_inexact_nodes():
    # u improves in the last round; v keeps a label whose pointer chain moved on
    s, a, b, u, v = range(5)
    g = Graph(5, [(s, u, 10), (s, a, 1), (a, b, 1), (b, u, 1), (u, v, 1)])
    t = h_hop_out_sssp(g, s, 3)
    assert t.dist[v] == 11 and t.dist[u] == 3
    assert not check_pointer_paths(t, g, [v])
    exact = oracle.dijkstra_sssp(g, s)[0]
    assert check_pointer_paths(t, g, [x for x in range(5) if t.dist[x] == exact[x]])
    assert verify_h_hop_accurate(t, g)


def test_verify_h_hop_accurate_detects_lowered_entry():
    g = gen_random(30, 4, 3, directed=False)
    t = h_hop_out_sssp(g, 0, 4)
    assert verify_h_hop_accurate(t, g)
    v = int(np.nonzero(np.isfinite(t.dist) & (t.dist > 0))[0][0])
    bad = t.dist.copy()
    bad[v] -= 1
    assert not verify_h_hop_accurate(HopTable(0, 4, "out", bad, t.hops, t.ptr), g)


def test_verify_h_hop_accurate_full_depth_is_exact():
    g = gen_random(30, 3, 4)
    t = h_hop_out_sssp(g, 2, g.n - 1)
    assert verify_h_hop_accurate(t, g)
    assert np.array_equal(t.dist, oracle.dijkstra_sssp(g, 2)[0])


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 25), deg=st.sampled_from([1.5, 2, 3, 4]), seed=st.integers(0, 10 ** 6),
       h=st.integers(0, 12), directed=st.booleans(), direction=st.sampled_from(["out", "in"]))
def test_matches_hop_bounded_oracle(n, deg, seed, h, directed, direction):
    deg = min(deg, (n - 1) if directed else (n - 1) / 1.0)
    g = gen_random(n, max(deg, 1), seed, 9, directed=directed)
    s = seed % n
    t = multi_source_hop_sssp(g, [s], h, direction)[0]
    ref = oracle.hop_bounded_dp(g, s, h) if direction == "out" else oracle.hop_bounded_to(g, s, h)
    assert np.array_equal(t.dist, ref)
    assert verify_h_hop_accurate(t, g)
    if h >= n - 1:
        assert check_pointer_paths(t, g)


def test_monotone_in_h():
    g = gen_random(40, 3, 21)
    prev = h_hop_out_sssp(g, 0, 0).dist
    for h in range(1, 40):
        cur = h_hop_out_sssp(g, 0, h).dist
        assert (cur <= prev).all()
        prev = cur


def test_table_csv():
    csv = h_hop_out_sssp(gen_path([1, 2]), 0, 1).to_csv()
    assert csv == "node,dist,hops,parent_or_next\n0,0,0,0\n1,1,1,0\n2,inf,-1,-1\n"


# ---------------------------------------------------------------- CSSSP


def test_plain_tables_can_be_inconsistent_but_csssp_is_not():
    s, x, a, v = range(4)
    g = Graph(4, [(s, x, 1), (x, v, 10), (x, a, 1), (a, v, 1)])
    plain = multi_source_hop_sssp(g, [s, x], 2)
    assert plain.table(s).path(v) == [s, x, v] and plain.table(x).path(v) == [x, a, v]
    c = build_csssp(g, [s, x], 2)
    assert verify_csssp(c)
    assert c.table(s).dist[v] == INF and c.table(x).path(v) == [x, a, v]


def test_csssp_single_source_and_depth():
    g = gen_random(20, 3, 0)
    assert verify_csssp(build_csssp(g, [4], 3))
    ring = Graph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)], directed=False)
    c = build_csssp(ring, range(4), 2)
    assert c.hops.max() <= 2 and verify_csssp(c)


def test_csssp_equal_weight_paths_pick_one():
    # two equal-weight routes 0->1->3 and 0->2->3; tree from 0 and any tree through them agree
    g = Graph(5, [(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 1), (4, 0, 1)])
    c = build_csssp(g, range(5), 4)
    assert verify_csssp(c)
    assert c.table(0).path(3) == [0, 1, 3] and c.table(4).path(3) == [4, 0, 1, 3]


def test_csssp_rounds():
    g = gen_random(30, 3, 2)
    net = Network(g)
    build_csssp(net, [0, 1, 2], 4)
    # 2h Bellman-Ford rounds plus an h-round sweep per source
    assert net.ledger.measured == 3 * (8 + 4)


def _min_hops_of_shortest(g, s):
    """Fewest edges among shortest paths from s, by a layered oracle."""
    exact = oracle.dijkstra_sssp(g, s)[0]
    best = np.full(g.n, -1)
    for h in range(g.n):
        d = oracle.hop_bounded_dp(g, s, h)
        newly = (best < 0) & np.isfinite(exact) & (d == exact)
        best[newly] = h
    return exact, best


@pytest.mark.parametrize("seed", range(6))
def test_csssp_keeps_exactly_the_short_shortest_paths(seed):
    g = gen_random(25, 3, seed, 5, directed=seed % 2 == 0)
    h = 3
    c = build_csssp(g, range(g.n), h)
    for s in range(g.n):
        exact, mh = _min_hops_of_shortest(g, s)
        t = c.table(s)
        want = (mh >= 0) & (mh <= h)
        assert np.array_equal(np.isfinite(t.dist), want)
        assert np.array_equal(t.dist[want], exact[want])
        assert np.array_equal(t.hops[want], mh[want])
        assert check_pointer_paths(t, g)


@pytest.mark.parametrize("n", [6, 9, 12])
def test_csssp_consistency_exhaustive_small(n):
    for seed in range(8):
        g = gen_random(n, 3, seed, 3, directed=seed % 2 == 1)
        for h in (1, 2, 3, 5):
            for direction in ("out", "in"):
                assert verify_csssp(build_csssp(g, range(n), h, direction))


def test_verify_csssp_rejects_planted_inconsistency():
    s, x, a, v = range(4)
    g = Graph(4, [(s, x, 1), (x, v, 10), (x, a, 1), (a, v, 1)])
    plain = multi_source_hop_sssp(g, [s, x], 2)
    from congest_cycles.hoppaths import CsspCollection
    fake = CsspCollection(plain.sources, 2, "out", plain.dist, plain.hops, plain.ptr)
    assert not verify_csssp(fake)
