import json
import math
from pathlib import Path

import numpy as np
import pytest

from congest_cycles.sim import log2c
from congest_cycles import (
    Graph,
    Network,
    build_blocker_sequence,
    build_csssp,
    decomposition_witness,
    full_length_paths,
    gen_path,
    gen_random,
    greedy_blocker,
    hop_schedule,
    level_tables,
    verify_blocker,
)
from congest_cycles import oracle
from congest_cycles.blockers import num_levels


def test_schedule_defaults():
    assert hop_schedule(1024) == [100, 1000, 1023, 1023]
    assert hop_schedule(256) == [64, 255, 255]
    assert hop_schedule(16) == [15, 15]
    assert num_levels(16) == 1 and num_levels(1024) == 3


def test_schedule_level_count_bound():
    for n in (8, 16, 64, 100, 256, 1000, 4096, 2 ** 16):
        lg = math.ceil(math.log2(n))
        assert num_levels(n) <= max(1, math.ceil(lg / math.log2(lg)) - 1)
        assert hop_schedule(n)[-1] == n - 1


def test_schedule_override_extends_to_cap():
    hs = hop_schedule(256, h0=1)
    assert hs[:3] == [1, 8, 64] and hs[-1] == 255
    with pytest.raises(ValueError):
        hop_schedule(256, h0=0)


def test_full_length_paths_star_is_empty():
    star = Graph(5, [(0, k, 1) for k in range(1, 5)], directed=False)
    assert full_length_paths(build_csssp(star, [0], 2)) == []


def test_full_length_paths_on_path():
    g = gen_path([1, 1], directed=False)
    assert full_length_paths(build_csssp(g, [0], 2)) == [(0, 1, 2)]


def _brute_full_paths(c):
    """Walk each tree downwards from its root through a children map."""
    out = []
    for t in c:
        kids = {}
        for v in range(len(t.dist)):
            if t.hops[v] > 0:
                kids.setdefault(int(t.ptr[v]), []).append(v)
        stack = [(t.source,)]
        while stack:
            p = stack.pop()
            if len(p) - 1 == c.h:
                out.append(p)
                continue
            for k in kids.get(p[-1], []):
                stack.append(p + (k,))
    return sorted(out)


@pytest.mark.parametrize("seed", range(4))
def test_full_length_paths_match_tree_walk(seed):
    g = gen_random(40, 3, seed, directed=seed % 2 == 0)
    c = build_csssp(g, range(40), 4)
    got = full_length_paths(c)
    assert sorted(got) == _brute_full_paths(c)
    assert all(len(p) == 5 for p in got)


def test_greedy_no_paths_is_empty():
    star = Graph(5, [(0, k, 1) for k in range(1, 5)], directed=False)
    q = greedy_blocker(star, build_csssp(star, [0], 2))
    assert q.nodes == frozenset()


def test_greedy_single_path_takes_smallest_non_root():
    g = Graph(5, [(4, 3, 1), (3, 1, 1), (1, 2, 1), (2, 0, 1)])
    c = build_csssp(g, [4], 4)
    assert full_length_paths(c) == [(4, 3, 1, 2, 0)]
    assert greedy_blocker(g, c).nodes == {0}
    assert verify_blocker(c, {1}) and not verify_blocker(c, set())


def test_greedy_prefers_coverage():
    # both paths 0-1-2 and 3-1-4 run through 1
    g = Graph(5, [(0, 1, 1), (1, 2, 1), (3, 1, 1), (1, 4, 1)])
    c = build_csssp(g, [0, 3], 2)
    assert greedy_blocker(g, c).nodes == {1}


def test_greedy_charges_modeled_rounds():
    g = gen_random(64, 3, 0)
    net = Network(g, blocker_round_constant=2.0, blocker_log_power=2)
    c = build_csssp(net, range(10), 16)
    greedy_blocker(net, c, "sel")
    assert net.ledger.get("sel").modeled_rounds == 2 * 10 * 16 * 6 ** 2


def test_greedy_bound_and_validity_n64():
    n = 64
    h = 36
    for seed in range(3):
        g = gen_random(n, 2.5, seed, 20)
        c = build_csssp(g, range(n), h)
        q = greedy_blocker(g, c)
        assert verify_blocker(c, q.nodes)
        assert len(q.nodes) <= 4 * n * math.log(n) / h + 1


def test_verify_blocker_everything_blocks():
    g = gen_path([1] * 6, directed=False)
    c = build_csssp(g, range(7), 3)
    assert full_length_paths(c)
    assert verify_blocker(c, range(7)) and not verify_blocker(c, [])


def test_greedy_valid_on_many_instances():
    for seed in range(100):
        n = 10 + seed % 30
        g = gen_random(n, 2 + seed % 3, seed, 1 + seed % 10, directed=seed % 2 == 0)
        h = 1 + seed % 5
        c = build_csssp(g, range(0, n, 1 + seed % 3), h)
        q = greedy_blocker(g, c)
        assert verify_blocker(c, q.nodes)
        assert len(q.nodes) <= 4 * n * math.log(n) / h + 1


def test_sequence_n16_second_level_empty():
    for seed in range(3):
        seq = build_blocker_sequence(gen_random(16, 3, seed))
        assert [lv.h for lv in seq.levels] == [15, 15]
        assert seq.levels[0].nodes == tuple(range(16)) and seq.levels[1].nodes == ()


def test_sequence_n256_valid():
    n = 256
    for seed in range(2):
        net = Network(gen_random(n, 3, seed))
        seq = build_blocker_sequence(net, h0=4)
        for prev, lv in zip(seq.levels, seq.levels[1:]):
            assert verify_blocker(lv.trees, lv.nodes)
            assert lv.size <= 4 * n * math.log(n) / prev.h + 1
            assert lv.trees.h == prev.h and list(lv.trees.sources) == list(prev.nodes)
        for lv in seq.levels[1:]:
            assert net.ledger.get(f"blockers/L{lv.i}/broadcast") is not None


def test_sequence_json():
    seq = build_blocker_sequence(gen_random(16, 3, 0))
    data = json.loads(seq.to_json())
    assert data["levels"][0] == {"i": 0, "h_i": 15, "Q_i": list(range(16)), "size": 16}
    assert data["levels"][1]["size"] == 0


def test_witness_neighbor_at_level_zero():
    g = gen_random(30, 3, 2)
    seq = build_blocker_sequence(g)
    tabs = level_tables(g, seq)
    D = oracle.apsp(g)
    for u, v, w in g.edges:
        if w == D[u, v]:
            j, q = decomposition_witness(seq, tabs, u, v, D[u, v])
            assert j == 0 and q in (u, v)


@pytest.mark.parametrize("h0", [None, 1, 2])
def test_witness_every_reachable_pair(h0):
    for seed in range(3):
        g = gen_random(64, 3, 100 + seed)
        seq = build_blocker_sequence(g, h0=h0)
        tabs = level_tables(g, seq)
        D = oracle.apsp(g)
        for s in range(g.n):
            for t in range(g.n):
                if math.isfinite(D[s, t]):
                    j, q = decomposition_witness(seq, tabs, s, t, D[s, t])
                    lt = tabs[j]
                    row = lt.nodes.index(q)
                    assert lt.inc.dist[row, s] + lt.out.dist[row, t] == D[s, t]


def test_witness_unreachable_flagged():
    g = gen_path([1, 1])
    seq = build_blocker_sequence(g)
    tabs = level_tables(g, seq)
    with pytest.raises(ValueError, match="not reachable"):
        decomposition_witness(seq, tabs, 2, 0, math.inf)


@pytest.mark.slow
def test_sequence_rounds_within_frozen_constant():
    calib = json.loads((Path(__file__).parent / "calibration.json").read_text())
    for n in calib["sizes"]:
        for seed in calib["seeds"]:
            net = Network(gen_random(n, calib["avg_degree"], seed))
            build_blocker_sequence(net)
            assert net.ledger.total <= calib["C"] * n * log2c(n) ** 3
