"""Blocker sets and the nested blocker-set sequence.

A blocker set for a collection of depth-``h`` trees is a node set meeting
every root-to-leaf path of exactly ``h`` hops.  The sequence starts from all
nodes with a hop bound of ``c**2`` (``c = ceil(log2 n)``); each later level
blocks the trees of the previous level and multiplies the hop bound by ``c``,
capped at ``n - 1``.

Blocker sets are chosen by greedy set cover.  The distributed construction
is not simulated; its cost is charged to the ledger as modeled rounds,
``constant * |sources| * h * ceil(log2 n) ** power``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph
from .hoppaths import CsspCollection, HopTables, build_csssp, multi_source_hop_sssp
from .sim import Network, as_network, broadcast_all, charge_modeled, log2c


def hop_factor(n: int) -> int:
    """The per-level growth factor ``max(2, ceil(log2 n))``."""
    return max(2, log2c(n))


def num_levels(n: int) -> int:
    """Index of the last level: ``ceil(lg / log2 lg) - 1`` with ``lg = ceil(log2 n)``, at least 1."""
    lg = log2c(n)
    return max(1, math.ceil(lg / max(1.0, math.log2(lg))) - 1)


def hop_schedule(n: int, h0: int | None = None) -> list[int]:
    """Hop bounds ``h_0, h_1, ...`` capped at ``n - 1``.

    With the default start the last level always reaches ``n - 1``.  A custom
    ``h0`` (a test hook) may grow too slowly for that, so levels are appended
    until the cap is reached.
    """
    c = hop_factor(n)
    cap = max(1, n - 1)
    base = c * c if h0 is None else int(h0)
    if base < 1:
        raise ValueError("h0 must be >= 1")
    hs = [min(base * c ** i, cap) for i in range(num_levels(n) + 1)]
    while hs[-1] < cap:
        hs.append(min(hs[-1] * c, cap))
    return hs


def blocker_charge(net: Network, num_sources: int, h: int) -> int:
    raw = net.blocker_round_constant * num_sources * h * log2c(net.n) ** net.blocker_log_power
    return int(math.ceil(raw))


@dataclass(frozen=True)
class BlockerSet:
    nodes: frozenset
    h: int
    source_set: tuple


@dataclass
class BlockerLevel:
    i: int
    h: int
    nodes: tuple                  # sorted IDs of Q_i
    trees: CsspCollection | None  # the trees this level blocks (None at level 0)

    @property
    def size(self) -> int:
        return len(self.nodes)


@dataclass
class BlockerSequence:
    n: int
    levels: list[BlockerLevel] = field(default_factory=list)

    @property
    def hops(self) -> list[int]:
        return [lv.h for lv in self.levels]

    def to_json(self) -> str:
        data = {"levels": [{"i": lv.i, "h_i": lv.h, "Q_i": list(lv.nodes), "size": lv.size}
                           for lv in self.levels]}
        return json.dumps(data, indent=2, sort_keys=True) + "\n"


def full_length_paths(c: CsspCollection) -> list[tuple[int, ...]]:
    """Root-to-leaf paths with exactly ``c.h`` edges, listed root first.

    Incoming trees are walked from the root towards the leaves as well, so a
    path is always ``(root, ..., leaf)``.
    """
    out = []
    rows, cols = np.nonzero(c.hops == c.h) if c.h > 0 else (np.array([], int), np.array([], int))
    for r, v in zip(rows.tolist(), cols.tolist()):
        seq = [v]
        for _ in range(c.h):
            seq.append(int(c.ptr[r, seq[-1]]))
        out.append(tuple(reversed(seq)))
    return out


def _incidence(c: CsspCollection):
    """(path index, node) pairs for the non-root nodes of every full-length path."""
    if c.h == 0:
        return 0, np.zeros(0, np.int64), np.zeros(0, np.int64)
    rows, leaves = np.nonzero(c.hops == c.h)
    num = len(rows)
    nodes = np.empty((num, c.h), dtype=np.int64)
    cur = leaves.astype(np.int64)
    for d in range(c.h):
        nodes[:, d] = cur
        cur = c.ptr[rows, cur]
    pid = np.repeat(np.arange(num), c.h)
    return num, pid, nodes.ravel()


def greedy_blocker(g: Graph | Network, c: CsspCollection, label: str = "blocker") -> BlockerSet:
    """Greedy cover of the full-length paths by their non-root nodes.

    Picks the node on the most uncovered paths, ties to the smaller ID, until
    every path is hit.  Charges the modeled construction cost under ``label``.
    """
    net = as_network(g)
    n = net.n
    charge_modeled(net.ledger, label, blocker_charge(net, len(c.sources), c.h))
    num, pid, node = _incidence(c)
    chosen: list[int] = []
    if num:
        # node -> paths through it (CSR)
        order = np.argsort(node, kind="stable")
        by_node = pid[order]
        start = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(node, minlength=n), out=start[1:])
        path_nodes = node.reshape(num, c.h)
        count = np.bincount(node, minlength=n).astype(np.int64)
        covered = np.zeros(num, dtype=bool)
        left = num
        while left:
            x = int(np.argmax(count))
            hit = by_node[start[x]:start[x + 1]]
            hit = hit[~covered[hit]]
            covered[hit] = True
            left -= len(hit)
            np.subtract.at(count, path_nodes[hit].ravel(), 1)
            chosen.append(x)
    return BlockerSet(frozenset(chosen), c.h, tuple(int(s) for s in c.sources))


def verify_blocker(c: CsspCollection, q) -> bool:
    """True iff every full-length path contains a node of ``q``."""
    qs = set(int(x) for x in q)
    return all(any(v in qs for v in p) for p in full_length_paths(c))


def build_blocker_sequence(
    g: Graph | Network,
    h0: int | None = None,
    label: str = "blockers",
    engine: str = "batched",
) -> BlockerSequence:
    """Compute ``Q_0 = V, Q_1, ...`` with their hop bounds.

    Level ``i >= 1`` builds consistent ``h_{i-1}``-hop trees from
    ``Q_{i-1}``, blocks them greedily and broadcasts the chosen IDs.
    """
    net = as_network(g)
    n = net.n
    hs = hop_schedule(n, h0)
    seq = BlockerSequence(n, [BlockerLevel(0, hs[0], tuple(range(n)), None)])
    for i in range(1, len(hs)):
        prev = seq.levels[-1]
        tag = f"{label}/L{i}"
        trees = build_csssp(net, prev.nodes, prev.h, "out", f"{tag}/csssp", engine)
        q = greedy_blocker(net, trees, f"{tag}/select")
        nodes = tuple(sorted(q.nodes))
        items = [[(v,)] if v in q.nodes else [] for v in range(n)]
        broadcast_all(net, items, f"{tag}/broadcast", engine)
        seq.levels.append(BlockerLevel(i, hs[i], nodes, trees))
    return seq


@dataclass
class LevelTables:
    """Per-level tables from the level's blocker nodes."""

    i: int
    h: int
    nodes: tuple
    out: HopTables | None
    inc: HopTables | None


def level_tables(
    g: Graph | Network,
    seq: BlockerSequence,
    directions=("in", "out"),
    label: str = "levels",
    first_level: int = 0,
    engine: str = "batched",
) -> list[LevelTables]:
    """Outgoing and/or incoming ``h_i``-hop tables from every node of ``Q_i``."""
    net = as_network(g)
    res = []
    for lv in seq.levels[first_level:]:
        tabs = {}
        for d in ("in", "out"):
            if d in directions:
                tabs[d] = multi_source_hop_sssp(net, lv.nodes, lv.h, d,
                                                f"{label}/L{lv.i}/sssp-{d}", engine)
        res.append(LevelTables(lv.i, lv.h, lv.nodes, tabs.get("out"), tabs.get("in")))
    return res


def decomposition_witness(
    seq: BlockerSequence,
    tables: list[LevelTables],
    s: int,
    t: int,
    exact: float,
    tol: float = 0.0,
):
    """A level ``j`` and ``q`` in ``Q_j`` whose hop-bounded distances
    ``s -> q`` and ``q -> t`` add up to ``exact``; None if there is none.

    Raises ValueError when ``exact`` is infinite (``t`` unreachable).
    """
    if not math.isfinite(exact):
        raise ValueError(f"node {t} is not reachable from node {s}")
    for lt in tables:
        if not lt.nodes:
            continue
        total = lt.inc.dist[:, s] + lt.out.dist[:, t]
        hit = np.nonzero(np.abs(total - exact) <= tol)[0]
        if len(hit):
            return lt.i, int(lt.nodes[hit[0]])
    return None
