"""Hop-limited Bellman-Ford: outgoing and incoming tables, many sources, CSSSP.

Every relaxation uses one canonical order on candidate labels
``(distance, hops, predecessor ID)``: smaller distance wins, then fewer hops,
then the smaller predecessor.  A label is replaced only by a strictly better
one.  Distances compare exactly for integer weights and with an absolute
tolerance of 1e-9 for real weights.

Sources run one after another.  Each one is an ``h``-round program in which
every node that knows a finite distance sends ``(dist, hops)`` to each
neighbor it could extend a path to, so a run costs exactly ``h`` rounds.  The
batched kernel only relaxes labels that changed in the previous round, which
gives the same tables, and counts the messages the full program would send.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .graph import Graph
from .sim import BandwidthError, Network, NodeProgram, as_network, run_protocol

INF = np.inf
TIE_RULE = "min (distance, hops, predecessor id); replace only on strict improvement"


@dataclass(frozen=True)
class HopTable:
    """One source's ``h``-hop table.

    For ``direction == "out"`` entry ``v`` describes the best path source -> v
    and ``ptr`` is the parent of ``v``; for ``"in"`` it describes v -> source
    and ``ptr`` is the next node after ``v``.  Unreached entries have
    ``dist = inf``, ``hops = -1``, ``ptr = -1``; the source has ``ptr = source``.
    """

    source: int
    h: int
    direction: str
    dist: np.ndarray
    hops: np.ndarray
    ptr: np.ndarray

    @property
    def parent(self) -> np.ndarray:
        if self.direction != "out":
            raise AttributeError("incoming tables carry next pointers")
        return self.ptr

    @property
    def next(self) -> np.ndarray:
        if self.direction != "in":
            raise AttributeError("outgoing tables carry parent pointers")
        return self.ptr

    def path(self, v: int) -> list[int] | None:
        """Node sequence of the recorded path, in edge direction, or None."""
        if not np.isfinite(self.dist[v]):
            return None
        seq = [v]
        while seq[-1] != self.source:
            seq.append(int(self.ptr[seq[-1]]))
            if len(seq) > len(self.dist):
                raise RuntimeError("pointer cycle")
        return seq[::-1] if self.direction == "out" else seq

    def to_csv(self) -> str:
        rows = ["node,dist,hops,parent_or_next"]
        for v in range(len(self.dist)):
            d = self.dist[v]
            ds = "inf" if not np.isfinite(d) else (str(int(d)) if float(d).is_integer() else repr(float(d)))
            rows.append(f"{v},{ds},{self.hops[v]},{self.ptr[v]}")
        return "\n".join(rows) + "\n"


class HopTables(Sequence):
    """Tables of several sources stored as ``(k, n)`` matrices.

    Behaves as a list of :class:`HopTable` in source order; ``index[s]`` maps
    a source ID to its row.
    """

    def __init__(self, sources, h, direction, dist, hops, ptr):
        self.sources = np.asarray(sources, dtype=np.int64)
        self.h = int(h)
        self.direction = direction
        self.dist = dist
        self.hops = hops
        self.ptr = ptr
        self.index = {int(s): i for i, s in enumerate(self.sources)}

    def __len__(self) -> int:
        return len(self.sources)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        return HopTable(int(self.sources[i]), self.h, self.direction,
                        self.dist[i], self.hops[i], self.ptr[i])

    def __iter__(self) -> Iterator[HopTable]:
        return (self[i] for i in range(len(self)))

    def table(self, s: int) -> HopTable:
        return self[self.index[int(s)]]

    @property
    def tables(self) -> list[HopTable]:
        return list(self)


class CsspCollection(HopTables):
    """Consistent ``h``-hop shortest-path trees for a set of sources.

    Only nodes whose recorded path is a shortest path with at most ``h`` hops
    and whose whole parent chain is up to date stay in a tree; ``hops`` is the
    node's depth.
    """

    tie_rule = TIE_RULE


# --------------------------------------------------------------------------
# batched kernel


def _arcs(g: Graph, direction: str):
    """(tail, head, weight) of the arcs a label travels along."""
    if direction == "out":
        return g.arc_src, g.arc_dst, g.arc_w
    if direction == "in":
        return g.arc_dst, g.arc_src, g.arc_w
    raise ValueError(f"direction must be 'out' or 'in', got {direction!r}")


def _csr(n: int, tail: np.ndarray):
    order = np.argsort(tail, kind="stable")
    start = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(tail, minlength=n), out=start[1:])
    return order, start


def _bf_kernel(g: Graph, sources: np.ndarray, rounds: int, direction: str):
    """Synchronous Bellman-Ford for all ``sources`` at once.

    Returns dist, hops, ptr (each ``(k, n)``) and ``reach``, the round in
    which each label first became finite (0 for sources, -1 never).
    """
    n, k = g.n, len(sources)
    tail, head, w = _arcs(g, direction)
    w = w.astype(np.float64)
    order, start = _csr(n, tail)
    tol = g.tolerance
    rows = np.arange(k)

    dist = np.full((k, n), INF)
    hops = np.full((k, n), -1, dtype=np.int64)
    ptr = np.full((k, n), -1, dtype=np.int64)
    reach = np.full((k, n), -1, dtype=np.int64)
    dist[rows, sources] = 0.0
    hops[rows, sources] = 0
    ptr[rows, sources] = sources
    reach[rows, sources] = 0

    fr_s, fr_v = rows.copy(), sources.copy()
    deg = start[1:] - start[:-1]
    for r in range(1, rounds + 1):
        if len(fr_s) == 0:
            break
        cnt = deg[fr_v]
        if cnt.sum() == 0:
            break
        # expand each frontier label along its arcs
        rep_s = np.repeat(fr_s, cnt)
        rep_v = np.repeat(fr_v, cnt)
        offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        arc = order[np.repeat(start[fr_v], cnt) + offs]
        c_to = head[arc]
        c_d = dist[rep_s, rep_v] + w[arc]
        c_h = hops[rep_s, rep_v] + 1
        # best candidate per (source, target)
        key = rep_s * n + c_to
        srt = np.lexsort((rep_v, c_h, c_d, key))
        key, c_d, c_h, c_from = key[srt], c_d[srt], c_h[srt], rep_v[srt]
        first = np.ones(len(key), dtype=bool)
        first[1:] = key[1:] != key[:-1]
        key, c_d, c_h, c_from = key[first], c_d[first], c_h[first], c_from[first]
        s_i, t = key // n, key % n
        cur_d, cur_h, cur_p = dist[s_i, t], hops[s_i, t], ptr[s_i, t]
        with np.errstate(invalid="ignore"):
            tie = np.abs(c_d - cur_d) <= tol
        better = (c_d < cur_d - tol) | (tie & ((c_h < cur_h) | ((c_h == cur_h) & (c_from < cur_p))))
        s_i, t = s_i[better], t[better]
        newly = ~np.isfinite(dist[s_i, t])
        reach[s_i[newly], t[newly]] = r
        dist[s_i, t] = c_d[better]
        hops[s_i, t] = c_h[better]
        ptr[s_i, t] = c_from[better]
        fr_s, fr_v = s_i, t
    return dist, hops, ptr, reach


def _count_messages(g: Graph, reach: np.ndarray, rounds: int, direction: str) -> int:
    """Messages of the full program: a finite label is sent every remaining round."""
    tail, _, _ = _arcs(g, direction)
    deg = np.bincount(tail, minlength=g.n)
    live = (reach >= 0) & (reach < rounds)
    per = np.where(live, rounds - reach, 0) * deg[None, :]
    return int(per.sum())


# --------------------------------------------------------------------------
# reference node program


class BellmanFordProgram(NodeProgram):
    """One node's part of an ``h``-round Bellman-Ford from one source."""

    def __init__(self, v: int, source: int, h: int, targets: Sequence[int],
                 weights_from: dict[int, float], tol: float):
        self.v = v
        self.h = h
        self.targets = targets           # neighbors this node's label extends to
        self.weights_from = weights_from  # sender -> weight of the arc used
        self.tol = tol
        self.dist = 0.0 if v == source else INF
        self.hops = 0 if v == source else -1
        self.ptr = v if v == source else -1
        self.done = h == 0

    def outbox(self, rnd):
        if not np.isfinite(self.dist):
            return {}
        return {u: (self.dist, self.hops) for u in self.targets}

    def deliver(self, rnd, inbox):
        best = None
        for u, (d, hp) in inbox:
            cand = (d + self.weights_from[u], hp + 1, u)
            if best is None or cand < best:
                best = cand
        if best is not None:
            d, hp, u = best
            tie = abs(d - self.dist) <= self.tol if np.isfinite(self.dist) else False
            if d < self.dist - self.tol or (tie and (hp, u) < (self.hops, self.ptr)):
                self.dist, self.hops, self.ptr = d, hp, u
        self.done = rnd >= self.h


def _run_nodes(net: Network, sources: Sequence[int], h: int, direction: str, label: str):
    g = net.graph
    tail, head, w = _arcs(g, direction)
    targets = [[] for _ in range(g.n)]
    wfrom: list[dict[int, float]] = [{} for _ in range(g.n)]
    for a, b, x in zip(tail.tolist(), head.tolist(), w.tolist()):
        targets[a].append(b)
        wfrom[b][a] = float(x)
    k = len(sources)
    net.ledger.record(label)
    dist = np.full((k, g.n), INF)
    hops = np.full((k, g.n), -1, dtype=np.int64)
    ptr = np.full((k, g.n), -1, dtype=np.int64)
    for i, s in enumerate(sources):
        progs = [BellmanFordProgram(v, s, h, targets[v], wfrom[v], g.tolerance) for v in range(g.n)]
        run_protocol(net, progs, label)
        for p in progs:
            dist[i, p.v], hops[i, p.v], ptr[i, p.v] = p.dist, p.hops, p.ptr
    return dist, hops, ptr


# --------------------------------------------------------------------------
# public operations


def _check_sources(g: Graph, sources) -> np.ndarray:
    src = np.asarray(sorted(int(s) for s in sources), dtype=np.int64)
    if len(set(src.tolist())) != len(src):
        raise ValueError("sources must be distinct")
    if len(src) and (src[0] < 0 or src[-1] >= g.n):
        raise ValueError("source outside the node range")
    return src


def multi_source_hop_sssp(
    g: Graph | Network,
    sources: Sequence[int],
    h: int,
    direction: str = "out",
    label: str | None = None,
    engine: str = "batched",
) -> HopTables:
    """``h``-hop tables for each source, run in ascending source order.

    Costs ``len(sources) * h`` measured rounds under ``label``.
    """
    net = as_network(g)
    g = net.graph
    if h < 0:
        raise ValueError("h must be >= 0")
    src = _check_sources(g, sources)
    label = label or f"hop-sssp-{direction}"
    _arcs(g, direction)
    if h > 0 and len(src) and net.beta < 2:
        raise BandwidthError(f"Bellman-Ford labels take 2 words, beta={net.beta}")
    if engine == "nodes":
        dist, hops, ptr = _run_nodes(net, src.tolist(), h, direction, label)
    elif engine == "batched":
        dist, hops, ptr, reach = _bf_kernel(g, src, h, direction)
        net.ledger.record(label, measured=len(src) * h,
                          messages=_count_messages(g, reach, h, direction))
    else:
        raise ValueError(f"unknown engine {engine!r}")
    return HopTables(src, h, direction, dist, hops, ptr)


def h_hop_out_sssp(g: Graph | Network, s: int, h: int, label: str = "hop-sssp-out",
                   engine: str = "batched") -> HopTable:
    """``h``-hop distances and parents from ``s``; exactly ``h`` rounds."""
    return multi_source_hop_sssp(g, [s], h, "out", label, engine)[0]


def h_hop_in_sssp(g: Graph | Network, s: int, h: int, label: str = "hop-sssp-in",
                  engine: str = "batched") -> HopTable:
    """``h``-hop distances and next pointers towards ``s``; exactly ``h`` rounds."""
    return multi_source_hop_sssp(g, [s], h, "in", label, engine)[0]


def _fresh_mask(g: Graph, dist, hops, ptr, sources, h: int, direction: str) -> np.ndarray:
    """Labels whose pointer chain back to the source is fully up to date.

    A label is fresh when its pointer's label is exactly one hop shorter and
    the distances match along the arc, recursively up to the source.
    """
    k, n = dist.shape
    rows = np.arange(k)[:, None]
    fresh = np.zeros((k, n), dtype=bool)
    fresh[np.arange(k), sources] = True
    p = np.where(ptr < 0, 0, ptr)
    # weight of the arc between v and its pointer, via sorted arc keys
    has = (ptr >= 0) & (hops > 0)
    cols = np.broadcast_to(np.arange(n), (k, n))
    a, b = (p, cols) if direction == "out" else (cols, p)
    arc_key = g.arc_src * n + g.arc_dst
    pos = np.clip(np.searchsorted(arc_key, a * n + b), 0, max(len(arc_key) - 1, 0))
    ws = np.where(has, g.arc_w.astype(np.float64)[pos] if len(arc_key) else INF, INF)
    tol = g.tolerance
    with np.errstate(invalid="ignore"):
        ok_link = has & (hops[rows, p] == hops - 1) & (np.abs(dist[rows, p] + ws - dist) <= tol)
    for depth in range(1, h + 1):
        layer = ok_link & (hops == depth)
        fresh |= layer & fresh[rows, p]
    return fresh


def build_csssp(
    g: Graph | Network,
    sources: Sequence[int],
    h: int,
    direction: str = "out",
    label: str = "csssp",
    engine: str = "batched",
) -> CsspCollection:
    """Consistent ``h``-hop shortest-path trees rooted at ``sources``.

    Bellman-Ford runs for ``min(2h, n-1)`` rounds per source, then an
    ``h``-round downward sweep per source keeps the nodes of depth at most
    ``h`` whose parent chain is up to date.  Every node with a shortest path
    of at most ``h`` hops survives, at depth equal to the fewest hops among
    its shortest paths.
    """
    net = as_network(g)
    g = net.graph
    src = _check_sources(g, sources)
    H = min(2 * h, max(g.n - 1, h))
    t = multi_source_hop_sssp(net, src, H, direction, label, engine)
    keep = _fresh_mask(g, t.dist, t.hops, t.ptr, src, h, direction) & (t.hops <= h) & (t.hops >= 0)
    dist = np.where(keep, t.dist, INF)
    hops = np.where(keep, t.hops, -1)
    ptr = np.where(keep, t.ptr, -1)
    # sweep: each kept non-root node hears "still in" from its pointer
    msgs = int((keep & (hops > 0)).sum())
    net.ledger.record(label, measured=len(src) * h, messages=msgs)
    return CsspCollection(src, h, direction, dist, hops, ptr)


def verify_h_hop_accurate(table: HopTable, g: Graph, exact: np.ndarray | None = None) -> bool:
    """Check ``h``-hop accuracy against independent oracles.

    The table must never undercut the true distance, and must equal it for
    every node reachable by a shortest path of at most ``h`` hops.
    """
    from . import oracle
    from .graph import reverse

    gg = g if table.direction == "out" else reverse(g)
    bounded = oracle.hop_bounded_dp(gg, table.source, table.h)
    if exact is None:
        exact, _ = oracle.dijkstra_sssp(gg, table.source)
    tol = g.tolerance
    d = np.asarray(table.dist, dtype=float)
    if d[table.source] != 0:
        return False
    # never below the true distance (an unreachable node must stay infinite)
    fin = np.isfinite(exact)
    if np.any(np.isfinite(d[~fin])) or np.any(d[fin] < exact[fin] - tol):
        return False
    # exact wherever some shortest path has at most h hops
    with np.errstate(invalid="ignore"):
        short = fin & np.isfinite(bounded) & (np.abs(bounded - exact) <= tol)
    return bool(np.all(np.abs(d[short] - exact[short]) <= tol))


def check_pointer_paths(table: HopTable, g: Graph, nodes: Sequence[int] | None = None) -> bool:
    """Pointers from each listed node lead back to the source within ``h``
    edges whose weights sum to the stored distance."""
    tol = g.tolerance
    todo = range(len(table.dist)) if nodes is None else nodes
    for v in todo:
        if not np.isfinite(table.dist[v]):
            continue
        p = table.path(v)
        if p is None or len(p) - 1 > table.h or len(p) - 1 != table.hops[v]:
            return False
        total = sum(g.weight(a, b) for a, b in zip(p, p[1:]))
        if abs(total - table.dist[v]) > tol:
            return False
    return True


def verify_csssp(c: CsspCollection) -> bool:
    """Every ``u -> v`` segment appears identically in all trees holding it."""
    seen: dict[tuple[int, int], tuple[int, ...]] = {}
    for tab in c:
        for v in range(len(tab.dist)):
            if tab.hops[v] <= 0:
                continue
            p = tab.path(v)
            if c.direction == "in":
                p = p[::-1]   # walk from the root outwards
            # p[0] is the root; p[-1] is v.  Check every segment ending at v.
            for i in range(len(p) - 1):
                a, b = (p[i], p[-1]) if c.direction == "out" else (p[-1], p[i])
                seg = tuple(p[i:]) if c.direction == "out" else tuple(p[i:][::-1])
                key = (a, b)
                if key in seen and seen[key] != seg:
                    return False
                seen.setdefault(key, seg)
    return True
