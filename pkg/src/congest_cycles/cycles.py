"""Shortest cycles: per-node directed cycles and the undirected minimum weight cycle.

Both protocols share a skeleton.  Build the blocker sequence; for every level
compute hop-bounded tables from the level's blocker nodes; let each node
tell its neighbors its table entries, one blocker per round; then every node
combines what it knows locally.  The undirected variant only combines
through neighbors ``u`` for which neither recorded path uses the edge
``(u, v)``, which rules out walks that go out and back along one edge.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .blockers import build_blocker_sequence, level_tables
from .graph import Graph
from .hoppaths import HopTable
from .sim import Network, as_network, broadcast_all, exchange_with_neighbors

INF = np.inf


@dataclass
class CycleResult:
    """Per-node cycle values plus their minimum.

    ``witnesses[v]`` is ``(u, q, level)`` for finite values: the value is
    ``w(v, u)`` plus the level's table distances through blocker ``q``.
    """

    per_node: np.ndarray
    witnesses: list
    global_min: float
    directed: bool

    @property
    def weight(self) -> float:
        return self.global_min

    def to_json(self) -> str:
        def num(x):
            if not math.isfinite(x):
                return None
            return int(x) if float(x).is_integer() else float(x)

        data = {
            "global": num(self.global_min),
            "per_node": [num(x) for x in self.per_node],
            "witnesses": [None if w is None else {"u": w[0], "q": w[1], "level": w[2]}
                          for w in self.witnesses],
        }
        return json.dumps(data, indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        rows = ["node,value,u,q,level"]
        for v, (x, wt) in enumerate(zip(self.per_node, self.witnesses)):
            val = "inf" if not math.isfinite(x) else (str(int(x)) if float(x).is_integer() else repr(float(x)))
            tail = ",," if wt is None else f"{wt[0]},{wt[1]},{wt[2]}"
            rows.append(f"{v},{val},{tail}")
        return "\n".join(rows) + "\n"


def _fold(best, wit, vals, arc_v, arc_u, qidx, nodes, level):
    """Lower per-node bests with per-arc candidates (arcs sorted by tail).

    Within one level the smallest candidate wins with ties to the smaller
    ``u``; across levels a value is replaced only when strictly smaller.
    """
    if len(vals) == 0:
        return
    order = np.lexsort((arc_u, vals, arc_v))
    v_s, val_s = arc_v[order], vals[order]
    first = np.ones(len(order), dtype=bool)
    first[1:] = v_s[1:] != v_s[:-1]
    for k in np.nonzero(first)[0]:
        v, x = int(v_s[k]), float(val_s[k])
        if x < best[v]:
            a = order[k]
            best[v] = x
            wit[v] = (int(arc_u[a]), int(nodes[qidx[a]]), level)


def _finish(net: Network, best, wit, directed: bool, label: str, broadcast: bool, engine: str):
    if broadcast:
        items = [[(float(best[v]),)] for v in range(net.n)]
        view = broadcast_all(net, items, f"{label}/broadcast", engine)
        glob = min((it[0] for it in view.items), default=INF)
    else:
        glob = float(best.min()) if len(best) else INF
    return CycleResult(best, wit, glob, directed)


def directed_ansc(
    g: Graph | Network,
    h0: int | None = None,
    label: str = "ansc",
    engine: str = "batched",
    broadcast: bool = False,
) -> CycleResult:
    """Weight of the shortest directed cycle through every node (inf if none).

    For each level, node ``v`` combines ``w(v, u) + dist(u -> q) + dist(q -> v)``
    over out-neighbors ``u`` and blockers ``q``; each ``u`` first sends its
    incoming distances to its in-neighbors, one blocker per round.
    """
    net = as_network(g)
    gr = net.graph
    if not gr.directed:
        raise ValueError("directed_ansc needs a directed graph")
    seq = build_blocker_sequence(net, h0, f"{label}/blockers", engine)
    tabs = level_tables(net, seq, ("in", "out"), label, engine=engine)
    best = np.full(gr.n, INF)
    wit: list = [None] * gr.n
    v_arc, u_arc, w_arc = gr.arc_src, gr.arc_dst, gr.arc_w.astype(np.float64)
    for lt in tabs:
        k = len(lt.nodes)
        # (blocker, distance) per round to every in-neighbor
        exchange_with_neighbors(net, gr.in_nbrs, k, f"{label}/L{lt.i}/exchange", engine, words=2)
        if k == 0:
            continue
        tot = lt.inc.dist[:, u_arc] + lt.out.dist[:, v_arc]   # (k, arcs)
        qidx = np.argmin(tot, axis=0)
        vals = tot[qidx, np.arange(len(v_arc))] + w_arc
        _fold(best, wit, vals, v_arc, u_arc, qidx, lt.nodes, lt.i)
    return _finish(net, best, wit, True, label, broadcast, engine)


def directed_mwc(g: Graph | Network, h0: int | None = None, label: str = "mwc",
                 engine: str = "batched") -> CycleResult:
    """Minimum weight directed cycle: per-node values, then one broadcast of
    every node's value.  ``result.weight`` is the answer."""
    return directed_ansc(g, h0, label, engine, broadcast=True)


def admissible_set(g: Graph, table: HopTable, v: int) -> set[int]:
    """Neighbors ``u`` of ``v`` such that neither recorded path from the
    table's source (to ``u`` or to ``v``) ends with the edge ``(u, v)``."""
    par = table.ptr
    return {u for u in g.nbrs[v] if par[v] != u and par[u] != v}


def undirected_mwc(
    g: Graph | Network,
    h0: int | None = None,
    label: str = "mwc-undirected",
    engine: str = "batched",
) -> CycleResult:
    """Minimum weight cycle of an undirected graph (inf for a forest).

    Per-node values are candidate cycle weights found at that node; only
    their minimum, taken by a final broadcast, is a guaranteed answer.
    """
    net = as_network(g)
    gr = net.graph
    if gr.directed:
        raise ValueError("undirected_mwc needs an undirected graph")
    seq = build_blocker_sequence(net, h0, f"{label}/blockers", engine)
    tabs = level_tables(net, seq, ("out",), label, engine=engine)
    best = np.full(gr.n, INF)
    wit: list = [None] * gr.n
    v_arc, u_arc, w_arc = gr.arc_src, gr.arc_dst, gr.arc_w.astype(np.float64)
    for lt in tabs:
        k = len(lt.nodes)
        # (blocker, distance, parent) per round to every neighbor
        exchange_with_neighbors(net, gr.nbrs, k, f"{label}/L{lt.i}/exchange", engine, words=3)
        if k == 0:
            continue
        d, par = lt.out.dist, lt.out.ptr
        ok = (par[:, v_arc] != u_arc[None, :]) & (par[:, u_arc] != v_arc[None, :])
        tot = np.where(ok, d[:, u_arc] + d[:, v_arc], INF)
        qidx = np.argmin(tot, axis=0)
        vals = tot[qidx, np.arange(len(v_arc))] + w_arc
        _fold(best, wit, vals, v_arc, u_arc, qidx, lt.nodes, lt.i)
    return _finish(net, best, wit, False, label, True, engine)


def check_critical_edge(g: Graph, cycle, s: int, dist_from_s=None, dist_to_s=None):
    """The edge of a minimum weight cycle that splits it into two shortest
    paths from ``s``.

    ``cycle`` lists the cycle's nodes in order (closed implicitly) and must
    contain ``s``.  Walking from ``s``, with ``d_i`` the cycle distance to
    the ``i``-th node, the edge ``(v_i, v_{i+1})`` with the last ``d_i <=
    floor(W/2)`` is returned after checking ``ceil(W/2) - w_i <= d_i`` and
    that both arcs of the cycle around it are shortest paths.  Raises
    ValueError when the checks fail.
    """
    from . import oracle

    cyc = list(cycle)
    if s not in cyc:
        raise ValueError("s is not on the cycle")
    k = cyc.index(s)
    cyc = cyc[k:] + cyc[:k] + [s]
    ws = [g.weight(a, b) for a, b in zip(cyc, cyc[1:])]
    total = sum(ws)
    prefix = [0]
    for x in ws:
        prefix.append(prefix[-1] + x)
    half_lo, half_hi = math.floor(total / 2), math.ceil(total / 2)
    i = max(j for j in range(len(ws)) if prefix[j] <= half_lo)
    a, b = cyc[i], cyc[i + 1]
    if not (half_hi - ws[i] <= prefix[i] <= half_lo):
        raise ValueError(f"no critical edge for s={s}")
    if dist_from_s is None:
        dist_from_s, _ = oracle.dijkstra_sssp(g, s)
    if dist_to_s is None:
        dist_to_s = oracle.dijkstra_to(g, s)
    tol = g.tolerance
    if abs(dist_from_s[a] - prefix[i]) > tol or abs(dist_to_s[b] - (total - prefix[i + 1])) > tol:
        raise ValueError(f"critical edge ({a}, {b}) is not split by shortest paths")
    return a, b
