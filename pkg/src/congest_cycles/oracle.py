"""Centralized reference computations.

Nothing here touches the simulator.  The routines use plain Python lists and
heaps so they share no data layout or relaxation order with the protocol code.
"""
from __future__ import annotations

import heapq
import math
from itertools import permutations

import numpy as np

from .graph import Graph

INF = math.inf


def _adj(g: Graph):
    adj = [[] for _ in range(g.n)]
    for u, v, w in g.edges:
        adj[u].append((v, w))
        if not g.directed:
            adj[v].append((u, w))
    return adj


def _radj(g: Graph):
    adj = [[] for _ in range(g.n)]
    for u, v, w in g.edges:
        adj[v].append((u, w))
        if not g.directed:
            adj[u].append((v, w))
    return adj


def _dijkstra(adj, n, s, skip=None):
    dist = [INF] * n
    parent = [-1] * n
    dist[s] = 0
    parent[s] = s
    heap = [(0, s)]
    while heap:
        d, x = heapq.heappop(heap)
        if d > dist[x]:
            continue
        for y, w in adj[x]:
            if skip is not None and ((x, y) == skip or (y, x) == skip):
                continue
            nd = d + w
            if nd < dist[y]:
                dist[y] = nd
                parent[y] = x
                heapq.heappush(heap, (nd, y))
    return dist, parent


def dijkstra_sssp(g: Graph, s: int) -> tuple[np.ndarray, list[int]]:
    """Exact distances from ``s`` and a shortest-path parent for each node."""
    dist, parent = _dijkstra(_adj(g), g.n, s)
    return np.array(dist, dtype=float), parent


def dijkstra_to(g: Graph, t: int) -> np.ndarray:
    """Exact distances from every node to ``t``."""
    dist, _ = _dijkstra(_radj(g), g.n, t)
    return np.array(dist, dtype=float)


def apsp(g: Graph) -> np.ndarray:
    """``D[u, v]`` = exact distance from ``u`` to ``v``."""
    adj = _adj(g)
    return np.array([_dijkstra(adj, g.n, s)[0] for s in range(g.n)], dtype=float)


def hop_bounded_dp(g: Graph, s: int, h: int) -> np.ndarray:
    """Minimum weight over walks from ``s`` with at most ``h`` edges.

    Layered dynamic program: layer ``k`` holds the best weight with at most
    ``k`` edges, computed edge by edge from layer ``k - 1``.
    """
    prev = [INF] * g.n
    prev[s] = 0
    arcs = [(u, v, w) for u, v, w in g.edges]
    if not g.directed:
        arcs += [(v, u, w) for u, v, w in g.edges]
    for _ in range(h):
        cur = list(prev)
        changed = False
        for u, v, w in arcs:
            if prev[u] + w < cur[v]:
                cur[v] = prev[u] + w
                changed = True
        prev = cur
        if not changed:
            break
    return np.array(prev, dtype=float)


def hop_bounded_to(g: Graph, t: int, h: int) -> np.ndarray:
    """Minimum weight over walks into ``t`` with at most ``h`` edges."""
    rev = Graph(g.n, [(v, u, w) for u, v, w in g.edges], directed=g.directed,
                require_connected=False)
    return hop_bounded_dp(rev, t, h)


def oracle_directed_ansc(g: Graph) -> np.ndarray:
    """Per node, the weight of the shortest directed cycle through it."""
    if not g.directed:
        raise ValueError("needs a directed graph")
    radj = _radj(g)
    res = np.full(g.n, INF)
    for v in range(g.n):
        back, _ = _dijkstra(radj, g.n, v)   # back[u] = dist(u, v)
        for x, y, w in g.edges:
            if x == v:
                res[v] = min(res[v], w + back[y])
    return res


def oracle_undirected_mwc(g: Graph) -> float:
    """min over edges ``(u, v)`` of ``w + dist(u, v)`` in the graph without that edge."""
    return oracle_undirected_mwc_cycle(g)[0]


def oracle_undirected_mwc_cycle(g: Graph) -> tuple[float, list[int] | None]:
    """Weight of a minimum weight cycle and one such cycle as a node list."""
    if g.directed:
        raise ValueError("needs an undirected graph")
    adj = _adj(g)
    best, cyc = INF, None
    for u, v, w in g.edges:
        dist, parent = _dijkstra(adj, g.n, u, skip=(u, v))
        if dist[v] + w < best:
            best = dist[v] + w
            path = [v]
            while path[-1] != u:
                path.append(parent[path[-1]])
            cyc = path[::-1]       # u ... v, closed by the edge (v, u)
    return best, cyc


def simple_cycles(g: Graph):
    """Every simple cycle as (weight, node tuple starting at its smallest node).

    Exhaustive; meant for graphs with at most about nine nodes.
    """
    n = g.n
    out = []
    min_len = 2 if g.directed else 3
    for k in range(min_len, n + 1):
        for start in range(n):
            for rest in permutations([x for x in range(start + 1, n)], k - 1):
                cyc = (start,) + rest
                if not g.directed and rest[0] > rest[-1]:
                    continue   # each undirected cycle once
                total = 0
                ok = True
                for a, b in zip(cyc, cyc[1:] + (start,)):
                    if not g.has_edge(a, b):
                        ok = False
                        break
                    total += g.weight(a, b)
                if ok:
                    out.append((total, cyc))
    return out


def enumerate_mwc(g: Graph) -> float:
    return min((w for w, _ in simple_cycles(g)), default=INF)


def enumerate_ansc(g: Graph) -> np.ndarray:
    res = np.full(g.n, INF)
    for w, cyc in simple_cycles(g):
        for v in cyc:
            res[v] = min(res[v], w)
    return res


def hop_bounded_walk(g: Graph, s: int, t: int, h: int) -> tuple[float, list[int] | None]:
    """A minimum weight walk from ``s`` to ``t`` with at most ``h`` edges."""
    arcs = [(u, v, w) for u, v, w in g.edges]
    if not g.directed:
        arcs += [(v, u, w) for u, v, w in g.edges]
    layers = [[INF] * g.n]
    layers[0][s] = 0
    back = [[-1] * g.n]
    for _ in range(h):
        prev = layers[-1]
        cur, pred = list(prev), [-2] * g.n     # -2: same as previous layer
        for u, v, w in arcs:
            if prev[u] + w < cur[v]:
                cur[v] = prev[u] + w
                pred[v] = u
        layers.append(cur)
        back.append(pred)
    if layers[-1][t] == INF:
        return INF, None
    walk, x, k = [t], t, h
    while k > 0:
        p = back[k][x]
        if p != -2:
            x = p
            walk.append(x)
        k -= 1
    return layers[-1][t], walk[::-1]
