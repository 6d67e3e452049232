"""Weighted graphs, the edge-list text format, and synthetic generators.

A :class:`Graph` is immutable once built.  Nodes are the dense range
``0..n-1``.  Directed graphs keep their arcs as given; undirected graphs store
each edge once (``u < v``) and expose both orientations through the arc arrays.
Communication in the simulator always runs over the underlying undirected
graph, so ``nbrs`` is defined for both kinds.
"""
from __future__ import annotations

import math
import random
from collections import deque
from typing import Iterable, Sequence

import numpy as np

Weight = int | float


class GraphError(ValueError):
    """Raised for malformed graph input or infeasible generator parameters."""


class Graph:
    """Weighted graph with non-negative weights and adjacency indices.

    Parameters
    ----------
    n : int
        Number of nodes.
    edges : iterable of (u, v, w)
        Parallel edges are collapsed to the lightest one.  Self-loops and
        negative weights raise :class:`GraphError`.
    directed : bool
    require_connected : bool
        Reject graphs whose underlying undirected graph is disconnected.
    """

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int, Weight]],
        directed: bool = True,
        require_connected: bool = True,
    ):
        if n < 1:
            raise GraphError("graph needs at least one node")
        self.n = int(n)
        self.directed = bool(directed)

        best: dict[tuple[int, int], Weight] = {}
        for u, v, w in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if isinstance(w, float) and not math.isfinite(w):
                raise GraphError(f"non-finite weight on edge ({u}, {v})")
            if w < 0:
                raise GraphError(f"negative weight {w} on edge ({u}, {v})")
            key = (u, v) if directed or u < v else (v, u)
            if key not in best or w < best[key]:
                best[key] = w
        self.edges: tuple[tuple[int, int, Weight], ...] = tuple(
            (u, v, best[(u, v)]) for u, v in sorted(best)
        )
        self.integer_weights = all(
            isinstance(w, (int, np.integer)) for _, _, w in self.edges
        )

        self._w: dict[tuple[int, int], Weight] = {}
        out_nbrs: list[list[int]] = [[] for _ in range(n)]
        in_nbrs: list[list[int]] = [[] for _ in range(n)]
        for u, v, w in self.edges:
            self._w[(u, v)] = w
            out_nbrs[u].append(v)
            in_nbrs[v].append(u)
            if not directed:
                self._w[(v, u)] = w
                out_nbrs[v].append(u)
                in_nbrs[u].append(v)
        self.out_nbrs = tuple(tuple(sorted(a)) for a in out_nbrs)
        self.in_nbrs = tuple(tuple(sorted(a)) for a in in_nbrs)
        self.nbrs = tuple(
            tuple(sorted(set(a) | set(b))) for a, b in zip(out_nbrs, in_nbrs)
        )

        arcs = sorted(self._w.items())
        dtype = np.int64 if self.integer_weights else np.float64
        self.arc_src = np.array([a for (a, _), _ in arcs], dtype=np.int64)
        self.arc_dst = np.array([b for (_, b), _ in arcs], dtype=np.int64)
        self.arc_w = np.array([w for _, w in arcs], dtype=dtype)

        if require_connected and not self.is_connected():
            raise GraphError("underlying undirected graph is disconnected")

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def tolerance(self) -> float:
        """Absolute comparison tolerance: exact for integer weights."""
        return 0.0 if self.integer_weights else 1e-9

    def weight(self, u: int, v: int) -> Weight:
        """Weight of arc ``u -> v`` (either orientation when undirected)."""
        return self._w[(u, v)]

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self._w

    def is_connected(self) -> bool:
        seen = [False] * self.n
        seen[0] = True
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for y in self.nbrs[x]:
                if not seen[y]:
                    seen[y] = True
                    queue.append(y)
        return all(seen)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n, self.directed, self.edges) == (other.n, other.directed, other.edges)

    def __hash__(self) -> int:
        return hash((self.n, self.directed, self.edges))

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"Graph({kind}, n={self.n}, m={self.m})"


def reverse(g: Graph) -> Graph:
    """Flip every arc of a directed graph; undirected graphs come back as-is."""
    if not g.directed:
        return g
    return Graph(g.n, ((v, u, w) for u, v, w in g.edges), directed=True,
                 require_connected=False)


def _parse_weight(tok: str) -> Weight:
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        w = float(tok)
    except ValueError:
        raise GraphError(f"bad weight {tok!r}") from None
    if not math.isfinite(w):
        raise GraphError(f"non-finite weight {tok!r}")
    return w


def load_graph(text: str) -> Graph:
    """Parse the edge-list format.

    Line 1 is ``<directed|undirected> <n> <m>``, followed by ``m`` lines of
    ``<u> <v> <w>``.  Lines starting with ``#`` and blank lines are ignored.
    Node IDs are compacted to ``[0, n)`` in sorted order.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise GraphError("empty graph document")
    head = lines[0].split()
    if len(head) != 3 or head[0] not in ("directed", "undirected"):
        raise GraphError(f"bad header {lines[0]!r}")
    try:
        n, m = int(head[1]), int(head[2])
    except ValueError:
        raise GraphError(f"bad header {lines[0]!r}") from None
    if n < 1 or m < 0:
        raise GraphError(f"bad header {lines[0]!r}")
    body = lines[1:]
    if len(body) != m:
        raise GraphError(f"header announces {m} edges, found {len(body)}")

    raw = []
    for ln in body:
        parts = ln.split()
        if len(parts) != 3:
            raise GraphError(f"bad edge line {ln!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphError(f"bad edge line {ln!r}") from None
        raw.append((u, v, _parse_weight(parts[2])))

    ids = sorted({u for u, _, _ in raw} | {v for _, v, _ in raw})
    if n == 1 and not ids:
        ids = [0]
    if len(ids) != n:
        raise GraphError(f"header announces {n} nodes, edges mention {len(ids)}")
    remap = {x: i for i, x in enumerate(ids)}
    edges = [(remap[u], remap[v], w) for u, v, w in raw]
    return Graph(n, edges, directed=head[0] == "directed")


def _fmt_weight(w: Weight) -> str:
    if isinstance(w, (int, np.integer)):
        return str(int(w))
    return repr(float(w))


def dump_graph(g: Graph) -> str:
    """Serialize to the edge-list format; inverse of :func:`load_graph`."""
    kind = "directed" if g.directed else "undirected"
    out = [f"{kind} {g.n} {g.m}"]
    out.extend(f"{u} {v} {_fmt_weight(w)}" for u, v, w in g.edges)
    return "\n".join(out) + "\n"


def gen_random(
    n: int,
    avg_degree: float,
    seed: int,
    weight_max: int = 20,
    directed: bool = True,
) -> Graph:
    """Random connected graph with integer weights in ``[1, weight_max]``.

    A random recursive spanning tree is laid first (random orientation per
    edge when directed), then extra distinct edges are drawn until the
    underlying average degree reaches ``avg_degree``.
    """
    if n < 2:
        raise GraphError("gen_random needs n >= 2")
    if weight_max < 1:
        raise GraphError("weight_max must be >= 1")
    m = max(n - 1, int(round(n * avg_degree / 2)))
    cap = n * (n - 1) if directed else n * (n - 1) // 2
    if m > cap:
        raise GraphError(f"avg_degree {avg_degree} needs {m} edges, at most {cap} fit")
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    used: set[tuple[int, int]] = set()
    edges = []

    def add(u: int, v: int) -> bool:
        key = (u, v) if directed else (min(u, v), max(u, v))
        if u == v or key in used:
            return False
        used.add(key)
        edges.append((u, v, rng.randint(1, weight_max)))
        return True

    for i in range(1, n):
        a, b = order[i], order[rng.randrange(i)]
        if directed and rng.random() < 0.5:
            a, b = b, a
        add(a, b)
    while len(edges) < m:
        add(rng.randrange(n), rng.randrange(n))
    return Graph(n, edges, directed=directed)


def gen_weighted_cycle(n: int, weights: Sequence[Weight], directed: bool = True) -> Graph:
    """The cycle ``0 -> 1 -> ... -> n-1 -> 0`` with ``weights[i]`` on arc ``i -> i+1``."""
    if len(weights) != n:
        raise GraphError(f"need {n} weights, got {len(weights)}")
    if n < (2 if directed else 3):
        raise GraphError(f"no simple {'directed' if directed else 'undirected'} cycle on {n} nodes")
    return Graph(n, [(i, (i + 1) % n, weights[i]) for i in range(n)], directed=directed)


def gen_path(weights: Sequence[Weight], directed: bool = True) -> Graph:
    """The path ``0 - 1 - ... - k`` carrying ``weights`` in order."""
    k = len(weights)
    return Graph(k + 1, [(i, i + 1, weights[i]) for i in range(k)], directed=directed)
