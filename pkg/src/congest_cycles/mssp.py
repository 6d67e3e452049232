"""Exact shortest paths from a small source set (at most ``ceil(sqrt(n))`` sources).

Short paths come from a plain ``ceil(sqrt n)``-hop Bellman-Ford out of every
source.  Long paths pass through a blocker node of some level: each source
learns its hop-bounded distance to every blocker of the level, these
``(source, blocker, distance)`` triples are broadcast, and every node
combines them with its own distances from the blockers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blockers import build_blocker_sequence, hop_schedule, level_tables
from .graph import Graph
from .hoppaths import multi_source_hop_sssp
from .sim import Network, as_network, broadcast_all

INF = np.inf


def max_sources(n: int) -> int:
    return math.isqrt(n - 1) + 1 if n > 1 else 1


def level_floor(n: int, h0: int | None = None) -> int:
    """Largest level whose hop bound is at most ``sqrt(n) / 2``; 0 if none is."""
    hs = hop_schedule(n, h0)
    ok = [i for i, h in enumerate(hs) if h <= math.sqrt(n) / 2]
    return max(ok) if ok else 0


@dataclass
class MsspResult:
    """``dist[i, v]`` is the distance from ``sources[i]`` to ``v``.

    ``level_trace[i][v]`` says which phase produced the final value:
    ``"direct"`` for the short-path phase, ``(level, q)`` for a blocker
    ``q``, or None when ``v`` is unreachable.
    """

    sources: list
    dist: np.ndarray
    level_trace: list

    def to_csv(self) -> str:
        n = self.dist.shape[1]
        rows = ["source," + ",".join(str(v) for v in range(n))]
        for s, row in zip(self.sources, self.dist):
            cells = ["inf" if not math.isfinite(x) else
                     (str(int(x)) if float(x).is_integer() else repr(float(x))) for x in row]
            rows.append(f"{s}," + ",".join(cells))
        return "\n".join(rows) + "\n"

    def to_json(self) -> str:
        import json

        def num(x):
            if not math.isfinite(x):
                return None
            return int(x) if float(x).is_integer() else float(x)

        trace = [[t if t is None or t == "direct" else list(t) for t in row] for row in self.level_trace]
        data = {"sources": list(self.sources),
                "dist": [[num(x) for x in row] for row in self.dist],
                "level_trace": trace}
        return json.dumps(data, indent=2, sort_keys=True) + "\n"


def mssp(
    g: Graph | Network,
    sources,
    h0: int | None = None,
    label: str = "mssp",
    engine: str = "batched",
) -> MsspResult:
    net = as_network(g)
    n = net.n
    src = sorted(int(s) for s in sources)
    if not src:
        raise ValueError("need at least one source")
    if len(set(src)) != len(src):
        raise ValueError("sources must be distinct")
    if len(src) > max_sources(n):
        raise ValueError(f"source set too large: {len(src)} > {max_sources(n)}")

    seq = build_blocker_sequence(net, h0, f"{label}/blockers", engine)
    short = multi_source_hop_sssp(net, src, max_sources(n), "out", f"{label}/short", engine)
    dist = short.dist.copy()
    trace = [["direct" if math.isfinite(x) else None for x in row] for row in dist]

    lo = level_floor(n, h0)
    tabs = level_tables(net, seq, ("in", "out"), label, first_level=lo, engine=engine)
    src_arr = np.array(src)
    for lt in tabs:
        k = len(lt.nodes)
        # each source holds its distance to every blocker of the level
        items = [[] for _ in range(n)]
        for s in src:
            items[s] = [(s, int(q), float(lt.inc.dist[j, s])) for j, q in enumerate(lt.nodes)]
        broadcast_all(net, items, f"{label}/L{lt.i}/broadcast", engine)
        if k == 0:
            continue
        # cand[s, v] = min over q of dist(s -> q) + dist(q -> v)
        for a, s in enumerate(src_arr):
            tot = lt.inc.dist[:, s][:, None] + lt.out.dist      # (k, n)
            qi = np.argmin(tot, axis=0)
            cand = tot[qi, np.arange(n)]
            for b in np.nonzero(cand < dist[a])[0].tolist():
                dist[a, b] = cand[b]
                trace[a][b] = (lt.i, int(lt.nodes[qi[b]]))
    return MsspResult(src, dist, trace)
