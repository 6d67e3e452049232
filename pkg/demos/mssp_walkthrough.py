"""Exact distances from a few sources and which phase found each one.

    python3 demos/mssp_walkthrough.py
"""
from collections import Counter

import random

import numpy as np

from congest_cycles import Graph, Network, mssp, oracle
from congest_cycles.mssp import max_sources

# a long ring with a few random chords: many shortest paths need more hops
# than the short phase covers, so the blocker levels have work to do
rng = random.Random(1)
n = 400
edges = {(i, (i + 1) % n): rng.randint(1, 10) for i in range(n)}
for _ in range(12):
    a, b = rng.sample(range(n), 2)
    edges.setdefault((min(a, b), max(a, b)), rng.randint(20, 60))
g = Graph(n, [(a, b, w) for (a, b), w in edges.items()], directed=False)
k = max_sources(g.n)
net = Network(g)
res = mssp(net, range(k), h0=2)

ref = oracle.apsp(g)[:k]
print(f"n={g.n}, {k} sources, exact: {np.array_equal(res.dist, ref)}")

kinds = Counter("direct" if t == "direct" else "unreachable" if t is None else f"level {t[0]}"
                for row in res.level_trace for t in row)
for kind, cnt in sorted(kinds.items()):
    print(f"  {kind:12s} {cnt}")
print(f"rounds: measured {net.ledger.measured}, modeled {net.ledger.modeled}")
