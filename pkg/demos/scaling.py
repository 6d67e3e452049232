"""Round totals against n log^3 n for growing graphs.

    python3 demos/scaling.py            # about a minute
"""
from congest_cycles.cli import scaling_rows

for algo in ("mwc-directed", "mssp"):
    rows = scaling_rows(algo, [64, 256, 1024], [0])
    print(algo)
    prev = None
    for n, seed, me, mo, tot, norm in rows:
        step = "" if prev is None else f"  per-doubling {(tot / prev) ** 0.5:.2f}"
        print(f"  n={n:5d} measured={me:9d} modeled={mo:9d} total/(n lg^3 n)={norm:.3f}{step}")
        prev = tot
