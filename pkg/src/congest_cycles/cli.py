"""Command-line front end.

    congest-cycles run --algo mwc-directed --gen 64,4,7,20,directed --out results/
    congest-cycles scaling --algo mssp --sizes 64,256,1024 --seeds 0,1,2

``run`` writes ``result.<format>`` and a ledger CSV and prints the answer
with the round totals.  ``scaling`` prints (or writes) one CSV row per
(size, seed).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from .blockers import build_blocker_sequence
from .cycles import directed_ansc, directed_mwc, undirected_mwc
from .graph import Graph, GraphError, gen_random, load_graph
from .hoppaths import multi_source_hop_sssp
from .mssp import max_sources, mssp
from .sim import Network, SimulationError, log2c

ALGOS = ("ansc-directed", "mwc-directed", "mwc-undirected", "mssp", "blocker-seq", "hop-sssp")


class CliError(Exception):
    pass


def _fmt(x) -> str:
    if not math.isfinite(x):
        return "inf"
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def parse_gen(text: str) -> Graph:
    """``n,deg,seed,wmax,dir`` with ``dir`` one of directed/undirected (or d/u)."""
    parts = text.split(",")
    if len(parts) != 5:
        raise CliError(f"--gen wants n,deg,seed,wmax,dir; got {text!r}")
    try:
        n, deg, seed, wmax = int(parts[0]), float(parts[1]), int(parts[2]), int(parts[3])
    except ValueError:
        raise CliError(f"bad --gen value {text!r}") from None
    kind = parts[4].strip().lower()
    if kind not in ("directed", "undirected", "d", "u"):
        raise CliError(f"--gen direction must be directed or undirected, got {parts[4]!r}")
    return gen_random(n, deg, seed, wmax, directed=kind in ("directed", "d"))


def parse_sources(text: str | None, n: int, default: int) -> list[int]:
    """A bare integer is a count (nodes ``0..k-1``); a comma list gives IDs."""
    if text is None:
        return list(range(min(default, n)))
    text = text.strip()
    try:
        if "," in text:
            ids = [int(x) for x in text.split(",") if x.strip()]
        else:
            k = int(text)
            if k < 1 or k > n:
                raise CliError(f"source count {k} out of range [1, {n}]")
            ids = list(range(k))
    except ValueError:
        raise CliError(f"bad --sources value {text!r}") from None
    for s in ids:
        if not 0 <= s < n:
            raise CliError(f"source {s} is not a node")
    return ids


def _graph(args) -> Graph:
    if (args.graph is None) == (args.gen is None):
        raise CliError("give exactly one of --graph or --gen")
    if args.graph is not None:
        return load_graph(Path(args.graph).read_text())
    return parse_gen(args.gen)


def _network(g: Graph, args) -> Network:
    return Network(g, beta=args.beta, blocker_round_constant=args.blocker_round_constant,
                   blocker_log_power=args.blocker_log_power)


def _run_algo(algo: str, net: Network, args) -> tuple[str, str]:
    """Run one algorithm; returns (summary line, result document)."""
    g = net.graph
    fmt = args.format
    h0 = args.h0_override
    if algo in ("ansc-directed", "mwc-directed"):
        if not g.directed:
            raise CliError(f"{algo} needs a directed graph")
        res = (directed_mwc if algo == "mwc-directed" else directed_ansc)(net, h0=h0, engine=args.engine)
        line = f"mwc={_fmt(res.global_min)}"
        return line, res.to_json() if fmt == "json" else res.to_csv()
    if algo == "mwc-undirected":
        if g.directed:
            raise CliError("mwc-undirected needs an undirected graph")
        res = undirected_mwc(net, h0=h0, engine=args.engine)
        return f"mwc={_fmt(res.global_min)}", res.to_json() if fmt == "json" else res.to_csv()
    if algo == "mssp":
        src = parse_sources(args.sources, g.n, max_sources(g.n))
        res = mssp(net, src, h0=h0, engine=args.engine)
        return f"mssp sources={len(src)}", res.to_json() if fmt == "json" else res.to_csv()
    if algo == "blocker-seq":
        seq = build_blocker_sequence(net, h0=h0, engine=args.engine)
        sizes = ",".join(str(lv.size) for lv in seq.levels)
        if fmt == "json":
            doc = seq.to_json()
        else:
            doc = "i,h_i,size,Q_i\n" + "".join(
                f"{lv.i},{lv.h},{lv.size},{' '.join(map(str, lv.nodes))}\n" for lv in seq.levels)
        return f"levels={len(seq.levels)} sizes={sizes}", doc
    if algo == "hop-sssp":
        src = parse_sources(args.sources, g.n, 1)
        h = g.n - 1 if args.h is None else args.h
        if h < 0:
            raise CliError("--h must be >= 0")
        tabs = multi_source_hop_sssp(net, src, h, args.direction, engine=args.engine)
        if fmt == "json":
            data = {str(t.source): {"dist": [None if not math.isfinite(x) else float(x) for x in t.dist],
                                    "hops": t.hops.tolist(), "parent_or_next": t.ptr.tolist()}
                    for t in tabs}
            doc = json.dumps({"h": h, "direction": args.direction, "tables": data},
                             indent=2, sort_keys=True) + "\n"
        else:
            doc = "".join(f"# source {t.source}\n" + t.to_csv() for t in tabs)
        return f"hop-sssp sources={len(src)} h={h}", doc
    raise CliError(f"unknown algorithm {algo!r}")


def cmd_run(args) -> int:
    g = _graph(args)
    net = _network(g, args)
    line, doc = _run_algo(args.algo, net, args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"result.{args.format}").write_text(doc)
    ledger = Path(args.ledger) if args.ledger else out / "ledger.csv"
    ledger.parent.mkdir(parents=True, exist_ok=True)
    ledger.write_text(net.ledger.to_csv() if ledger.suffix != ".json" else net.ledger.to_json())
    lg = net.ledger
    print(line)
    print(f"rounds total={lg.total} measured={lg.measured} modeled={lg.modeled}")
    return 0


def scaling_rows(algo: str, sizes, seeds, deg: float = 4.0, wmax: int = 20, args=None):
    """One row per (n, seed): n, seed, measured, modeled, total, total / (n * ceil(log2 n)**3)."""
    if not sizes:
        raise CliError("no sizes given")
    if list(sizes) != sorted(sizes):
        raise CliError("sizes must be ascending")
    if algo not in ("ansc-directed", "mwc-directed", "mwc-undirected", "mssp"):
        raise CliError(f"scaling supports the cycle and mssp algorithms, not {algo!r}")
    rows = []
    for n in sizes:
        for seed in seeds:
            g = gen_random(n, deg, seed, wmax, directed=algo != "mwc-undirected")
            net = Network(g) if args is None else _network(g, args)
            h0 = None if args is None else args.h0_override
            if algo == "mssp":
                mssp(net, list(range(max_sources(n))), h0=h0)
            elif algo == "mwc-undirected":
                undirected_mwc(net, h0=h0)
            elif algo == "ansc-directed":
                directed_ansc(net, h0=h0)
            else:
                directed_mwc(net, h0=h0)
            lg = net.ledger
            rows.append((n, seed, lg.measured, lg.modeled, lg.total,
                         lg.total / (n * log2c(n) ** 3)))
    return rows


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise CliError(f"bad integer list {text!r}") from None


def cmd_scaling(args) -> int:
    rows = scaling_rows(args.algo, _int_list(args.sizes), _int_list(args.seeds),
                        args.deg, args.wmax, args)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "seed", "measured", "modeled", "total", "total_per_nlog3n"])
    for n, seed, me, mo, tot, norm in rows:
        w.writerow([n, seed, me, mo, tot, f"{norm:.6f}"])
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def _common(p: argparse.ArgumentParser):
    p.add_argument("--h0-override", type=int, default=None,
                   help="start the hop schedule at this bound instead of ceil(log2 n)^2")
    p.add_argument("--beta", type=int, default=3, help="words per message (default 3)")
    p.add_argument("--blocker-round-constant", type=float, default=1.0)
    p.add_argument("--blocker-log-power", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="congest-cycles", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="run one algorithm on one graph")
    r.add_argument("--algo", required=True, choices=ALGOS)
    r.add_argument("--graph", help="edge-list file")
    r.add_argument("--gen", help="generator parameters n,deg,seed,wmax,dir")
    r.add_argument("--sources", help="count k (nodes 0..k-1) or comma-separated IDs")
    r.add_argument("--h", type=int, default=None, help="hop bound for hop-sssp (default n-1)")
    r.add_argument("--direction", choices=("out", "in"), default="out", help="hop-sssp direction")
    r.add_argument("--out", default="out", help="output directory")
    r.add_argument("--ledger", help="ledger file (.csv or .json); default OUT/ledger.csv")
    r.add_argument("--format", choices=("json", "csv"), default="json")
    r.add_argument("--engine", choices=("batched", "nodes"), default="batched")
    _common(r)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("scaling", help="round totals over graph sizes")
    s.add_argument("--algo", default="mwc-directed", choices=ALGOS[:4])
    s.add_argument("--sizes", default="64,256,1024")
    s.add_argument("--seeds", default="0,1,2")
    s.add_argument("--deg", type=float, default=4.0)
    s.add_argument("--wmax", type=int, default=20)
    s.add_argument("--out", help="CSV file; default stdout")
    _common(s)
    s.set_defaults(func=cmd_scaling)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, GraphError, SimulationError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
