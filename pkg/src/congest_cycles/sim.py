"""Round-synchronous CONGEST execution engine and round accounting.

Two execution paths exist for the communication patterns the algorithms use:

* :func:`run_protocol` steps one :class:`NodeProgram` per node in lockstep,
  delivering inboxes sorted by sender and auditing bandwidth.  It is the
  reference semantics.
* Batched executors (here for broadcast and neighbor exchange, in
  :mod:`congest_cycles.hoppaths` for Bellman-Ford) compute the same
  synchronous schedule with numpy.  They produce identical round and message
  counts, which the test suite checks against the reference programs.

Only the blocker-set construction is charged as *modeled* rounds; everything
else is simulated and counted as *measured* rounds.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .graph import Graph

DEFAULT_BETA = 3


class SimulationError(RuntimeError):
    pass


class BandwidthError(SimulationError):
    """A node tried to put too much on one edge in one round."""


class MaxRoundsError(SimulationError):
    pass


def log2c(n: int) -> int:
    """Ceiling of log2(n), at least 1."""
    return max(1, math.ceil(math.log2(n))) if n > 1 else 1


def default_max_rounds(n: int) -> int:
    env = os.environ.get("CONGEST_MAX_ROUNDS")
    if env:
        return int(env)
    return 50 * n * log2c(n) ** 4


@dataclass
class PhaseRecord:
    label: str
    measured_rounds: int = 0
    modeled_rounds: int = 0
    messages: int = 0


@dataclass
class RoundLedger:
    """Per-phase round and message counters.  Repeated labels accumulate."""

    phases: list[PhaseRecord] = field(default_factory=list)

    def _phase(self, label: str) -> PhaseRecord:
        for rec in self.phases:
            if rec.label == label:
                return rec
        rec = PhaseRecord(label)
        self.phases.append(rec)
        return rec

    def record(self, label: str, measured: int = 0, modeled: int = 0, messages: int = 0) -> None:
        if measured < 0 or modeled < 0 or messages < 0:
            raise ValueError("ledger counters must be non-negative")
        rec = self._phase(label)
        rec.measured_rounds += int(measured)
        rec.modeled_rounds += int(modeled)
        rec.messages += int(messages)

    @property
    def measured(self) -> int:
        return sum(p.measured_rounds for p in self.phases)

    @property
    def modeled(self) -> int:
        return sum(p.modeled_rounds for p in self.phases)

    @property
    def total(self) -> int:
        return self.measured + self.modeled

    @property
    def messages(self) -> int:
        return sum(p.messages for p in self.phases)

    def get(self, label: str) -> PhaseRecord | None:
        for rec in self.phases:
            if rec.label == label:
                return rec
        return None

    def prefixed(self, prefix: str) -> tuple[int, int]:
        """(measured, modeled) summed over phases whose label starts with ``prefix``."""
        sel = [p for p in self.phases if p.label.startswith(prefix)]
        return sum(p.measured_rounds for p in sel), sum(p.modeled_rounds for p in sel)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["phase", "measured_rounds", "modeled_rounds", "messages"])
        for p in self.phases:
            w.writerow([p.label, p.measured_rounds, p.modeled_rounds, p.messages])
        return buf.getvalue()

    def to_json(self) -> str:
        data = {
            "phases": [
                {"phase": p.label, "measured_rounds": p.measured_rounds,
                 "modeled_rounds": p.modeled_rounds, "messages": p.messages}
                for p in self.phases
            ],
            "measured": self.measured,
            "modeled": self.modeled,
            "total": self.total,
        }
        return json.dumps(data, indent=2, sort_keys=True) + "\n"


def charge_modeled(ledger: RoundLedger, label: str, amount: int) -> RoundLedger:
    """Add ``amount`` modeled (not simulated) rounds to phase ``label``."""
    if amount < 0:
        raise ValueError("modeled charge must be non-negative")
    ledger.record(label, modeled=amount)
    return ledger


@dataclass
class BfsTree:
    root: int
    parent: np.ndarray       # parent[root] == -1
    depth: np.ndarray
    children: tuple[tuple[int, ...], ...]
    order: tuple[int, ...]   # BFS order, root first

    @property
    def height(self) -> int:
        return int(self.depth.max())


class Network:
    """A graph plus the simulation configuration and its round ledger.

    Parameters
    ----------
    graph : Graph
    ledger : RoundLedger, optional
    beta : int
        Machine words allowed per message (one message per edge direction per round).
    blocker_round_constant : float
        Multiplier of the modeled cost charged for each blocker-set construction.
    blocker_log_power : int
        Exponent of ``ceil(log2 n)`` in that modeled cost.
    max_rounds : int, optional
        Cap for a single :func:`run_protocol` call.
    """

    def __init__(
        self,
        graph: Graph,
        ledger: RoundLedger | None = None,
        beta: int = DEFAULT_BETA,
        blocker_round_constant: float = 1.0,
        blocker_log_power: int = 1,
        max_rounds: int | None = None,
    ):
        if beta < 1:
            raise ValueError("beta must be >= 1")
        self.graph = graph
        self.ledger = ledger if ledger is not None else RoundLedger()
        self.beta = beta
        self.blocker_round_constant = blocker_round_constant
        self.blocker_log_power = blocker_log_power
        self.max_rounds = max_rounds if max_rounds is not None else default_max_rounds(graph.n)
        self._tree: BfsTree | None = None

    @property
    def n(self) -> int:
        return self.graph.n

    def bfs_tree(self) -> BfsTree:
        """BFS spanning tree rooted at node 0, built once by a simulated flood."""
        if self._tree is None:
            self._tree = _build_bfs_tree(self)
        return self._tree


def as_network(g: Graph | Network) -> Network:
    return g if isinstance(g, Network) else Network(g)


# --------------------------------------------------------------------------
# reference engine


class NodeProgram:
    """One node's program.

    Each round the engine calls :meth:`outbox` on every node, delivers the
    messages, then calls :meth:`deliver` with the inbox sorted by sender ID.
    A run ends after the first round at whose end every program is ``done``.
    """

    done: bool = False

    def outbox(self, rnd: int) -> dict[int, tuple]:
        return {}

    def deliver(self, rnd: int, inbox: list[tuple[int, tuple]]) -> None:
        pass


def run_protocol(
    net: Network,
    programs: Sequence[NodeProgram],
    label: str,
    max_rounds: int | None = None,
) -> Sequence[NodeProgram]:
    """Run ``programs`` in lockstep rounds and record the phase in the ledger.

    Raises :class:`BandwidthError` if a message exceeds ``net.beta`` words or
    targets a non-neighbor, and :class:`MaxRoundsError` if the run does not
    finish in time.
    """
    g = net.graph
    if len(programs) != g.n:
        raise ValueError(f"need one program per node ({g.n}), got {len(programs)}")
    cap = net.max_rounds if max_rounds is None else max_rounds
    nbr_sets = [set(a) for a in g.nbrs]
    rounds = 0
    messages = 0
    while not all(p.done for p in programs):
        if rounds >= cap:
            raise MaxRoundsError(f"phase {label!r} exceeded {cap} rounds")
        rounds += 1
        inboxes: list[list[tuple[int, tuple]]] = [[] for _ in range(g.n)]
        for v, prog in enumerate(programs):
            out = prog.outbox(rounds)
            for u, msg in out.items():
                if u not in nbr_sets[v]:
                    raise BandwidthError(f"round {rounds}: node {v} sent to non-neighbor {u}")
                if len(msg) > net.beta:
                    raise BandwidthError(
                        f"round {rounds}: node {v} -> {u} message has {len(msg)} words "
                        f"(beta={net.beta})")
                inboxes[u].append((v, msg))
                messages += 1
        for u, prog in enumerate(programs):
            box = inboxes[u]
            box.sort(key=lambda e: e[0])
            prog.deliver(rounds, box)
    net.ledger.record(label, measured=rounds, messages=messages)
    return programs


# --------------------------------------------------------------------------
# BFS tree


class _BfsProgram(NodeProgram):
    """Flood from the root; each node announces ``(parent)`` once after joining.

    A node is done once it has heard an announcement from every neighbor, at
    which point it knows its children exactly.
    """

    def __init__(self, v: int, nbrs: Sequence[int], root: int):
        self.v = v
        self.nbrs = nbrs
        self.parent = -1 if v == root else None
        self.depth = 0 if v == root else None
        self.heard: dict[int, int] = {}
        self.announce = v == root
        self.children: list[int] = []
        self.done = not nbrs

    def outbox(self, rnd):
        if not self.announce:
            return {}
        self.announce = False
        return {u: (self.parent, self.depth) for u in self.nbrs}

    def deliver(self, rnd, inbox):
        for u, (par, dep) in inbox:
            self.heard[u] = par
            if par == self.v:
                self.children.append(u)
            if self.depth is None:
                # the first announcements all come from one BFS layer; take min ID
                self.parent, self.depth = u, dep + 1
                self.announce = True
        self.done = len(self.heard) == len(self.nbrs) and not self.announce


def _build_bfs_tree(net: Network) -> BfsTree:
    g = net.graph
    progs = [_BfsProgram(v, g.nbrs[v], 0) for v in range(g.n)]
    run_protocol(net, progs, "bfs-tree")
    parent = np.array([-1 if p.parent is None else p.parent for p in progs], dtype=np.int64)
    depth = np.array([p.depth for p in progs], dtype=np.int64)
    children = tuple(tuple(sorted(p.children)) for p in progs)
    order = tuple(int(v) for v in np.lexsort((np.arange(g.n), depth)))
    return BfsTree(0, parent, depth, children, order)


# --------------------------------------------------------------------------
# broadcast


@dataclass
class BroadcastResult:
    items: list[tuple]          # canonical order: (origin, index) ascending
    origins: list[tuple[int, int]]
    rounds: int
    messages: int


def _canonical(items: Sequence[Sequence[tuple]]) -> tuple[list[tuple], list[tuple[int, int]]]:
    flat, keys = [], []
    for v, lst in enumerate(items):
        for j, it in enumerate(lst):
            flat.append(tuple(it))
            keys.append((v, j))
    return flat, keys


class _PipelineProgram(NodeProgram):
    """FIFO upcast to the root, then FIFO downcast of the root's stream.

    Upward stream of a node: its own items, then items from children in
    arrival order (ties by child ID), then an end-marker ``()`` once every
    child has sent its end-marker.  The root's stream, in the same order, is
    relayed to every child; interior nodes relay what they get from their
    parent.  Items are at most ``beta`` words; the end-marker is zero words.
    """

    def __init__(self, v: int, tree: BfsTree, own: Sequence[tuple]):
        self.v = v
        self.is_root = tree.parent[v] < 0
        self.parent = int(tree.parent[v])
        self.children = tree.children[v]
        self.up: list[tuple] = list(own)
        self.up_pos = 0
        self.down: list[tuple] = list(own) if self.is_root else []
        self.down_pos = 0
        # a non-root node learns everything, its own items included, from its parent
        self.known: list[tuple] = list(own) if self.is_root else []
        self.eos_waiting = set(self.children)
        self.up_closed = False
        if not self.eos_waiting:
            self._close_up()
        self.down_closed = False
        # a lone root has nobody to talk to
        self.done = self.is_root and not self.children

    def _close_up(self):
        self.up_closed = True
        if self.is_root:
            self.down.append(())
        else:
            self.up.append(())

    def outbox(self, rnd):
        out = {}
        if not self.is_root and self.up_pos < len(self.up):
            out[self.parent] = self.up[self.up_pos]
            self.up_pos += 1
        if self.down_pos < len(self.down):
            msg = self.down[self.down_pos]
            self.down_pos += 1
            for c in self.children:
                out[c] = msg
        return out

    def deliver(self, rnd, inbox):
        for u, msg in inbox:
            if u == self.parent:
                if self.children:
                    self.down.append(msg)
                if msg == ():
                    self.down_closed = True
                else:
                    self.known.append(msg)
            else:
                if msg == ():
                    self.eos_waiting.discard(u)
                    if not self.eos_waiting:
                        self._close_up()
                elif self.is_root:
                    self.known.append(msg)
                    self.down.append(msg)
                else:
                    self.up.append(msg)
        got_end = self.down_closed or (self.is_root and self.up_closed)
        self.done = got_end and self.down_pos == len(self.down) and (
            self.is_root or self.up_pos == len(self.up))


def _pipeline_schedule(avail: np.ndarray) -> np.ndarray:
    """Send rounds of a FIFO queue sending one entry per round.

    ``avail[k]`` is the earliest round entry ``k`` may be sent; entries are
    already in queue order.  Returns strictly increasing send rounds.
    """
    if len(avail) == 0:
        return avail
    k = np.arange(len(avail), dtype=np.int64)
    return np.maximum.accumulate(avail - k) + k


def _broadcast_batched(net: Network, counts: Sequence[int]) -> tuple[np.ndarray, int, int]:
    """Schedule of the pipelined broadcast.  Returns (root stream order, rounds, messages).

    Mirrors :class:`_PipelineProgram` exactly: an entry received in round r is
    appended to the receiver's queue at the end of round r and may leave in
    round r + 1.
    """
    tree = net.bfs_tree()
    n = net.n
    offsets = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    messages = 0
    # per node: ids (global item index, -1 = end-marker) and arrival round at parent
    up_ids: dict[int, np.ndarray] = {}
    up_arr: dict[int, np.ndarray] = {}
    root_ids = root_avail = None
    for v in reversed(tree.order):
        own = np.arange(offsets[v], offsets[v + 1], dtype=np.int64)
        ids = [own]
        avail = [np.ones(len(own), dtype=np.int64)]
        child_sort = [np.zeros(len(own), dtype=np.int64)]  # arrival round, 0 = own
        child_key = [np.full(len(own), -1, dtype=np.int64)]
        eos_round = 0
        for c in tree.children[v]:
            cid, carr = up_ids.pop(c), up_arr.pop(c)
            items = cid >= 0
            ids.append(cid[items])
            avail.append(carr[items] + 1)
            child_sort.append(carr[items])
            child_key.append(np.full(int(items.sum()), c, dtype=np.int64))
            eos_round = max(eos_round, int(carr[~items][0]))
        ids_a = np.concatenate(ids)
        av_a = np.concatenate(avail)
        order = np.lexsort((np.concatenate(child_key), np.concatenate(child_sort)))
        ids_a, av_a = ids_a[order], av_a[order]
        # end-marker joins the queue at the end of the round the last child marker arrived
        ids_a = np.append(ids_a, -1)
        av_a = np.append(av_a, eos_round + 1)
        if tree.parent[v] < 0:
            root_ids, root_avail = ids_a, av_a
        else:
            send = _pipeline_schedule(av_a)
            up_ids[v], up_arr[v] = ids_a, send
            messages += len(send)
    # downcast: the root relays its queue; children relay what they receive
    send_root = _pipeline_schedule(root_avail)
    arrival = {0: send_root}
    rounds = 0
    for v in tree.order:
        sends = arrival[v] if tree.parent[v] < 0 else _pipeline_schedule(arrival[v] + 1)
        for c in tree.children[v]:
            arrival[c] = sends
            messages += len(sends)
            rounds = max(rounds, int(sends[-1]))
        if tree.parent[v] >= 0:
            del arrival[v]
    return root_ids, rounds, messages


def broadcast_all(
    net: Network,
    items: Sequence[Sequence[tuple]],
    label: str = "broadcast",
    engine: str = "batched",
) -> BroadcastResult:
    """Deliver every node's items to every node.

    ``items[v]`` is the list of items node ``v`` holds; each item is a tuple
    of at most ``beta`` words.  The returned view is the same at every node
    and lists items sorted by (origin, index).  Uses the cached BFS tree.
    """
    g = net.graph
    if len(items) != g.n:
        raise ValueError("need one item list per node")
    for lst in items:
        for it in lst:
            if len(it) > net.beta or len(it) == 0:
                raise BandwidthError(f"broadcast item {it!r} must have 1..{net.beta} words")
    flat, keys = _canonical(items)
    tree = net.bfs_tree()
    if engine == "nodes":
        progs = [_PipelineProgram(v, tree, [tuple(x) for x in items[v]]) for v in range(g.n)]
        before = net.ledger.get(label)
        m0 = (before.measured_rounds, before.messages) if before else (0, 0)
        run_protocol(net, progs, label)
        rec = net.ledger.get(label)
        rounds, messages = rec.measured_rounds - m0[0], rec.messages - m0[1]
        want = sorted(flat)
        for p in progs:
            if sorted(p.known) != want:
                raise SimulationError(f"node {p.v} missed broadcast items")
    elif engine == "batched":
        _, rounds, messages = _broadcast_batched(net, [len(x) for x in items])
        net.ledger.record(label, measured=rounds, messages=messages)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    return BroadcastResult(flat, keys, rounds, messages)


# --------------------------------------------------------------------------
# neighbor exchange


class _ExchangeProgram(NodeProgram):
    def __init__(self, v: int, targets: Sequence[int], payload: Sequence[tuple]):
        self.v = v
        self.targets = targets
        self.payload = payload
        self.received: dict[int, list[tuple]] = {}
        self.pos = 0
        self.done = len(payload) == 0

    def outbox(self, rnd):
        if self.pos >= len(self.payload):
            return {}
        msg = self.payload[self.pos]
        self.pos += 1
        return {u: msg for u in self.targets}

    def deliver(self, rnd, inbox):
        for u, msg in inbox:
            self.received.setdefault(u, []).append(msg)
        self.done = self.pos >= len(self.payload)


def exchange_with_neighbors(
    net: Network,
    targets: Sequence[Sequence[int]],
    per_node_payload: Sequence[Sequence[tuple]] | int,
    label: str,
    engine: str = "batched",
    words: int = 2,
) -> dict[int, dict[int, list[tuple]]] | None:
    """Every node ``u`` sends its payload tuples, one per round, to all of ``targets[u]``.

    All nodes send the same number of tuples (one per blocker), so the phase
    takes exactly that many rounds.  The batched engine only accounts rounds
    and messages (the algorithms read the values from the tables directly)
    and returns ``None``; the node engine returns what every node received.
    Passing an int as ``per_node_payload`` gives the tuple count; each tuple
    is then ``words`` words long.
    """
    g = net.graph
    if isinstance(per_node_payload, int):
        k = per_node_payload
        payload = None
        if k and words > net.beta:
            raise BandwidthError(f"exchange phase {label!r}: {words}-word tuples exceed beta={net.beta}")
    else:
        payload = per_node_payload
        lens = {len(p) for p in payload}
        if len(lens) > 1:
            raise ValueError("every node must send the same number of tuples")
        k = lens.pop() if lens else 0
        for p in payload:
            for msg in p:
                if len(msg) > net.beta:
                    raise BandwidthError(f"exchange tuple {msg!r} exceeds beta={net.beta}")
    if engine == "batched":
        arcs = sum(len(t) for t in targets)
        net.ledger.record(label, measured=k, messages=k * arcs)
        return None
    if payload is None:
        payload = [[(0,) * words] * k for _ in range(g.n)]
    progs = [_ExchangeProgram(v, targets[v], payload[v]) for v in range(g.n)]
    run_protocol(net, progs, label)
    return {p.v: p.received for p in progs}
