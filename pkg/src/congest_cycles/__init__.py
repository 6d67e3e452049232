"""Round-accurate CONGEST simulation of hop-limited shortest paths, blocker
sets, shortest cycles and multi-source shortest paths."""
from .blockers import (
    BlockerSequence,
    BlockerSet,
    build_blocker_sequence,
    decomposition_witness,
    full_length_paths,
    greedy_blocker,
    hop_schedule,
    level_tables,
    verify_blocker,
)
from .cycles import (
    CycleResult,
    admissible_set,
    check_critical_edge,
    directed_ansc,
    directed_mwc,
    undirected_mwc,
)
from .graph import Graph, GraphError, dump_graph, gen_path, gen_random, gen_weighted_cycle, load_graph, reverse
from .hoppaths import (
    CsspCollection,
    HopTable,
    HopTables,
    build_csssp,
    h_hop_in_sssp,
    h_hop_out_sssp,
    multi_source_hop_sssp,
    verify_csssp,
    verify_h_hop_accurate,
)
from .mssp import MsspResult, level_floor, mssp
from .sim import (
    BandwidthError,
    MaxRoundsError,
    Network,
    NodeProgram,
    RoundLedger,
    broadcast_all,
    charge_modeled,
    run_protocol,
)

__version__ = "0.1.0"
