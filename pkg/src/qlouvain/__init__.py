"""Community detection by modularity optimization, with query-count
simulators for quantum-search variants of the sequential sweep."""

from __future__ import annotations

from .community import CommunityError, CommunityState, MoveDelta
from .graph import (
    DuplicateEdgeError,
    EdgeListParseError,
    EmptyGraphError,
    FcsConfig,
    Graph,
    GraphError,
    InfeasibleConfigError,
    SelfLoopError,
    aggregate,
    fcs_header,
    generate_fcs,
    graph_from_edges,
    load_edge_list,
    write_edge_list,
)
from .qcost import (
    DEFAULT_PARAMS,
    CostParams,
    e_qmax,
    e_qsearch,
    e_vertexfind,
    e_vertexfind_sg,
    epsilon_budget,
    findfirst_zeta,
    w_qsearch,
    w_zalka,
)
from .sim import (
    ALGORITHMS,
    LEDGER_COLUMNS,
    NsamplesPolicy,
    QueryLedger,
    RunResult,
    SimError,
    max_moves_bound,
    maxfind_cost,
    run_algorithm,
    run_edge_qlouvain,
    run_ol,
    run_ol_replacement,
    run_qlouvain,
    run_simple_qlouvain,
)
from .tracker import (
    MarkedEdgeSet,
    MarkedVertexSet,
    TrackerError,
    build,
    build_edges,
    sample_marked,
    update_after_move,
    update_edges_after_move,
)

__all__ = [
    "ALGORITHMS",
    "CommunityError",
    "CommunityState",
    "CostParams",
    "DEFAULT_PARAMS",
    "DuplicateEdgeError",
    "EdgeListParseError",
    "EmptyGraphError",
    "FcsConfig",
    "Graph",
    "GraphError",
    "InfeasibleConfigError",
    "LEDGER_COLUMNS",
    "MarkedEdgeSet",
    "MarkedVertexSet",
    "MoveDelta",
    "NsamplesPolicy",
    "QueryLedger",
    "RunResult",
    "SelfLoopError",
    "SimError",
    "TrackerError",
    "aggregate",
    "build",
    "build_edges",
    "e_qmax",
    "e_qsearch",
    "e_vertexfind",
    "e_vertexfind_sg",
    "epsilon_budget",
    "fcs_header",
    "findfirst_zeta",
    "generate_fcs",
    "graph_from_edges",
    "load_edge_list",
    "max_moves_bound",
    "maxfind_cost",
    "run_algorithm",
    "run_edge_qlouvain",
    "run_ol",
    "run_ol_replacement",
    "run_qlouvain",
    "run_simple_qlouvain",
    "sample_marked",
    "update_after_move",
    "update_edges_after_move",
    "w_qsearch",
    "w_zalka",
    "write_edge_list",
]
