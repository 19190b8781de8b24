"""Exact maintenance of the improvable-vertex and improvable-edge sets.

A vertex is marked when some single move of it strictly increases
modularity; a directed edge (u, v) is marked when moving u into v's current
community strictly increases modularity. Both sets support O(1) uniform
sampling via a swap-remove array plus position map, and are updated
incrementally after each move by re-auditing only the changeable region:
the moved vertex, every member of its old and new communities, and all
neighbors of those members. Membership elsewhere cannot flip because no
quantity entering those vertices' gain formulas changed.

All audits bypass the gain-evaluation counter: they are bookkeeping of the
simulator, not queries made by the simulated algorithm.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .community import CommunityState


class TrackerError(ValueError):
    """Raised when sampling from an empty marked set."""


class _SwapSet:
    """Array-backed set of int ids with O(1) insert/delete/sample."""

    def __init__(self, capacity: int):
        self.marked_pos = np.full(capacity, -1, dtype=np.int64)
        self.marked_list = np.zeros(capacity, dtype=np.int64)
        self._t = 0

    @property
    def t(self) -> int:
        """Number of marked ids."""
        return self._t

    def contains(self, x: int) -> bool:
        return self.marked_pos[x] >= 0

    def as_set(self) -> frozenset[int]:
        return frozenset(int(x) for x in self.marked_list[: self._t])


class _MemberLists:
    """Per-community doubly-linked membership lists (tracker-owned copy)."""

    def __init__(self, state: CommunityState):
        n = state.graph.n
        self.comm_head = np.empty(n, dtype=np.int64)
        self.nxt = np.empty(n, dtype=np.int64)
        self.prv = np.empty(n, dtype=np.int64)
        self.stamp = np.zeros(n, dtype=np.int64)
        self.stamp_val = 0
        self.buf = np.empty(n, dtype=np.int64)
        _kernels.build_member_lists(
            state.labels, self.comm_head, self.nxt, self.prv
        )

    def next_stamp(self) -> int:
        self.stamp_val += 1
        return self.stamp_val


class MarkedVertexSet(_SwapSet):
    """Vertices with a strictly improving move, kept exactly current."""

    def __init__(self, state: CommunityState):
        super().__init__(state.graph.n)
        self._members = _MemberLists(state)
        g = state.graph
        self._t = int(
            _kernels.vertex_tracker_build(
                g.adj_start, g.strength, g.total_weight, state.labels,
                state.sigma, state.own_s, state.own_cnt, state.eta_comm,
                state.eta_w, state.eta_len, self.marked_pos, self.marked_list,
            )
        )


class MarkedEdgeSet(_SwapSet):
    """Directed adjacency slots whose tail gains by joining the head's
    community, kept exactly current. Slot ids index the graph's adjacency
    arrays; endpoints(slot) recovers the (tail, head) pair."""

    def __init__(self, state: CommunityState):
        g = state.graph
        super().__init__(g.adj_v.shape[0])
        self._members = _MemberLists(state)
        self._graph = g
        degrees = g.adj_start[1:] - g.adj_start[:-1]
        self._src = np.repeat(np.arange(g.n, dtype=np.int64), degrees)
        self._t = int(
            _kernels.edge_tracker_build(
                g.adj_start, g.adj_v, g.strength, g.total_weight, state.labels,
                state.sigma, state.own_s, state.eta_comm, state.eta_w,
                state.eta_len, self.marked_pos, self.marked_list,
            )
        )

    def endpoints(self, slot: int) -> tuple[int, int]:
        """(tail, head) vertex pair of a directed adjacency slot."""
        if not 0 <= slot < self._src.shape[0]:
            raise TrackerError(f"edge slot {slot} out of range")
        return int(self._src[slot]), int(self._graph.adj_v[slot])


def build(state: CommunityState) -> MarkedVertexSet:
    """Exhaustive goodness audit of every vertex (uncounted)."""
    return MarkedVertexSet(state)


def update_after_move(
    mset: MarkedVertexSet, state: CommunityState, u: int, alpha: int, beta: int
) -> None:
    """Incrementally refresh after u moved from alpha to beta (call once,
    right after the state move was applied)."""
    g = state.graph
    m = mset._members
    mset._t = int(
        _kernels.vertex_tracker_update(
            g.adj_start, g.adj_v, g.strength, g.total_weight, state.labels,
            state.sigma, state.own_s, state.own_cnt, state.eta_comm,
            state.eta_w, state.eta_len, m.comm_head, m.nxt, m.prv, m.stamp,
            m.next_stamp(), m.buf, mset.marked_pos, mset.marked_list,
            mset._t, u, alpha, beta,
        )
    )


def build_edges(state: CommunityState) -> MarkedEdgeSet:
    """Exhaustive gain audit of every directed adjacency slot (uncounted)."""
    return MarkedEdgeSet(state)


def update_edges_after_move(
    eset: MarkedEdgeSet, state: CommunityState, u: int, alpha: int, beta: int
) -> None:
    """Incrementally refresh marked edges after u moved from alpha to beta."""
    g = state.graph
    m = eset._members
    eset._t = int(
        _kernels.edge_tracker_update(
            g.adj_start, g.adj_v, g.strength, g.total_weight, state.labels,
            state.sigma, state.own_s, state.eta_comm, state.eta_w,
            state.eta_len, m.comm_head, m.nxt, m.prv, m.stamp,
            m.next_stamp(), m.buf, eset.marked_pos, eset.marked_list,
            eset._t, u, alpha, beta,
        )
    )


def sample_marked(mset: _SwapSet, rng: np.random.Generator) -> int:
    """Uniform draw from the marked ids; raises on an empty set."""
    if mset._t == 0:
        raise TrackerError("cannot sample from an empty marked set")
    return int(mset.marked_list[int(rng.integers(mset._t))])
