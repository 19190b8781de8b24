"""Community assignments with incrementally maintained move-gain state.

A CommunityState tracks, for every vertex, the total edge weight into each
neighboring community plus its own, so that the modularity gain of any
single-vertex move is a constant-time formula and a full candidate scan costs
one gain evaluation per neighboring community. Every gain evaluation made on
behalf of the algorithms goes through the g_delta counter; audit variants
bypass it so instrumentation never perturbs the measured query counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .graph import Graph


class CommunityError(ValueError):
    """Raised for moves or gain queries that violate state preconditions."""


@dataclass(frozen=True)
class MoveDelta:
    """Outcome of a gain query: candidate target community and its gain."""

    vertex: int
    target: Optional[int]
    gain: float


class CommunityState:
    """Mutable partition of a graph's vertices into communities.

    Communities are labeled by vertex ids; the structure starts from the
    all-singletons partition and is updated move by move. `counter` is the
    number of counted gain evaluations so far and `delta_max` the current
    largest candidate count over all vertices (each vertex's neighboring
    communities, the own one included when a neighbor shares it), kept exact
    across moves through a value-indexed bucket array.
    """

    def __init__(self, graph: Graph):
        g = graph
        n = g.n
        self.graph = g
        self.labels = np.arange(n, dtype=np.int64)
        self.sigma = g.strength.copy()
        self.own_s = np.zeros(n, dtype=np.float64)
        self.own_cnt = np.zeros(n, dtype=np.int64)
        self.eta_comm = g.adj_v.copy()
        self.eta_w = g.adj_w.copy()
        self.eta_cnt = np.ones(g.adj_v.shape[0], dtype=np.int64)
        self.eta_len = (g.adj_start[1:] - g.adj_start[:-1]).astype(np.int64)
        self.counter = 0
        # Candidate counts can reach degree + 1 <= n, so n + 2 buckets suffice.
        self.cnt_buckets = np.bincount(
            self.eta_len, minlength=n + 2
        ).astype(np.int64, copy=False)
        self.delta_max = int(self.eta_len.max()) if n > 0 else 0

    # -- helpers -----------------------------------------------------------

    def _check_vertex(self, u: int) -> None:
        if not 0 <= u < self.graph.n:
            raise CommunityError(f"vertex {u} out of range [0, {self.graph.n})")

    def community_count(self, u: int) -> int:
        """Number of gain candidates for u (its neighboring communities,
        counting the own community when a neighbor shares it)."""
        self._check_vertex(u)
        return int(self.eta_len[u]) + (1 if self.own_cnt[u] > 0 else 0)

    def neighbor_communities(self, u: int) -> list[int]:
        """Sorted candidate communities for u (own included if occupied)."""
        self._check_vertex(u)
        lo = self.graph.adj_start[u]
        cands = [int(c) for c in self.eta_comm[lo : lo + self.eta_len[u]]]
        if self.own_cnt[u] > 0:
            cands.append(int(self.labels[u]))
            cands.sort()
        return cands

    # -- counted operations -------------------------------------------------

    def delta(self, u: int, alpha: int) -> float:
        """Gain of moving u into alpha; 0 for its own community.

        alpha must be the community of u or of one of its neighbors.
        Counts one gain evaluation.
        """
        self._check_vertex(u)
        g = self.graph
        if alpha != self.labels[u]:
            lo = g.adj_start[u]
            pos = _kernels._eta_find(self.eta_comm, lo, int(self.eta_len[u]), alpha)
            if pos < 0:
                raise CommunityError(
                    f"community {alpha} is not adjacent to vertex {u}"
                )
        self.counter += 1
        return float(
            _kernels.delta_value(
                g.adj_start, g.strength, g.total_weight, self.labels, self.sigma,
                self.own_s, self.eta_comm, self.eta_w, self.eta_len, u, alpha,
            )
        )

    def best_move(self, u: int, *, count: bool = True) -> MoveDelta:
        """Highest-gain candidate for u, ties toward the smallest community
        id. Counts one gain evaluation per candidate."""
        self._check_vertex(u)
        g = self.graph
        a, d, e = _kernels.best_move(
            g.adj_start, g.strength, g.total_weight, self.labels, self.sigma,
            self.own_s, self.own_cnt, self.eta_comm, self.eta_w, self.eta_len, u,
        )
        if count:
            self.counter += int(e)
        if a < 0:
            return MoveDelta(u, None, 0.0)
        return MoveDelta(u, int(a), float(d))

    def is_good(self, u: int, *, count: bool = True) -> bool:
        """Whether some move of u has strictly positive gain; scans
        candidates in ascending community id and stops at the first hit."""
        self._check_vertex(u)
        g = self.graph
        good, e = _kernels.is_good(
            g.adj_start, g.strength, g.total_weight, self.labels, self.sigma,
            self.own_s, self.own_cnt, self.eta_comm, self.eta_w, self.eta_len, u,
        )
        if count:
            self.counter += int(e)
        return bool(good)

    # -- mutation ------------------------------------------------------------

    def apply_move(self, u: int, beta: int) -> None:
        """Reassign u to community beta and update all dependent sums.

        beta must currently hold a neighbor of u and differ from u's own
        community. Does not count gain evaluations.
        """
        self._check_vertex(u)
        g = self.graph
        if beta == self.labels[u]:
            raise CommunityError(f"vertex {u} is already in community {beta}")
        lo = g.adj_start[u]
        if _kernels._eta_find(self.eta_comm, lo, int(self.eta_len[u]), beta) < 0:
            raise CommunityError(f"community {beta} is not adjacent to vertex {u}")
        self.delta_max = int(_kernels.apply_move(
            g.adj_start, g.adj_v, g.adj_w, g.strength, self.labels, self.sigma,
            self.own_s, self.own_cnt, self.eta_comm, self.eta_w, self.eta_cnt,
            self.eta_len, self.cnt_buckets, u, beta, self.delta_max, True,
        ))

    # -- global quantities ----------------------------------------------------

    def modularity(self) -> float:
        """Modularity of the current partition (self-loop weight included in
        the intra-community sums). Does not count gain evaluations."""
        g = self.graph
        two_w = 2.0 * g.total_weight
        if two_w == 0.0:
            return 0.0  # empty edge set: both sums are over nothing
        intra = np.zeros(g.n, dtype=np.float64)
        np.add.at(intra, self.labels, self.own_s + 2.0 * g.self_weight)
        return float(np.sum(intra) / two_w - np.sum((self.sigma / two_w) ** 2))

    def community_sizes(self) -> dict[int, int]:
        """Mapping from community id to member count (non-empty only)."""
        ids, counts = np.unique(self.labels, return_counts=True)
        return {int(c): int(k) for c, k in zip(ids, counts)}
