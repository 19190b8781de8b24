"""Immutable weighted undirected graphs, edge-list I/O, and benchmark generation.

Adjacency is stored in compressed sparse rows sorted by neighbor id, which
gives O(log d_u) membership lookups and lets the hot numerical kernels walk
flat arrays. Adjacency lists never contain self-loops; coarse graphs produced
by aggregation carry their intra-community weight in a per-vertex
``self_weight`` attribute that is folded into vertex strengths (a self-loop
of weight c contributes 2c to the strength), so total weight is preserved
exactly across aggregation levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Graph",
    "FcsConfig",
    "GraphError",
    "EdgeListParseError",
    "SelfLoopError",
    "DuplicateEdgeError",
    "EmptyGraphError",
    "InfeasibleConfigError",
    "graph_from_edges",
    "load_edge_list",
    "write_edge_list",
    "generate_fcs",
    "fcs_header",
    "aggregate",
    "neighbor_index",
]


class GraphError(ValueError):
    """Base class for graph construction and I/O errors."""


class EdgeListParseError(GraphError):
    pass


class SelfLoopError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class EmptyGraphError(GraphError):
    pass


class InfeasibleConfigError(GraphError):
    pass


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph with sorted CSR adjacency.

    strength[u] = sum of incident edge weights + 2 * self_weight[u];
    total_weight = half the strength sum. Instances are never mutated after
    construction and are safe to share across threads.
    """

    n: int
    adj_start: np.ndarray
    adj_v: np.ndarray
    adj_w: np.ndarray
    self_weight: np.ndarray
    strength: np.ndarray
    total_weight: float

    @property
    def num_edges(self) -> int:
        return self.adj_v.shape[0] // 2

    def degree(self, u: int) -> int:
        return int(self.adj_start[u + 1] - self.adj_start[u])

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.adj_start)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    def neighbors(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        """Neighbor ids and weights of u as parallel arrays."""
        s, e = int(self.adj_start[u]), int(self.adj_start[u + 1])
        return self.adj_v[s:e], self.adj_w[s:e]

    def edges(self) -> Iterable[tuple[int, int, float]]:
        """Each undirected edge once, as (u, v, w) with u < v."""
        for u in range(self.n):
            s, e = int(self.adj_start[u]), int(self.adj_start[u + 1])
            for k in range(s, e):
                v = int(self.adj_v[k])
                if u < v:
                    yield u, v, float(self.adj_w[k])


def graph_from_edges(
    n: int,
    edges: Sequence[tuple[int, int, float]],
    self_weight: np.ndarray | None = None,
) -> Graph:
    """Assemble a Graph from an iterable of undirected (u, v, w) edges.

    Edges are normalized to u < v; duplicates, self-loops, out-of-range ids,
    and nonpositive weights are rejected.
    """
    normalized: list[tuple[int, int, float]] = []
    seen: set[tuple[int, int]] = set()
    for u, v, w in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
        if u == v:
            raise SelfLoopError(f"self-loop on vertex {u}")
        if w <= 0:
            raise GraphError("weights must be strictly positive")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise DuplicateEdgeError(f"duplicate edge {key}")
        seen.add(key)
        normalized.append((key[0], key[1], float(w)))
    return _build_graph(n, normalized, self_weight)


def _build_graph(
    n: int,
    edges: Sequence[tuple[int, int, float]],
    self_weight: np.ndarray | None = None,
) -> Graph:
    """Assemble a Graph from unique undirected edges (u < v, w > 0)."""
    m = len(edges)
    deg = np.zeros(n, dtype=np.int64)
    for u, v, _ in edges:
        deg[u] += 1
        deg[v] += 1
    adj_start = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg, out=adj_start[1:])
    adj_v = np.empty(2 * m, dtype=np.int64)
    adj_w = np.empty(2 * m, dtype=np.float64)
    fill = adj_start[:-1].copy()
    for u, v, w in edges:
        adj_v[fill[u]] = v
        adj_w[fill[u]] = w
        fill[u] += 1
        adj_v[fill[v]] = u
        adj_w[fill[v]] = w
        fill[v] += 1
    # Sort each row by neighbor id.
    for u in range(n):
        s, e = int(adj_start[u]), int(adj_start[u + 1])
        if e - s > 1:
            order = np.argsort(adj_v[s:e], kind="stable")
            adj_v[s:e] = adj_v[s:e][order]
            adj_w[s:e] = adj_w[s:e][order]
    if self_weight is None:
        self_weight = np.zeros(n, dtype=np.float64)
    row_sums = np.zeros(n, dtype=np.float64)
    np.add.at(row_sums, np.repeat(np.arange(n), np.diff(adj_start)), adj_w)
    strength = row_sums + 2.0 * self_weight
    total_weight = float(strength.sum()) / 2.0
    return Graph(
        n=n,
        adj_start=adj_start,
        adj_v=adj_v,
        adj_w=adj_w,
        self_weight=self_weight,
        strength=strength,
        total_weight=total_weight,
    )


def load_edge_list(path: str | Path) -> Graph:
    """Parse a whitespace-separated edge list: "u v [w]", '#' comments.

    Vertex ids are 0-based integers; the vertex count is max id + 1. Weights
    default to 1 and must be strictly positive. Self-loops and repeated
    undirected edges are rejected.
    """
    path = Path(path)
    edges: list[tuple[int, int, float]] = []
    seen: set[tuple[int, int]] = set()
    max_id = -1
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise EdgeListParseError(f"{path}:{lineno}: expected 'u v [w]', got {line!r}")
            try:
                u = int(parts[0])
                v = int(parts[1])
            except ValueError as exc:
                raise EdgeListParseError(f"{path}:{lineno}: bad vertex id in {line!r}") from exc
            if u < 0 or v < 0:
                raise EdgeListParseError(f"{path}:{lineno}: negative vertex id")
            w = 1.0
            if len(parts) == 3:
                try:
                    w = float(parts[2])
                except ValueError as exc:
                    raise EdgeListParseError(f"{path}:{lineno}: bad weight in {line!r}") from exc
                if not math.isfinite(w):
                    raise EdgeListParseError(f"{path}:{lineno}: non-finite weight")
            if w <= 0.0:
                raise EdgeListParseError(f"{path}:{lineno}: weights must be strictly positive")
            if u == v:
                raise SelfLoopError(f"{path}:{lineno}: self-loop on vertex {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise DuplicateEdgeError(f"{path}:{lineno}: duplicate edge {key}")
            seen.add(key)
            edges.append((key[0], key[1], w))
            max_id = max(max_id, u, v)
    if not edges:
        raise EmptyGraphError(f"{path}: no edges")
    return _build_graph(max_id + 1, edges)


def write_edge_list(g: Graph, path: str | Path, header: str | None = None) -> None:
    """Write the edge-list format read by load_edge_list.

    Unit weights are omitted; other weights use shortest round-trip floats.
    """
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        if header is not None:
            fh.write(header.rstrip("\n") + "\n")
        for u, v, w in g.edges():
            if w == 1.0:
                fh.write(f"{u} {v}\n")
            else:
                fh.write(f"{u} {v} {w!r}\n")


@dataclass(frozen=True)
class FcsConfig:
    """Fixed-community-size benchmark graph parameters.

    n vertices are split into ceil(n/S) contiguous blocks of size at most S;
    ceil(avg_degree * n) distinct edges are inserted, each drawn by picking a
    block, a vertex u in it, and a partner v inside the block with
    probability 1 - mu or outside it otherwise.
    """

    n: int
    avg_degree: float
    community_size: int
    mu: float
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InfeasibleConfigError("n must be >= 1")
        if not (0 < self.community_size <= self.n):
            raise InfeasibleConfigError("need 0 < community_size <= n")
        if not (0.0 <= self.mu <= 1.0):
            raise InfeasibleConfigError("mu must lie in [0, 1]")
        if self.avg_degree <= 0:
            raise InfeasibleConfigError("avg_degree must be positive")
        if self.num_target_edges > self.n * (self.n - 1) // 2:
            raise InfeasibleConfigError("requested edges exceed available vertex pairs")

    @property
    def num_target_edges(self) -> int:
        return math.ceil(self.avg_degree * self.n)


def fcs_header(cfg: FcsConfig) -> str:
    return (
        f"# fcs n={cfg.n} d={cfg.avg_degree!r} S={cfg.community_size} "
        f"mu={cfg.mu!r} seed={cfg.seed}"
    )


def generate_fcs(cfg: FcsConfig) -> Graph:
    """Generate a fixed-community-size random graph, reproducible per seed.

    The edge counter decrements only on successful insertions; duplicate
    edges, u == v draws, and draws from an empty outside-block pool count as
    rejections, capped at 100x the target edge count.
    """
    n, S, mu = cfg.n, cfg.community_size, cfg.mu
    k_target = cfg.num_target_edges
    n_blocks = math.ceil(n / S)
    if mu == 0.0:
        intra_pairs = 0
        for b in range(n_blocks):
            size = min(S, n - b * S)
            intra_pairs += size * (size - 1) // 2
        if k_target > intra_pairs:
            raise InfeasibleConfigError(
                f"mu=0 allows at most {intra_pairs} intra-block edges, "
                f"{k_target} requested"
            )
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    seen: set[tuple[int, int]] = set()
    edges: list[tuple[int, int, float]] = []
    remaining = k_target
    rejections = 0
    budget = 100 * k_target
    while remaining > 0:
        if rejections > budget:
            raise InfeasibleConfigError(
                f"rejection budget exhausted after {len(edges)} of {k_target} edges"
            )
        b = int(rng.integers(n_blocks))
        lo = b * S
        size = min(S, n - lo)
        u = lo + int(rng.integers(size))
        if rng.random() < 1.0 - mu:
            v = lo + int(rng.integers(size))
            if v == u:
                rejections += 1
                continue
        else:
            outside = n - size
            if outside == 0:
                rejections += 1
                continue
            j = int(rng.integers(outside))
            v = j if j < lo else j + size
        key = (u, v) if u < v else (v, u)
        if key in seen:
            rejections += 1
            continue
        seen.add(key)
        edges.append((key[0], key[1], 1.0))
        remaining -= 1
    return _build_graph(n, edges)


def aggregate(g: Graph, labels: Sequence[int] | np.ndarray) -> Graph:
    """Contract each nonempty community into one coarse vertex.

    Coarse vertices are numbered by ascending community id. Cross-community
    edge weights sum; intra-community weight (including carried self weights)
    moves into the coarse self_weight attribute, keeping adjacency loop-free
    and strengths/total weight identical to the fine level.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (g.n,):
        raise ValueError(f"labels must have length {g.n}, got {labels.shape}")
    present, compact = np.unique(labels, return_inverse=True)
    compact = compact.astype(np.int64)
    n_coarse = int(present.shape[0])
    coarse_self = np.bincount(compact, weights=g.self_weight,
                              minlength=n_coarse)
    owner = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(g.adj_start))
    a = compact[owner]
    b = compact[g.adj_v]
    intra = a == b
    if np.any(intra):
        # Each undirected intra edge occupies two directed slots.
        coarse_self += 0.5 * np.bincount(a[intra], weights=g.adj_w[intra],
                                         minlength=n_coarse)
    # Sum cross weights once per undirected pair (canonical slot a < b), then
    # mirror, so both direction rows carry bit-identical weights.
    canon = a < b
    key = a[canon] * n_coarse + b[canon]
    order = np.argsort(key, kind="stable")
    uniq, first = np.unique(key[order], return_index=True)
    if uniq.size:
        wsum = np.add.reduceat(g.adj_w[canon][order], first)
    else:
        wsum = np.zeros(0, dtype=np.float64)
    ua, ub = uniq // n_coarse, uniq % n_coarse
    src = np.concatenate([ua, ub])
    dst = np.concatenate([ub, ua])
    ww = np.concatenate([wsum, wsum])
    slot = np.lexsort((dst, src))
    adj_v = dst[slot]
    adj_w = ww[slot]
    adj_start = np.zeros(n_coarse + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n_coarse), out=adj_start[1:])
    row_sums = np.bincount(src[slot], weights=adj_w, minlength=n_coarse)
    strength = row_sums + 2.0 * coarse_self
    return Graph(
        n=n_coarse,
        adj_start=adj_start,
        adj_v=adj_v.astype(np.int64),
        adj_w=adj_w.astype(np.float64),
        self_weight=coarse_self,
        strength=strength,
        total_weight=float(strength.sum()) / 2.0,
    )


def neighbor_index(g: Graph, u: int, v: int) -> int | None:
    """Index of v in u's sorted adjacency row, or None if absent."""
    if not (0 <= u < g.n):
        raise IndexError(f"vertex {u} out of range for n={g.n}")
    s, e = int(g.adj_start[u]), int(g.adj_start[u + 1])
    pos = s + int(np.searchsorted(g.adj_v[s:e], v))
    if pos < e and int(g.adj_v[pos]) == v:
        return pos - s
    return None
