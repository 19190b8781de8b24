"""Multi-level Louvain runs with per-move quantum query estimates.

Every variant executes the same kind of greedy trajectory (single-vertex
moves with strictly positive modularity gain, then graph aggregation and
recursion) while a pure observer attributes per-move costs:

- ``ol``         sequential sweep over a shuffled list; classical gain calls.
- ``ol-replace`` uniform sampling with replacement until a good vertex appears.
- ``ql``    identical trajectory to ``ol``; each move additionally charged
            as a first-good-vertex search over the remaining list, simulated
            segment by segment (doubling then binary narrowing), using the
            nested-search bounds for large segments and literal scan costs
            for small ones. Accumulates the plain and sparse-graph variants.
- ``sql``   samples a uniformly random good vertex per move; charged as one
            nested search over all vertices (plain and sparse-graph).
- ``eql``   samples a uniformly random improving directed edge; charged as
            one search over all directed edges.

Randomness is split into two independent generator streams per seed: the
trajectory stream (shuffles and marked sampling) fully determines the move
sequence, while the estimator stream drives everything that only influences
charges (classical-sampling preludes, which good element a simulated quantum
search would return). Hence ``ql`` replays the ``ol`` trajectory exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, NamedTuple, Optional

import numpy as np

from . import _kernels, qcost, tracker
from .community import CommunityState
from .graph import Graph, aggregate
from .qcost import DEFAULT_PARAMS, CostParams

LEDGER_COLUMNS = (
    "level", "k", "algo", "list_size", "t", "classical_calls",
    "est_ql", "est_qlsg", "est_sql", "est_sqlsg", "est_eql", "delta",
)

_EST_COLUMNS = ("est_ql", "est_qlsg", "est_sql", "est_sqlsg", "est_eql")


class SimError(RuntimeError):
    """Raised when a run violates a hard safety bound."""


class MoveRecord(NamedTuple):
    """One search event: either an accepted move or a failed (confirming)
    search. Estimate fields are None for variants the run does not track."""

    level: int
    k: int
    algo: str
    list_size: int
    t: Optional[int]
    classical_calls: int
    est_ql: Optional[float] = None
    est_qlsg: Optional[float] = None
    est_sql: Optional[float] = None
    est_sqlsg: Optional[float] = None
    est_eql: Optional[float] = None
    delta: float = 0.0


class QueryLedger:
    """Per-move cost records plus running totals."""

    def __init__(self, algo: str):
        self.algo = algo
        self.records: list[MoveRecord] = []
        self.classical_total = 0
        self.est_totals: dict[str, float] = {c: 0.0 for c in _EST_COLUMNS}
        self._est_seen: set[str] = set()
        self.budget_exceeded = False

    def add(self, level: int, list_size: int, t: Optional[int],
            classical_calls: int, delta: float, **est: float) -> MoveRecord:
        rec = MoveRecord(
            level=level, k=len(self.records), algo=self.algo,
            list_size=list_size, t=t, classical_calls=classical_calls,
            delta=delta, **est,
        )
        self.records.append(rec)
        self.classical_total += classical_calls
        for col, v in est.items():
            if v is not None:
                self.est_totals[col] += v
                self._est_seen.add(col)
        return rec

    def add_classical_batch(self, level: int, sizes: list[int],
                            calls: list[int], deltas: list[float]) -> None:
        """Append classical-only records in bulk (hot path for full sweeps)."""
        records = self.records
        algo = self.algo
        k = len(records)
        total = 0
        for i in range(len(sizes)):
            c = calls[i]
            records.append(
                MoveRecord(level, k + i, algo, sizes[i], None, c,
                           delta=deltas[i])
            )
            total += c
        self.classical_total += total

    def totals(self) -> dict[str, float]:
        """Running totals; keys: classical plus any tracked estimate."""
        out: dict[str, float] = {"classical": float(self.classical_total)}
        for col in _EST_COLUMNS:
            if col in self._est_seen:
                out[col] = self.est_totals[col]
        return out

    def write_csv(self, dest: str | Path | IO[str]) -> None:
        """Dump records; floats use repr for bit-exact round trips."""
        if hasattr(dest, "write"):
            self._write(dest)
        else:
            with open(dest, "w", encoding="utf-8") as f:
                self._write(f)

    def _write(self, f: IO[str]) -> None:
        f.write(",".join(LEDGER_COLUMNS) + "\n")
        for r in self.records:
            cells = [
                str(r.level), str(r.k), r.algo, str(r.list_size),
                "" if r.t is None else str(r.t), str(r.classical_calls),
            ]
            for col in _EST_COLUMNS:
                v = getattr(r, col)
                cells.append("" if v is None else repr(v))
            cells.append(repr(r.delta))
            f.write(",".join(cells) + "\n")


@dataclass
class NsamplesPolicy:
    """Classical-sampling prelude length for simulated quantum searches.

    Starts each phase at `init` samples per search; the first run of `init`
    consecutive misses switches the prelude off (0) for the rest of the
    phase, never back. In deterministic mode the switch instead triggers the
    first time a search's expected draws-to-hit reach the prelude length.
    """

    init: int = 130
    deterministic: bool = False
    n_samples: int = field(init=False)
    miss_streak: int = field(init=False, default=0)

    def __post_init__(self) -> None:
        self.n_samples = self.init

    def reset(self) -> None:
        self.n_samples = self.init
        self.miss_streak = 0

    def simulate_search(self, t: int, domain: int,
                        rng: np.random.Generator) -> None:
        """Advance the policy across one search call's classical prelude.

        Equivalent to `n_samples` unit draws at hit rate t/domain, stopping
        at the first hit (a single geometric draw decides which case)."""
        if self.n_samples <= 0 or domain <= 0:
            return
        if self.deterministic:
            if t * self.init <= domain:
                self.n_samples = 0
            return
        if t > 0:
            first_hit = int(rng.geometric(t / domain))
            if first_hit <= self.n_samples:
                self.miss_streak = 0
                return
        self.miss_streak += self.n_samples
        if self.miss_streak >= self.init:
            self.n_samples = 0


def nsamples_update(policy: NsamplesPolicy, marked: bool) -> None:
    """Feed one simulated classical draw outcome into the policy."""
    if marked:
        policy.miss_streak = 0
        return
    policy.miss_streak += 1
    if policy.miss_streak >= policy.init:
        policy.n_samples = 0


def maxfind_cost(
    delta_u: int, eps: float, params: CostParams = DEFAULT_PARAMS
) -> tuple[float, str]:
    """Queries to pick the best of delta_u move candidates: the cheaper of a
    full classical scan and the quantum maximum-finding bound."""
    if delta_u <= 1:
        return float(max(delta_u, 0)), "classical"
    quantum = qcost.e_qmax(delta_u, eps, params)
    if quantum < delta_u:
        return quantum, "quantum"
    return float(delta_u), "classical"


def max_moves_bound(g: Graph) -> float:
    """Hard cap on total accepted moves: modularity spans at most 2 and each
    accepted move on an integer-weighted graph gains at least 1/W^2."""
    return 2.0 * g.total_weight**2


@dataclass(frozen=True)
class RunResult:
    algo: str
    labels: np.ndarray
    modularity: float
    ledger: QueryLedger
    moves: int
    levels: int
    budget_exceeded: bool
    moves_log: list[tuple[int, int, int]]


def _trajectory_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, 0))))


def _estimator_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, 1))))


def _scan_args(state: CommunityState) -> tuple:
    g = state.graph
    return (
        g.adj_start, g.strength, g.total_weight, state.labels, state.sigma,
        state.own_s, state.own_cnt, state.eta_comm, state.eta_w, state.eta_len,
    )


def _candidate_counts(state: CommunityState, vertices: np.ndarray) -> np.ndarray:
    """Per-vertex gain-candidate counts, straight from the state arrays."""
    return state.eta_len[vertices] + (state.own_cnt[vertices] > 0)


class _Driver:
    """Shared multi-level loop: runs one phase-1 per level, aggregates, and
    composes labels until a level makes no moves."""

    def __init__(self, g: Graph, seed: int, algo: str,
                 params: CostParams = DEFAULT_PARAMS):
        if seed < 0:
            raise ValueError("seed must be >= 0")
        self.g0 = g
        self.seed = seed
        self.params = params
        self.traj = _trajectory_rng(seed)
        self.est = _estimator_rng(seed)
        self.ledger = QueryLedger(algo)
        self.moves_log: list[tuple[int, int, int]] = []
        self.eps = qcost.epsilon_budget(max(g.n, 2), params)
        self.cap = max_moves_bound(g)

    def run(self, level_runner) -> RunResult:
        g = self.g0
        comp = np.arange(g.n, dtype=np.int64)
        level = 0
        total_moves = 0
        counted_total = 0
        while True:
            labels, counted, level_moves = level_runner(level, g)
            counted_total += counted
            total_moves += level_moves
            if total_moves > self.cap:
                raise SimError(
                    f"{total_moves} moves exceed the 2W^2 cap {self.cap}"
                )
            if level_moves == 0:
                break
            _, inverse = np.unique(labels, return_inverse=True)
            comp = inverse.astype(np.int64)[comp]
            g = aggregate(g, labels)
            level += 1
        if counted_total != self.ledger.classical_total:
            raise SimError(
                "ledger classical total diverged from the gain-call counter: "
                f"{self.ledger.classical_total} != {counted_total}"
            )
        budget = self.params.move_budget(self.g0.n) if self.g0.n >= 2 else 0.0
        self.ledger.budget_exceeded = total_moves > budget
        final_q = CommunityState(g).modularity()
        return RunResult(
            algo=self.ledger.algo, labels=comp, modularity=final_q,
            ledger=self.ledger, moves=total_moves, levels=level + 1,
            budget_exceeded=self.ledger.budget_exceeded,
            moves_log=self.moves_log,
        )


# -- ordinary Louvain ----------------------------------------------------------


def run_ol(g: Graph, seed: int, use_cache: bool = True,
           params: CostParams = DEFAULT_PARAMS) -> RunResult:
    """Sequential Louvain over shuffled vertex lists, classical counts only.

    use_cache=False recomputes each visited vertex's community weights from
    the adjacency instead of maintaining them incrementally; the trajectory
    and query counts are unchanged (wall-time benchmark mode).
    """
    drv = _Driver(g, seed, "ol", params)
    runner = _ol_cached_runner(drv) if use_cache else _ol_uncached_runner(drv)
    return drv.run(runner)


class _PassBuffers:
    """Per-move output slots for a pass kernel; one pass makes <= n moves."""

    def __init__(self, n: int):
        cap = max(n, 1)
        self.pos = np.zeros(cap, dtype=np.int64)
        self.u = np.zeros(cap, dtype=np.int64)
        self.target = np.zeros(cap, dtype=np.int64)
        self.evals = np.zeros(cap, dtype=np.int64)
        self.gain = np.zeros(cap, dtype=np.float64)


def _drain_pass(drv: _Driver, level: int, n: int, buf: _PassBuffers,
                n_moves: int, tail_pos: int, tail_evals: int) -> int:
    """Turn one pass's buffered moves into ledger rows; returns counted evals."""
    sizes = (n - buf.pos[:n_moves]).tolist()
    calls = buf.evals[:n_moves].tolist()
    deltas = buf.gain[:n_moves].tolist()
    drv.moves_log.extend(
        zip([level] * n_moves, buf.u[:n_moves].tolist(),
            buf.target[:n_moves].tolist())
    )
    drv.ledger.add_classical_batch(level, sizes, calls, deltas)
    counted = sum(calls)
    if tail_pos < n:
        drv.ledger.add(level, n - tail_pos, None, int(tail_evals), 0.0)
        counted += int(tail_evals)
    return counted


def _ol_cached_runner(drv: _Driver):
    def runner(level: int, g: Graph):
        state = CommunityState(g)
        buf = _PassBuffers(g.n)
        moves = 0
        while True:
            order = drv.traj.permutation(g.n).astype(np.int64)
            n_moves, tail_evals, tail_pos, _ = _kernels.ol_pass(
                g.adj_start, g.adj_v, g.adj_w, g.strength, g.total_weight,
                state.labels, state.sigma, state.own_s, state.own_cnt,
                state.eta_comm, state.eta_w, state.eta_cnt, state.eta_len,
                state.cnt_buckets, order, state.delta_max,
                buf.pos, buf.u, buf.target, buf.evals, buf.gain,
            )
            # delta_max and cnt_buckets go stale here: the sweep never reads
            # the candidate-count maximum, so ol_pass skips its upkeep.
            state.counter += _drain_pass(drv, level, g.n, buf, int(n_moves),
                                         int(tail_pos), int(tail_evals))
            moves += int(n_moves)
            if n_moves == 0:
                break
        return state.labels.copy(), state.counter, moves

    return runner


def _ol_uncached_runner(drv: _Driver):
    def runner(level: int, g: Graph):
        labels = np.arange(g.n, dtype=np.int64)
        sigma = g.strength.copy()
        cap = int(g.max_degree) if g.n > 0 else 0
        comm_buf = np.zeros(max(cap, 1), dtype=np.int64)
        weight_buf = np.zeros(max(cap, 1), dtype=np.float64)
        buf = _PassBuffers(g.n)
        counter = 0
        moves = 0
        while True:
            order = drv.traj.permutation(g.n).astype(np.int64)
            n_moves, tail_evals, tail_pos = _kernels.ol_pass_uncached(
                g.adj_start, g.adj_v, g.adj_w, g.strength, g.total_weight,
                labels, sigma, comm_buf, weight_buf, order,
                buf.pos, buf.u, buf.target, buf.evals, buf.gain,
            )
            counter += _drain_pass(drv, level, g.n, buf, int(n_moves),
                                   int(tail_pos), int(tail_evals))
            moves += int(n_moves)
            if n_moves == 0:
                break
        return labels, counter, moves

    return runner


def run_ol_replacement(g: Graph, seed: int,
                       params: CostParams = DEFAULT_PARAMS) -> RunResult:
    """Louvain that draws vertices uniformly with replacement; each draw
    pays an early-exit goodness check. The marked-set tracker only decides
    termination (the algorithm itself would sample forever)."""
    drv = _Driver(g, seed, "ol-replace", params)

    def runner(level: int, g: Graph):
        state = CommunityState(g)
        ms = tracker.build(state)
        moves = 0
        while ms.t > 0:
            start_calls = state.counter
            while True:
                x = int(drv.traj.integers(g.n))
                if state.is_good(x):
                    break
            mv = state.best_move(x)
            alpha = int(state.labels[x])
            state.apply_move(x, mv.target)
            tracker.update_after_move(ms, state, x, alpha, mv.target)
            moves += 1
            drv.moves_log.append((level, x, mv.target))
            drv.ledger.add(level, g.n, None, state.counter - start_calls,
                           mv.gain)
        return state.labels.copy(), state.counter, moves

    return drv.run(runner)


# -- QLouvain: first-good-vertex search over the sweep list ---------------------


class _FindFirstSim:
    """Charges one move's first-good-vertex search over a list suffix.

    The suffix (positions s0..n-1 of the current pass order) has its first
    good vertex at absolute position p_abs, known from the executed sweep;
    everything before it is bad, so only the tail of the segment containing
    it needs explicit goodness audits (uncounted).
    """

    def __init__(self, drv: _Driver, state: CommunityState, policy: NsamplesPolicy,
                 order: np.ndarray, s0: int, p_abs: int):
        self.drv = drv
        self.state = state
        self.policy = policy
        self.order = order
        self.s0 = s0
        self.length = order.shape[0] - s0
        self.p = p_abs - s0
        self.zeta = qcost.findfirst_zeta(drv.eps, self.length)
        self.dmax = state.delta_max
        self.ql = 0.0
        self.qlsg = 0.0
        # Candidate counts of the known-bad prefix: a bad vertex's early-exit
        # goodness check scans all its candidates, so its cost is free to read
        # off the state arrays.
        prefix = order[s0:p_abs]
        cc = _candidate_counts(state, prefix)
        self.bad_cost = np.zeros(self.p + 1, dtype=np.int64)
        np.cumsum(cc, out=self.bad_cost[1:])

    def _audit_tail(self, b_star: int) -> None:
        m = b_star - self.p + 1
        good = np.zeros(m, dtype=np.uint8)
        evals = np.zeros(m, dtype=np.int64)
        _kernels.goodness_range(
            *_scan_args(self.state), self.order,
            self.s0 + self.p, self.s0 + b_star + 1, good, evals,
        )
        assert good[0] == 1, "executed sweep disagrees with goodness audit"
        self.good_idx = np.nonzero(good)[0] + self.p
        self.evals_at_p = int(evals[0])

    def _good_between(self, a: int, b: int) -> tuple[int, int]:
        lo = int(np.searchsorted(self.good_idx, a, side="left"))
        hi = int(np.searchsorted(self.good_idx, b, side="right"))
        return lo, hi

    def _charge(self, a: int, b: int) -> tuple[bool, int, Optional[int]]:
        """Charge the sublist [a..b]; returns (quantum, goods, found_index).

        Classical sublists pay the literal early-exit scan (all bad
        candidates, plus the first good vertex's partial scan) and find the
        first good; quantum ones pay the nested-search bounds and return a
        uniformly random good element.
        """
        size = b - a + 1
        if b < self.p:
            t_sub, lo, hi = 0, 0, 0
        else:
            lo, hi = self._good_between(max(a, self.p), b)
            t_sub = hi - lo
        if size < self.drv.params.lswitch:
            if t_sub == 0:
                span_hi = min(b, self.p - 1)
                cost = int(self.bad_cost[span_hi + 1] - self.bad_cost[a])
                found = None
            else:
                cost = int(self.bad_cost[self.p] - self.bad_cost[a])
                cost += self.evals_at_p
                found = self.p
            self.ql += cost
            self.qlsg += cost
            return False, t_sub, found
        n_now = self.policy.n_samples
        self.ql += qcost.e_vertexfind(
            size, t_sub, n_now, self.zeta, self.dmax, self.drv.params
        )
        self.qlsg += qcost.e_vertexfind_sg(
            size, t_sub, n_now, self.zeta, self.dmax, self.drv.params
        )
        self.policy.simulate_search(t_sub, size, self.drv.est)
        if t_sub == 0:
            return True, 0, None
        pick = lo + int(self.drv.est.integers(t_sub))
        return True, t_sub, int(self.good_idx[pick])

    def charges(self) -> tuple[float, float]:
        """Simulate the full search; returns (plain, sparse-graph) totals."""
        length, p = self.length, self.p
        n_seg = 1 if length == 1 else math.ceil(math.log2(length))
        a = b = 0
        for k in range(n_seg):
            a = (1 << k) - 1
            b = (1 << (k + 1)) - 2 if k < n_seg - 1 else length - 1
            if b >= p:
                self._audit_tail(b)
            quantum, t_seg, found = self._charge(a, b)
            if t_seg > 0:
                break
        assert b >= p, "doubling segments must reach the first good vertex"
        if not quantum:
            return self.ql, self.qlsg  # classical scan already found it
        l, r = a, found
        while l < r:
            c = (l + r) // 2
            quantum, t_sub, found = self._charge(l, c)
            if t_sub == 0:
                l = c + 1
            elif not quantum:
                l = r = found  # classical scan pinpointed the first good
            else:
                r = found
        assert l == p, "binary narrowing must land on the first good vertex"
        return self.ql, self.qlsg


def run_qlouvain(g: Graph, seed: int, params: CostParams = DEFAULT_PARAMS,
                 deterministic_nsamples: bool = False) -> RunResult:
    """The ``ol`` trajectory, re-charged as first-good-vertex searches.

    Per accepted move the remaining shuffled list is searched by doubling
    segments then binary narrowing; segments shorter than the switchover
    length are charged as literal scans, larger ones via the nested-search
    bounds (plain and sparse-graph inner check). Each failed pass-ending
    sweep is charged as a single no-good-vertex worst-case search.
    """
    drv = _Driver(g, seed, "ql", params)
    policy = NsamplesPolicy(init=params.nsamples_init,
                            deterministic=deterministic_nsamples)

    def runner(level: int, g: Graph):
        state = CommunityState(g)
        policy.reset()
        moves = 0
        while True:
            order = drv.traj.permutation(g.n).astype(np.int64)
            pos = 0
            pass_moves = 0
            while pos < g.n:
                fp, target, gain, evals = _kernels.scan_for_move(
                    *_scan_args(state), order, pos
                )
                state.counter += int(evals)
                suffix = g.n - pos
                if fp < 0:
                    q1, q2 = _failed_suffix_charge(
                        drv, state, policy, suffix, int(evals)
                    )
                    drv.ledger.add(level, suffix, None, int(evals), 0.0,
                                   est_ql=q1, est_qlsg=q2)
                    break
                u = int(order[fp])
                sim = _FindFirstSim(drv, state, policy, order, pos, int(fp))
                q1, q2 = sim.charges()
                mf, _ = maxfind_cost(
                    int(_candidate_counts(state, np.array([u]))[0]),
                    drv.eps, drv.params,
                )
                state.apply_move(u, int(target))
                moves += 1
                pass_moves += 1
                drv.moves_log.append((level, u, int(target)))
                drv.ledger.add(level, suffix, None, int(evals), float(gain),
                               est_ql=q1 + mf, est_qlsg=q2 + mf)
                pos = int(fp) + 1
            if pass_moves == 0:
                break
        return state.labels.copy(), state.counter, moves

    return drv.run(runner)


def _failed_suffix_charge(drv: _Driver, state: CommunityState,
                          policy: NsamplesPolicy, suffix: int,
                          scan_evals: int) -> tuple[float, float]:
    """One worst-case no-good-vertex search over an exhausted suffix."""
    if suffix < drv.params.lswitch:
        return float(scan_evals), float(scan_evals)
    zeta = qcost.findfirst_zeta(drv.eps, suffix)
    n_now = policy.n_samples
    q1 = qcost.e_vertexfind(suffix, 0, n_now, zeta, state.delta_max, drv.params)
    q2 = qcost.e_vertexfind_sg(suffix, 0, n_now, zeta, state.delta_max,
                               drv.params)
    policy.simulate_search(0, suffix, drv.est)
    return q1, q2


# -- SimpleQLouvain: one whole-vertex-set search per move -----------------------


def run_simple_qlouvain(g: Graph, seed: int,
                        params: CostParams = DEFAULT_PARAMS,
                        deterministic_nsamples: bool = False,
                        audit: bool = False) -> RunResult:
    """Moves a uniformly random good vertex per step; each step is charged
    as one nested search over all of the level's vertices (plain and
    sparse-graph variants), plus best-target selection."""
    drv = _Driver(g, seed, "sql", params)
    policy = NsamplesPolicy(init=params.nsamples_init,
                            deterministic=deterministic_nsamples)

    def runner(level: int, g: Graph):
        state = CommunityState(g)
        policy.reset()
        ms = tracker.build(state)
        es = tracker.build_edges(state) if audit else None
        moves = 0
        while ms.t > 0:
            u = tracker.sample_marked(ms, drv.traj)
            t_now = ms.t
            n_now = policy.n_samples
            dmax = state.delta_max
            q1 = qcost.e_vertexfind(g.n, t_now, n_now, drv.eps, dmax,
                                    drv.params)
            q2 = qcost.e_vertexfind_sg(g.n, t_now, n_now, drv.eps, dmax,
                                       drv.params)
            policy.simulate_search(t_now, g.n, drv.est)
            start_calls = state.counter
            mv = state.best_move(u)
            assert mv.gain > 0.0, "sampled vertex must have an improving move"
            mf, _ = maxfind_cost(state.counter - start_calls, drv.eps,
                                 drv.params)
            alpha = int(state.labels[u])
            state.apply_move(u, mv.target)
            tracker.update_after_move(ms, state, u, alpha, mv.target)
            if audit:
                tracker.update_edges_after_move(es, state, u, alpha, mv.target)
                assert ms.as_set() == tracker.build(state).as_set()
                assert es.as_set() == tracker.build_edges(state).as_set()
            moves += 1
            drv.moves_log.append((level, u, mv.target))
            drv.ledger.add(level, g.n, t_now, state.counter - start_calls,
                           mv.gain, est_sql=q1 + mf, est_sqlsg=q2 + mf)
        n_now = policy.n_samples
        q1 = qcost.e_vertexfind(g.n, 0, n_now, drv.eps, state.delta_max,
                                drv.params)
        q2 = qcost.e_vertexfind_sg(g.n, 0, n_now, drv.eps, state.delta_max,
                                   drv.params)
        policy.simulate_search(0, g.n, drv.est)
        drv.ledger.add(level, g.n, 0, 0, 0.0, est_sql=q1, est_sqlsg=q2)
        return state.labels.copy(), state.counter, moves

    return drv.run(runner)


# -- EdgeQLouvain: one whole-edge-set search per move ---------------------------


def run_edge_qlouvain(g: Graph, seed: int,
                      params: CostParams = DEFAULT_PARAMS,
                      deterministic_nsamples: bool = False,
                      audit: bool = False) -> RunResult:
    """Moves the tail of a uniformly random improving directed edge per
    step; each step is charged as one search over all directed edges (the
    edge check costs O(1) gain calls, so no nested inner search)."""
    drv = _Driver(g, seed, "eql", params)
    policy = NsamplesPolicy(init=params.nsamples_init,
                            deterministic=deterministic_nsamples)

    def runner(level: int, g: Graph):
        state = CommunityState(g)
        policy.reset()
        es = tracker.build_edges(state)
        two_m = int(g.adj_v.shape[0])
        moves = 0
        while es.t > 0:
            slot = tracker.sample_marked(es, drv.traj)
            u, _v = es.endpoints(slot)
            t_now = es.t
            n_now = policy.n_samples
            q = qcost.e_qsearch(two_m, t_now, n_now, drv.eps, drv.params)
            policy.simulate_search(t_now, two_m, drv.est)
            start_calls = state.counter
            mv = state.best_move(u)
            assert mv.gain > 0.0, "sampled edge tail must have an improving move"
            mf, _ = maxfind_cost(state.counter - start_calls, drv.eps,
                                 drv.params)
            alpha = int(state.labels[u])
            state.apply_move(u, mv.target)
            tracker.update_edges_after_move(es, state, u, alpha, mv.target)
            if audit:
                assert es.as_set() == tracker.build_edges(state).as_set()
            moves += 1
            drv.moves_log.append((level, u, mv.target))
            drv.ledger.add(level, two_m, t_now, state.counter - start_calls,
                           mv.gain, est_eql=q + mf)
        if two_m > 0:
            q = qcost.e_qsearch(two_m, 0, policy.n_samples, drv.eps,
                                drv.params)
            policy.simulate_search(0, two_m, drv.est)
            drv.ledger.add(level, two_m, 0, 0, 0.0, est_eql=q)
        return state.labels.copy(), state.counter, moves

    return drv.run(runner)


ALGORITHMS = {
    "ol": run_ol,
    "ol-replace": run_ol_replacement,
    "ql": run_qlouvain,
    "sql": run_simple_qlouvain,
    "eql": run_edge_qlouvain,
}


def run_algorithm(name: str, g: Graph, seed: int,
                  params: CostParams = DEFAULT_PARAMS,
                  deterministic_nsamples: bool = False,
                  use_cache: bool = True) -> RunResult:
    """Dispatch a run by algorithm name (see ALGORITHMS for choices)."""
    if name == "ol":
        return run_ol(g, seed, use_cache=use_cache, params=params)
    if name == "ol-replace":
        return run_ol_replacement(g, seed, params=params)
    if name == "ql":
        return run_qlouvain(g, seed, params=params,
                            deterministic_nsamples=deterministic_nsamples)
    if name == "sql":
        return run_simple_qlouvain(
            g, seed, params=params,
            deterministic_nsamples=deterministic_nsamples,
        )
    if name == "eql":
        return run_edge_qlouvain(
            g, seed, params=params,
            deterministic_nsamples=deterministic_nsamples,
        )
    raise ValueError(f"unknown algorithm {name!r}; choices: {sorted(ALGORITHMS)}")
