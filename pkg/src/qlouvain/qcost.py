"""Closed-form expected-query-count bounds for the quantum search subroutines.

All functions are pure and deterministic. Queries are counted in units of
calls to the move-gain function g_delta; oracle calls of the quantum routines
cost ``cq`` g_delta calls each, which the formulas already include.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "CostParams",
    "CostBreakdown",
    "DEFAULT_PARAMS",
    "f_factor",
    "q_grover",
    "e_qsearch",
    "w_qsearch",
    "w_zalka",
    "e_qmax",
    "e_vertexfind",
    "e_vertexfind_sg",
    "findfirst_zeta",
    "epsilon_budget",
]

# Guard for ceil(log(...)) at representable boundaries: values a hair above an
# integer due to rounding must not bump the ceiling.
_CEIL_GUARD = 1e-12

# Grover-schedule constant of the unknown-t search bound.
_GROVER_ALPHA = 9.2

# Expected iterations of the t >= L/4 regime (flat branch of F).
_F_FLAT = 2.0344


@dataclass(frozen=True)
class CostParams:
    """Bound constants and simulation hyper-parameters.

    alpha and cq are fixed by the underlying bounds unless deliberately
    overridden; eps_total is the overall failure budget split across a run's
    moves; lswitch is the list size below which searches run classically;
    nsamples_init is the classical-sampling prelude length of QSearch;
    budget_log_base sets the log in the move budget M = n * log(n).
    """

    alpha: float = _GROVER_ALPHA
    cq: float = 2.0
    eps_total: float = 1e-5
    lswitch: int = 512
    nsamples_init: int = 130
    budget_log_base: float = math.e

    def __post_init__(self) -> None:
        if not (0.0 < self.eps_total < 1.0):
            raise ValueError("eps_total must be in (0, 1)")
        if self.alpha <= 0 or self.cq <= 0:
            raise ValueError("alpha and cq must be positive")
        if self.lswitch < 1 or self.nsamples_init < 0:
            raise ValueError("lswitch >= 1 and nsamples_init >= 0 required")
        if self.budget_log_base <= 1.0:
            raise ValueError("budget_log_base must exceed 1")

    def move_budget(self, n: int) -> float:
        """Soft cap M on the number of moves for an n-vertex input."""
        if n < 2:
            raise ValueError("move budget needs n >= 2")
        return n * math.log(n) / math.log(self.budget_log_base)


DEFAULT_PARAMS = CostParams()


@dataclass(frozen=True)
class CostBreakdown:
    """A bound value together with its labeled additive components."""

    queries: float
    components: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        total = math.fsum(self.components.values())
        if not math.isclose(total, self.queries, rel_tol=1e-9, abs_tol=1e-12):
            raise ValueError("components must sum to queries")
        if any(v < 0 for v in self.components.values()):
            raise ValueError("components must be nonnegative")


def _ceil_log(x: float, base: float) -> int:
    if x <= 0:
        raise ValueError("log argument must be positive")
    return max(0, math.ceil(math.log(x) / math.log(base) - _CEIL_GUARD))


def f_factor(L: int, t: int) -> float:
    """Expected Grover iteration factor F(L, t) for t marked among L items."""
    if t < 1 or t > L:
        raise ValueError(f"need 1 <= t <= L, got t={t}, L={L}")
    if t >= L / 4:
        return _F_FLAT
    root = math.sqrt((L - t) * t)
    return 2.25 * L / root + _ceil_log(L / (2.0 * root), 6.0 / 5.0) - 3.0


def q_grover(L: int, t: int, params: CostParams = DEFAULT_PARAMS) -> float:
    """Expected oracle calls of Grover search with t marked among L items."""
    F = f_factor(L, t)
    denom = 1.0 - F / (params.alpha * math.sqrt(L))
    # F <= alpha*sqrt(L)/3 holds for the piecewise F, so denom >= 2/3.
    if denom <= 0:
        raise ValueError("q_grover outside its validity region")
    return F * (1.0 + 1.0 / denom)


def w_qsearch(
    L: int, n_samples: int, eps: float, params: CostParams = DEFAULT_PARAMS
) -> float:
    """Worst-case QSearch queries: report no marked item with confidence 1-eps."""
    if L < 1:
        raise ValueError("L must be >= 1")
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must be in (0, 1)")
    reps = _ceil_log(1.0 / eps, 3.0)
    return n_samples + params.alpha * params.cq * reps * math.sqrt(L)


def e_qsearch(
    L: int, t: int, n_samples: int, eps: float, params: CostParams = DEFAULT_PARAMS
) -> float:
    """Expected QSearch queries to find a marked item (worst case if t = 0).

    The classical prelude samples up to n_samples items (one query each); if
    none is marked the quantum search runs, costing cq oracle calls per
    Grover query.
    """
    if t < 0 or t > L:
        raise ValueError(f"need 0 <= t <= L, got t={t}, L={L}")
    if t == 0:
        return w_qsearch(L, n_samples, eps, params)
    p = t / L
    miss_all = (1.0 - p) ** n_samples
    classical = (L / t) * (1.0 - miss_all)
    return classical + miss_all * params.cq * q_grover(L, t, params)


def qsearch_breakdown(
    L: int, t: int, n_samples: int, eps: float, params: CostParams = DEFAULT_PARAMS
) -> CostBreakdown:
    """e_qsearch split into its classical-sampling and Grover terms."""
    if t == 0:
        w = w_qsearch(L, n_samples, eps, params)
        return CostBreakdown(
            queries=w,
            components={"classical_sampling": float(n_samples), "grover": w - n_samples},
        )
    p = t / L
    miss_all = (1.0 - p) ** n_samples
    classical = (L / t) * (1.0 - miss_all)
    grover = miss_all * params.cq * q_grover(L, t, params)
    return CostBreakdown(
        queries=classical + grover,
        components={"classical_sampling": classical, "grover": grover},
    )


def w_zalka(L: int, eps: float, params: CostParams = DEFAULT_PARAMS) -> float:
    """Worst-case-optimal Grover search queries (the nested inner routine)."""
    if L < 0:
        raise ValueError("L must be >= 0")
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must be in (0, 1)")
    if L == 0:
        return 0.0
    reps = math.ceil(math.log(1.0 / eps) / (2.0 * math.log(4.0 / 3.0)) - _CEIL_GUARD)
    reps = max(1, reps)
    return params.cq * (5.0 * reps + math.pi * math.sqrt(L) * math.sqrt(reps))


def e_qmax(L: int, eps: float, params: CostParams = DEFAULT_PARAMS) -> float:
    """Expected queries of quantum maximum-finding over L values."""
    if L < 1:
        raise ValueError("L must be >= 1")
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must be in (0, 1)")
    if L == 1:
        return 0.0
    reps = _ceil_log(1.0 / eps, 3.0)
    reps = max(1, reps)
    total = math.fsum(f_factor(L, t) / (t + 1.0) for t in range(1, L))
    return reps * 3.0 * params.cq * total


def e_vertexfind(
    L: int,
    t: int,
    n_samples: int,
    zeta: float,
    delta_max: int,
    params: CostParams = DEFAULT_PARAMS,
) -> float:
    """Expected queries to find a good vertex among L, nested inner search.

    The outer search pays its expected query count at failure budget zeta/2;
    every outer query runs the inner worst-case search over the vertex's
    neighboring communities twice (compute and uncompute), with the inner
    failure probability budgeted across the outer worst case.
    """
    if delta_max < 0:
        raise ValueError("delta_max must be >= 0")
    if delta_max == 0:
        return 0.0
    outer = e_qsearch(L, t, n_samples, zeta / 2.0, params)
    worst_outer = w_qsearch(L, n_samples, zeta / 2.0, params)
    inner = w_zalka(delta_max, zeta / (2.0 * worst_outer), params)
    return outer * 2.0 * inner


def e_vertexfind_sg(
    L: int,
    t: int,
    n_samples: int,
    zeta: float,
    delta_max: int,
    params: CostParams = DEFAULT_PARAMS,
) -> float:
    """Sparse-graph variant: the inner check scans all delta_max candidates."""
    if delta_max < 0:
        raise ValueError("delta_max must be >= 0")
    if delta_max == 0:
        return 0.0
    return e_qsearch(L, t, n_samples, zeta, params) * 2.0 * delta_max


def findfirst_zeta(mu: float, L: int) -> float:
    """Split a failure budget mu across the first-good-vertex search calls."""
    if L < 1:
        raise ValueError("L must be >= 1")
    if L == 1:
        return mu
    return mu / (2.0 * math.ceil(math.log2(L)))


def epsilon_budget(n: int, params: CostParams = DEFAULT_PARAMS) -> float:
    """Per-subroutine failure probability for an n-vertex run."""
    if n < 2:
        raise ValueError("epsilon budget needs n >= 2")
    return params.eps_total / (n * math.log(n))
