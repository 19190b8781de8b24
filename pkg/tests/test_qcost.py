"""Bound-suite spot values and properties.

Frozen expected values below were precomputed by direct evaluation of the
bound definitions in an independent script (standard library math only).
"""

from __future__ import annotations

import math

import pytest

from qlouvain.qcost import (
    CostParams,
    DEFAULT_PARAMS,
    e_qmax,
    e_qsearch,
    e_vertexfind,
    e_vertexfind_sg,
    epsilon_budget,
    f_factor,
    findfirst_zeta,
    q_grover,
    qsearch_breakdown,
    w_qsearch,
    w_zalka,
)


class TestFFactor:
    def test_flat_branch(self):
        for L, t in [(4, 1), (4, 2), (100, 25), (100, 99), (7, 2), (1, 1)]:
            assert f_factor(L, t) == 2.0344

    def test_boundary_is_flat(self):
        # t == L/4 falls in the flat branch.
        assert f_factor(4, 1) == 2.0344
        assert f_factor(1000, 250) == 2.0344
        assert f_factor(1000, 249) != 2.0344

    def test_large_list_single_marked(self):
        assert f_factor(1000, 1) == pytest.approx(84.18684968143742, abs=1e-9)

    def test_small_value(self):
        # (9/4)*5/2 + ceil(log_{6/5}(5/4)) - 3 = 5.625 + 2 - 3
        assert f_factor(5, 1) == pytest.approx(4.625, abs=1e-12)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            f_factor(10, 0)
        with pytest.raises(ValueError):
            f_factor(10, 11)

    def test_inline_bound(self):
        # F(L, t) <= alpha*sqrt(L)/(3*sqrt(t)) on the steep branch.
        alpha = DEFAULT_PARAMS.alpha
        for exp in range(3, 21):
            L = 2**exp
            ts = sorted({1, 2, 3, L // 100 + 1, L // 16, L // 5, L // 4 - 1})
            for t in ts:
                if t < 1 or t >= L / 4:
                    continue
                assert f_factor(L, t) <= alpha * math.sqrt(L) / (3.0 * math.sqrt(t))


class TestQGrover:
    def test_flat_case(self):
        assert q_grover(100, 25) == pytest.approx(4.114804065553946, abs=1e-9)

    def test_single_marked(self):
        assert q_grover(1000, 1) == pytest.approx(202.65508307721558, abs=1e-9)

    def test_small_f_limit(self):
        # As F/(alpha*sqrt(L)) -> 0 the value approaches 2F.
        big = q_grover(10**12, 10**12 // 4)
        assert big == pytest.approx(2 * 2.0344, rel=1e-5)


class TestQSearch:
    def test_all_marked_one_sample(self):
        for L in [1, 2, 10, 1000]:
            assert e_qsearch(L, L, 1, 0.1) == pytest.approx(1.0, abs=1e-12)

    def test_classical_limit(self):
        # Huge prelude: expectation approaches pure sampling L/t.
        assert e_qsearch(100, 4, 10**6, 0.1) == pytest.approx(25.0, rel=1e-9)

    def test_t_zero_is_worst_case(self):
        assert e_qsearch(100, 0, 0, 1 / 3) == pytest.approx(184.0, abs=1e-9)

    def test_worst_case_values(self):
        assert w_qsearch(100, 0, 1 / 3) == pytest.approx(184.0, abs=1e-9)
        assert w_qsearch(1, 130, 1 / 3) == pytest.approx(148.4, abs=1e-9)
        # eps = 1/2: ceil(log3 2) = 1, so 18.4*sqrt(L) on top of the prelude.
        assert w_qsearch(25, 0, 0.5) == pytest.approx(18.4 * 5, abs=1e-9)

    def test_envelope(self):
        # e_qsearch never exceeds max(L/t, worst case) for 1 <= t <= L.
        eps = 1 / 3
        for L in [2, 8, 64, 512, 4096]:
            w = w_qsearch(L, 0, eps)
            for t in sorted({1, 2, L // 8 + 1, L // 4, L // 2, L}):
                if t < 1:
                    continue
                for n_samples in (0, 1, 130):
                    val = e_qsearch(L, t, n_samples + 0, eps)
                    cap = max(L / t, w_qsearch(L, n_samples, eps))
                    assert val <= cap + 1e-9

    def test_breakdown_sums(self):
        b = qsearch_breakdown(1000, 10, 130, 1e-3)
        assert b.queries == pytest.approx(
            b.components["classical_sampling"] + b.components["grover"], abs=1e-9
        )
        assert b.queries == pytest.approx(e_qsearch(1000, 10, 130, 1e-3), abs=1e-12)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            e_qsearch(10, -1, 0, 0.1)
        with pytest.raises(ValueError):
            e_qsearch(10, 11, 0, 0.1)
        with pytest.raises(ValueError):
            w_qsearch(10, 0, 1.5)


class TestZalka:
    def test_single_item(self):
        assert w_zalka(1, 0.5) == pytest.approx(28.885765876316732, abs=1e-9)

    def test_large_list(self):
        assert w_zalka(10**4, 1e-6) == pytest.approx(3391.5926535897934, abs=1e-9)

    def test_eps_scaling_enters_via_ceiling(self):
        # Halving eps changes only the ceil'd repetition count.
        r1 = math.ceil(math.log(1e4) / (2 * math.log(4 / 3)))
        r2 = math.ceil(math.log(2e4) / (2 * math.log(4 / 3)))
        v1 = w_zalka(100, 1e-4)
        v2 = w_zalka(100, 5e-5)
        assert v1 == pytest.approx(2 * (5 * r1 + math.pi * 10 * math.sqrt(r1)))
        assert v2 == pytest.approx(2 * (5 * r2 + math.pi * 10 * math.sqrt(r2)))

    def test_domain_error(self):
        with pytest.raises(ValueError):
            w_zalka(10, 0.0)


class TestQMax:
    def test_trivial_list(self):
        assert e_qmax(1, 1 / 3) == 0.0

    def test_two_items(self):
        assert e_qmax(2, 1 / 3) == pytest.approx(6.1032, abs=1e-9)

    def test_five_items(self):
        # 7 * 3 * 2 * (F(5,1)/2 + 2.0344*(1/3 + 1/4 + 1/5))
        assert e_qmax(5, 1e-3) == pytest.approx(164.05676, abs=1e-9)

    def test_monotone_in_length(self):
        eps = 1e-2
        vals = [e_qmax(L, eps) for L in range(1, 40)]
        assert all(b > a for a, b in zip(vals, vals[1:]))


class TestVertexFind:
    def test_outer_term_unit(self):
        # t = L with one sample: outer expectation is exactly 1, so the value
        # equals the doubled inner worst case.
        zeta = 1e-3
        inner = w_zalka(20, zeta / (2 * w_qsearch(50, 1, zeta / 2)))
        assert e_vertexfind(50, 50, 1, zeta, 20) == pytest.approx(2 * inner, abs=1e-9)

    def test_composition(self):
        # Product of the two independently evaluated factors.
        zeta = 1e-3
        outer = e_qsearch(1000, 10, 0, zeta / 2)
        worst = w_qsearch(1000, 0, zeta / 2)
        inner = w_zalka(20, zeta / (2 * worst))
        expect = outer * 2 * inner
        assert expect == pytest.approx(103481.40256709648, rel=1e-9)
        assert e_vertexfind(1000, 10, 0, zeta, 20) == pytest.approx(expect, abs=1e-6)

    def test_monotone_in_precision(self):
        a = e_vertexfind(1000, 10, 0, 1e-3, 20)
        b = e_vertexfind(1000, 10, 0, 1e-6, 20)
        assert b > a

    def test_sparse_variant(self):
        assert e_vertexfind_sg(100, 0, 0, 1 / 3, 5) == pytest.approx(1840.0, abs=1e-9)
        zeta = 1e-3
        assert e_vertexfind_sg(50, 50, 1, zeta, 7) == pytest.approx(14.0, abs=1e-9)

    def test_degenerate_inner(self):
        assert e_vertexfind(100, 5, 0, 1e-3, 0) == 0.0
        assert e_vertexfind_sg(100, 5, 0, 1e-3, 0) == 0.0


class TestBudgets:
    def test_findfirst_zeta(self):
        assert findfirst_zeta(0.01, 1024) == pytest.approx(5e-4, abs=1e-15)
        assert findfirst_zeta(0.3, 2) == pytest.approx(0.15, abs=1e-15)
        assert findfirst_zeta(0.3, 1) == pytest.approx(0.3, abs=1e-15)

    def test_epsilon_budget(self):
        assert epsilon_budget(1000) == pytest.approx(1.4476482730108396e-09, rel=1e-12)
        assert epsilon_budget(2) == pytest.approx(1e-5 / (2 * math.log(2)), rel=1e-12)
        with pytest.raises(ValueError):
            epsilon_budget(1)

    def test_epsilon_budget_monotone(self):
        vals = [epsilon_budget(n) for n in (2, 3, 10, 100, 10**6)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_move_budget(self):
        assert DEFAULT_PARAMS.move_budget(1000) == pytest.approx(1000 * math.log(1000))
        base2 = CostParams(budget_log_base=2.0)
        assert base2.move_budget(1024) == pytest.approx(1024 * 10.0, rel=1e-12)


class TestGeneralProperties:
    def test_finite_nonnegative_deterministic(self):
        cases = []
        for L in (1, 2, 17, 512, 4096):
            for t in sorted({0, 1, L // 3, L}):
                cases.append((L, t))
        for L, t in cases:
            a = e_qsearch(L, t, 130, 1e-6)
            b = e_qsearch(L, t, 130, 1e-6)
            assert a == b
            assert math.isfinite(a) and a >= 0

    def test_custom_params_flow_through(self):
        loose = CostParams(alpha=9.2, cq=1.0)
        assert w_qsearch(100, 0, 1 / 3, loose) == pytest.approx(92.0, abs=1e-9)
        assert e_qmax(2, 1 / 3, loose) == pytest.approx(3.0516, abs=1e-9)
