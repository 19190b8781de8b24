from __future__ import annotations

import numpy as np
import pytest

from qlouvain.community import CommunityError, CommunityState, MoveDelta
from qlouvain.graph import generate_fcs, FcsConfig, graph_from_edges

from oracles import (
    brute_best_move,
    brute_delta,
    brute_modularity,
    random_connected_weights,
    rebuild_structure,
)


def triangle():
    return graph_from_edges(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)])


def random_state(rng, n, extra_edges, weighted, moves):
    """Fresh CommunityState driven through `moves` random legal moves."""
    edges = random_connected_weights(rng, n, extra_edges, weighted)
    g = graph_from_edges(n, edges)
    st = CommunityState(g)
    for _ in range(moves):
        u = int(rng.integers(0, n))
        cands = [c for c in st.neighbor_communities(u) if c != st.labels[u]]
        if not cands:
            continue
        st.apply_move(u, int(rng.choice(cands)))
    return g, st


class TestSingletonInit:
    def test_triangle_sigma(self):
        st = CommunityState(triangle())
        assert st.sigma.tolist() == [2.0, 2.0, 2.0]
        assert st.labels.tolist() == [0, 1, 2]
        assert st.own_cnt.tolist() == [0, 0, 0]
        assert st.eta_len.tolist() == [2, 2, 2]
        assert st.delta_max == 2
        assert st.counter == 0

    def test_sigma_sums_to_total(self):
        rng = np.random.default_rng(7)
        g, st = random_state(rng, 40, 80, True, 0)
        assert np.sum(st.sigma) == pytest.approx(2.0 * g.total_weight)


class TestDelta:
    def test_triangle_gain_value(self):
        st = CommunityState(triangle())
        assert st.delta(0, 1) == pytest.approx(1.0 / 9.0, abs=1e-12)

    def test_own_community_is_zero_and_counted(self):
        st = CommunityState(triangle())
        assert st.delta(0, 0) == 0.0
        assert st.counter == 1

    def test_nonadjacent_community_rejected(self):
        g = graph_from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)])
        st = CommunityState(g)
        with pytest.raises(CommunityError):
            st.delta(0, 3)
        assert st.counter == 0

    def test_vertex_out_of_range(self):
        st = CommunityState(triangle())
        with pytest.raises(CommunityError):
            st.delta(3, 0)

    def test_matches_modularity_difference_randomized(self):
        rng = np.random.default_rng(20260825)
        checked = 0
        while checked < 1000:
            n = int(rng.integers(4, 65))
            g, st = random_state(
                rng, n, int(rng.integers(0, 3 * n)), bool(rng.integers(0, 2)),
                int(rng.integers(0, n)),
            )
            labels = st.labels.copy()
            for _ in range(4):
                u = int(rng.integers(0, n))
                cands = st.neighbor_communities(u)
                if not cands:
                    continue
                alpha = int(rng.choice(cands))
                got = st.delta(u, alpha)
                want = brute_delta(g, labels, u, alpha)
                assert got == pytest.approx(want, abs=1e-9)
                checked += 1


class TestBestMove:
    def test_triangle_tie_prefers_smallest_community(self):
        st = CommunityState(triangle())
        mv = st.best_move(0)
        assert mv == MoveDelta(0, 1, pytest.approx(1.0 / 9.0))

    def test_counter_counts_each_candidate(self):
        st = CommunityState(triangle())
        st.best_move(0)
        assert st.counter == 2
        st.best_move(0)
        assert st.counter == 4

    def test_isolated_vertex_has_no_candidates(self):
        g = graph_from_edges(3, [(0, 1, 1.0)])
        st = CommunityState(g)
        assert st.best_move(2) == MoveDelta(2, None, 0.0)
        assert st.counter == 0

    def test_own_community_can_win(self):
        # Two dense blocks joined by one edge: after both endpoints of the
        # bridge settle in their blocks, neither gains by crossing.
        edges = [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0),
                 (3, 4, 1.0), (3, 5, 1.0), (4, 5, 1.0), (2, 3, 1.0)]
        g = graph_from_edges(6, edges)
        st = CommunityState(g)
        for u, beta in ((1, 0), (2, 0), (4, 3), (5, 3)):
            st.apply_move(u, beta)
        mv = st.best_move(2)
        assert mv.target == 0 and mv.gain == 0.0

    def test_matches_brute_force_argmax(self):
        rng = np.random.default_rng(99)
        for _ in range(60):
            n = int(rng.integers(4, 33))
            g, st = random_state(
                rng, n, int(rng.integers(0, 2 * n)), bool(rng.integers(0, 2)),
                int(rng.integers(0, n)),
            )
            labels = st.labels.copy()
            u = int(rng.integers(0, n))
            want_a, want_d = brute_best_move(g, labels, u)
            mv = st.best_move(u)
            assert mv.target == want_a
            if want_a is not None:
                assert mv.gain == pytest.approx(want_d, abs=1e-9)

    def test_argmax_invariant_under_weight_rescale(self):
        rng = np.random.default_rng(5)
        edges = random_connected_weights(rng, 24, 40, True)
        g1 = graph_from_edges(24, edges)
        g2 = graph_from_edges(24, [(u, v, 3.0 * w) for u, v, w in edges])
        s1, s2 = CommunityState(g1), CommunityState(g2)
        for u in range(24):
            m1, m2 = s1.best_move(u), s2.best_move(u)
            assert m1.target == m2.target
            assert m1.gain == pytest.approx(m2.gain, abs=1e-12)


class TestIsGood:
    def test_early_exit_counts_one(self):
        st = CommunityState(triangle())
        assert st.is_good(0)
        assert st.counter == 1

    def test_negative_vertex_scans_all(self):
        edges = [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0),
                 (3, 4, 1.0), (3, 5, 1.0), (4, 5, 1.0), (2, 3, 1.0)]
        st = CommunityState(graph_from_edges(6, edges))
        for u, beta in ((1, 0), (2, 0), (4, 3), (5, 3)):
            st.apply_move(u, beta)
        before = st.counter
        assert not st.is_good(2)
        # candidates of 2: own community 0 (neighbors 0, 1) and community 3.
        assert st.counter - before == 2

    def test_agrees_with_best_move_sign(self):
        rng = np.random.default_rng(1234)
        for _ in range(40):
            n = int(rng.integers(4, 40))
            g, st = random_state(
                rng, n, int(rng.integers(0, 2 * n)), True, int(rng.integers(0, n))
            )
            for u in range(n):
                assert st.is_good(u, count=False) == (
                    st.best_move(u, count=False).gain > 0.0
                )

    def test_uncounted_mode_leaves_counter(self):
        st = CommunityState(triangle())
        st.is_good(0, count=False)
        st.best_move(0, count=False)
        assert st.counter == 0


class TestApplyMove:
    def test_triangle_merge_updates_sums(self):
        st = CommunityState(triangle())
        st.apply_move(0, 1)
        assert st.labels.tolist() == [1, 1, 2]
        assert st.sigma.tolist() == [0.0, 4.0, 2.0]
        # vertex 2 now sees a single neighboring community {1} of weight 2.
        lo = st.graph.adj_start[2]
        assert st.eta_len[2] == 1
        assert st.eta_comm[lo] == 1 and st.eta_w[lo] == 2.0
        assert st.own_s.tolist() == [1.0, 1.0, 0.0]
        assert st.own_cnt.tolist() == [1, 1, 0]

    def test_move_back_restores_structure(self):
        # Origin community keeps members, so the return move stays legal.
        edges = [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0),
                 (3, 4, 1.0), (3, 5, 1.0), (4, 5, 1.0), (2, 3, 1.0)]
        g = graph_from_edges(6, edges)

        def settled():
            s = CommunityState(g)
            for u, beta in ((1, 0), (2, 0), (4, 3), (5, 3)):
                s.apply_move(u, beta)
            return s

        st, ref = settled(), settled()
        st.apply_move(2, 3)
        st.apply_move(2, 0)
        for name in ("labels", "sigma", "own_s", "own_cnt", "eta_len"):
            assert getattr(st, name).tolist() == getattr(ref, name).tolist()
        for u in range(6):
            lo, ln = g.adj_start[u], st.eta_len[u]
            assert st.eta_comm[lo : lo + ln].tolist() == ref.eta_comm[lo : lo + ln].tolist()
            assert st.eta_w[lo : lo + ln].tolist() == ref.eta_w[lo : lo + ln].tolist()
            assert st.eta_cnt[lo : lo + ln].tolist() == ref.eta_cnt[lo : lo + ln].tolist()

    def test_rejects_own_and_nonadjacent_targets(self):
        g = graph_from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)])
        st = CommunityState(g)
        with pytest.raises(CommunityError):
            st.apply_move(0, 0)
        with pytest.raises(CommunityError):
            st.apply_move(0, 3)

    def test_does_not_count(self):
        st = CommunityState(triangle())
        st.apply_move(0, 1)
        assert st.counter == 0

    def test_structure_matches_rebuild_after_random_moves(self):
        rng = np.random.default_rng(31337)
        for _ in range(30):
            n = int(rng.integers(5, 48))
            g, st = random_state(
                rng, n, int(rng.integers(0, 3 * n)), bool(rng.integers(0, 2)),
                int(rng.integers(1, 3 * n)),
            )
            sigma, own_s, own_cnt, eta = rebuild_structure(g, st.labels)
            assert np.allclose(st.sigma, sigma, atol=1e-9)
            assert np.allclose(st.own_s, own_s, atol=1e-9)
            assert st.own_cnt.tolist() == own_cnt.tolist()
            for u in range(n):
                lo, ln = g.adj_start[u], int(st.eta_len[u])
                got = [
                    (int(st.eta_comm[lo + i]), st.eta_w[lo + i], int(st.eta_cnt[lo + i]))
                    for i in range(ln)
                ]
                assert [(c, cnt) for c, _, cnt in got] == [
                    (c, cnt) for c, _, cnt in eta[u]
                ]
                for (_, w_got, _), (_, w_want, _) in zip(got, eta[u]):
                    assert w_got == pytest.approx(w_want, abs=1e-9)

    def test_delta_max_tracks_current_maximum(self):
        st = CommunityState(triangle())
        assert st.delta_max == 2
        st.apply_move(0, 1)
        assert st.delta_max == 2
        # Collapsing everything leaves one candidate (the shared community)
        # per vertex, so the maximum drops.
        st.apply_move(2, 1)
        assert st.delta_max == 1

    def test_delta_max_matches_brute_force_randomized(self):
        rng = np.random.default_rng(515)
        for _ in range(20):
            n = int(rng.integers(2, 40))
            g, st = random_state(rng, n, int(rng.integers(0, 3 * n)),
                                 bool(rng.integers(0, 2)), 0)
            for _ in range(25):
                u = int(rng.integers(0, n))
                lo = g.adj_start[u]
                cands = [
                    int(c)
                    for c in st.eta_comm[lo : lo + st.eta_len[u]]
                    if c != st.labels[u]
                ]
                if cands:
                    st.apply_move(u, int(rng.choice(cands)))
                want = max(st.community_count(v) for v in range(n))
                assert st.delta_max == want
                assert int(st.cnt_buckets.sum()) == n


class TestModularity:
    def test_triangle_partitions(self):
        g = triangle()
        st = CommunityState(g)
        assert st.modularity() == pytest.approx(-1.0 / 3.0, abs=1e-12)
        st.apply_move(0, 1)
        assert st.modularity() == pytest.approx(-2.0 / 9.0, abs=1e-12)
        st.apply_move(2, 1)
        assert st.modularity() == pytest.approx(0.0, abs=1e-12)

    def test_does_not_count(self):
        st = CommunityState(triangle())
        st.modularity()
        assert st.counter == 0

    def test_matches_brute_force_randomized(self):
        rng = np.random.default_rng(2718)
        for _ in range(40):
            n = int(rng.integers(4, 56))
            g, st = random_state(
                rng, n, int(rng.integers(0, 3 * n)), bool(rng.integers(0, 2)),
                int(rng.integers(0, 2 * n)),
            )
            assert st.modularity() == pytest.approx(
                brute_modularity(g, st.labels), abs=1e-9
            )

    def test_fcs_graph_with_planted_labels_is_positive(self):
        g = generate_fcs(FcsConfig(n=200, avg_degree=4.0, community_size=25,
                                    mu=0.2, seed=3))
        st = CommunityState(g)
        planted = np.arange(200, dtype=np.int64) // 25
        assert brute_modularity(g, planted) > 0.4


class TestCommunitySizes:
    def test_triangle_after_merge(self):
        st = CommunityState(triangle())
        st.apply_move(0, 1)
        assert st.community_sizes() == {1: 2, 2: 1}
