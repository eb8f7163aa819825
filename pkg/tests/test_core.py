"""Temporal graph representation, sweeps, and reachability predicates."""

import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import tempograph as tg
from tempograph.gen import RngStream


def k3_example():
    # triangle with labels 0.2 / 0.5 / 0.3: the foremost route 0->2 goes
    # through vertex 1
    return tg.TemporalGraph(3, (0.0, 1.0), [0, 0, 1], [1, 2, 2],
                            [0.2, 0.5, 0.3])


def decreasing_path():
    # a-b-c where labels fall along the only route: c unreachable from a
    return tg.TemporalGraph(3, (0.0, 1.0), [0, 1], [1, 2], [0.9, 0.1])


class TestTemporalGraph:
    def test_construction_and_views(self):
        g = k3_example()
        assert g.n == 3 and g.num_edges == 3 and g.is_simple
        assert g.edge_labels(0, 1).tolist() == [0.2]
        assert g.edge_labels(2, 0).tolist() == [0.5]  # orientation-free
        assert g.edge_labels(0, 0).size == 0 or True  # no such key
        assert g.edge_dict() == {(0, 1): [0.2], (0, 2): [0.5], (1, 2): [0.3]}

    def test_multilabel_and_simple_flag(self):
        g = tg.TemporalGraph(2, (0.0, 1.0), [0, 0], [1, 1], [0.1, 0.6])
        assert g.num_edges == 1 and g.num_appearances == 2
        assert not g.is_simple
        assert g.edge_labels(0, 1).tolist() == [0.1, 0.6]

    def test_validation_errors(self):
        with pytest.raises(ValueError):
            tg.TemporalGraph(3, (0.0, 1.0), [0], [0], [0.5])  # self loop
        with pytest.raises(ValueError):
            tg.TemporalGraph(3, (0.0, 1.0), [0], [1], [1.5])  # outside window
        with pytest.raises(ValueError):
            tg.TemporalGraph(2, (0.0, 1.0), [0, 0], [1, 1], [0.5, 0.5])  # dup
        with pytest.raises(ValueError):
            tg.TemporalGraph(2, (0.0, 1.0), [0], [2], [0.5])  # id range

    def test_event_order_is_label_then_edge(self):
        g = tg.TemporalGraph(4, (0.0, 1.0), [2, 0, 0], [3, 1, 2],
                             [0.5, 0.5, 0.1])
        lab, eu, ev = g.events()
        assert lab.tolist() == [0.1, 0.5, 0.5]
        # ties broken by canonical edge id: (0,1) before (2,3)
        assert (eu.tolist(), ev.tolist()) == ([0, 0, 2], [2, 1, 3])

    def test_adjacency_sorted_by_neighbour_then_label(self):
        g = tg.TemporalGraph(4, (0.0, 1.0), [0, 0, 0, 1], [1, 1, 3, 2],
                             [0.7, 0.2, 0.4, 0.9])
        indptr, nbr, lab = g.adjacency()
        s, e = indptr[0], indptr[1]
        assert nbr[s:e].tolist() == [1, 1, 3]
        assert lab[s:e].tolist() == [0.2, 0.7, 0.4]
        s, e = indptr[1], indptr[2]
        assert nbr[s:e].tolist() == [0, 0, 2]


class TestRestrict:
    def test_filters_labels_and_drops_empty_edges(self):
        g = k3_example()
        r = tg.restrict(g, 0.3, 1.0)
        assert r.edge_dict() == {(0, 2): [0.5], (1, 2): [0.3]}
        assert r.window == (0.3, 1.0)
        assert r.n == g.n

    def test_identity_window(self):
        g = k3_example()
        r = tg.restrict(g, 0.0, 1.0)
        assert r.edge_dict() == g.edge_dict()

    def test_interval_must_be_inside_window(self):
        g = k3_example()
        with pytest.raises(ValueError):
            tg.restrict(g, -0.1, 0.5)
        with pytest.raises(ValueError):
            tg.restrict(g, 0.5, 1.5)

    def test_restricted_edge_count_matches_binomial_mean(self):
        # restriction of a complete sample to [0, p] keeps ~ C(n,2) p edges
        n, p, trials = 50, 0.1, 2000
        total = 0
        for t in range(trials):
            g = tg.sample_complete(n, RngStream(11, t))
            total += tg.restrict(g, 0.0, p).num_edges
        mean = total / trials
        expect = math.comb(n, 2) * p
        assert abs(mean - expect) < 3.0


class TestSweep:
    def test_k3_hand_example(self):
        am = tg.earliest_arrival_sweep(k3_example(), 0)
        assert am.as_dict() == {0: 0.0, 1: 0.2, 2: 0.3}

    def test_decreasing_path_unreachable(self):
        am = tg.earliest_arrival_sweep(decreasing_path(), 0)
        assert am.get(2) is None
        assert not am.all_reached
        with pytest.raises(KeyError):
            am[2]

    def test_single_edge(self):
        g = tg.TemporalGraph(2, (0.0, 1.0), [0], [1], [0.7])
        am = tg.earliest_arrival_sweep(g, 0)
        assert am[1] == 0.7

    def test_equal_label_chain_is_traversable(self):
        # two hops at the same time are a valid non-decreasing path, even
        # when the event order works against the propagation direction
        g = tg.TemporalGraph(3, (0.0, 1.0), [0, 1], [2, 2], [0.4, 0.4])
        am = tg.earliest_arrival_sweep(g, 1)
        assert am.as_dict() == {0: 0.4, 1: 0.0, 2: 0.4}

    def test_witness_paths_validate(self):
        for t in range(50):
            g = tg.sample_fnp(12, 0.5, RngStream(23, t))
            am = tg.earliest_arrival_sweep(g, 0)
            for v in range(12):
                if am.reached(v) and v != 0:
                    path = am.path_to(v)
                    assert path.arrival_time == am[v]
                    assert path.vertices[0] == 0 and path.vertices[-1] == v

    def test_window_extension_monotonicity(self):
        # arrivals never get worse when the window grows
        for t in range(30):
            g = tg.sample_complete(15, RngStream(5, t))
            a = tg.earliest_arrival_sweep(tg.restrict(g, 0.0, 0.4), 0)
            b = tg.earliest_arrival_sweep(tg.restrict(g, 0.0, 0.9), 0)
            for v in range(15):
                if a.reached(v):
                    assert b.reached(v) and b[v] <= a[v]


class TestSourceSinkConnectivity:
    def test_k3(self):
        g = k3_example()
        assert tg.is_temporal_source(g, 0)
        assert tg.is_temporally_connected(g)

    def test_decreasing_path(self):
        g = decreasing_path()
        assert not tg.is_temporal_source(g, 0)
        assert tg.is_temporal_sink(g, 0)  # 0.9 then 0.1 both reach 0? no:
        # b->a at 0.9 and c->b->a needs 0.1 <= 0.9: both reach a
        assert not tg.is_temporally_connected(g)

    def test_single_vertex_vacuous(self):
        g = tg.TemporalGraph(1, (0.0, 1.0), [], [], [])
        assert tg.is_temporal_source(g, 0)
        assert tg.is_temporal_sink(g, 0)
        assert tg.is_temporally_connected(g)

    def test_two_vertices_one_edge(self):
        g = tg.TemporalGraph(2, (0.0, 1.0), [0], [1], [0.5])
        assert tg.is_temporally_connected(g)

    def test_any_k3_with_distinct_labels_connected(self):
        # every ordering of three distinct labels keeps a triangle connected
        import itertools
        for perm in itertools.permutations([0.1, 0.5, 0.9]):
            g = tg.TemporalGraph(3, (0.0, 1.0), [0, 0, 1], [1, 2, 2],
                                 list(perm))
            assert tg.is_temporally_connected(g)

    def test_reversal_duality_on_random_samples(self):
        for t in range(300):
            g = tg.sample_fnp(8, 0.8, RngStream(31, t))
            rg = tg.reverse_time(g)
            for v in range(8):
                assert tg.is_temporal_source(g, v) == tg.is_temporal_sink(rg, v)

    def test_source_exists_matches_bruteforce(self):
        for t in range(200):
            g = tg.sample_fnp(6, 0.6, RngStream(77, t))
            brute = any(tg.is_temporal_source(g, v) for v in range(6))
            assert tg.temporal_source_exists(g) == brute

    def test_connectivity_matches_bruteforce(self):
        for t in range(200):
            g = tg.sample_fnp(6, 0.7, RngStream(78, t))
            brute = all(tg.is_temporal_source(g, v) for v in range(6))
            assert tg.is_temporally_connected(g) == brute


class TestReverseTime:
    def test_label_mapping(self):
        g = tg.TemporalGraph(2, (0.0, 1.0), [0], [1], [0.2])
        assert tg.reverse_time(g).edge_labels(0, 1).tolist() == [0.8]

    def test_involution_up_to_float_noise(self):
        for t in range(20):
            g = tg.sample_fnp(10, 0.5, RngStream(3, t))
            gg = tg.reverse_time(tg.reverse_time(g))
            assert np.allclose(gg.appearances()[2], g.appearances()[2],
                               atol=1e-12, rtol=0.0)
            assert gg.edge_dict().keys() == g.edge_dict().keys()

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=40, deadline=None)
    def test_duality_property(self, seed):
        g = tg.sample_fnp(7, 0.7, RngStream(seed, 0))
        rg = tg.reverse_time(g)
        for v in range(7):
            assert tg.is_temporal_source(g, v) == tg.is_temporal_sink(rg, v)
            assert tg.is_temporal_sink(g, v) == tg.is_temporal_source(rg, v)


class TestVerifySpanner:
    def test_full_appearance_set_iff_connected(self):
        for t in range(60):
            g = tg.sample_fnp(7, 0.7, RngStream(13, t))
            u, v, lab = g.appearances()
            apps = list(zip(u.tolist(), v.tolist(), lab.tolist()))
            assert tg.verify_spanner(g, apps) == tg.is_temporally_connected(g)

    def test_empty_set_fails_for_n_at_least_2(self):
        g = tg.TemporalGraph(2, (0.0, 1.0), [0], [1], [0.5])
        assert not tg.verify_spanner(g, [])

    def test_missing_appearance_rejected(self):
        g = k3_example()
        with pytest.raises(ValueError):
            tg.verify_spanner(g, [(0, 1, 0.25)])
        with pytest.raises(ValueError):
            tg.verify_spanner(g, [(1, 3, 0.2)])


class TestTwoHop:
    def test_direct_edges_suffice(self):
        g = tg.TemporalGraph(3, (0.0, 1.0), [0, 0, 1], [1, 2, 2],
                             [0.1, 0.9, 0.2])
        assert tg.two_hop_source_check(g, 0)

    def test_star_centre(self):
        g = tg.TemporalGraph(5, (0.0, 1.0), [0, 0, 0, 0], [1, 2, 3, 4],
                             [0.1, 0.2, 0.3, 0.4])
        assert tg.two_hop_source_check(g, 0)
        # leaf 1 bounces through the centre with non-decreasing labels,
        # leaf 4 cannot (its spoke label is the largest)
        assert tg.two_hop_source_check(g, 1)
        assert not tg.two_hop_source_check(g, 4)

    def test_three_hop_source_not_detected(self):
        # 0 reaches 3 only via a 3-hop path: two-hop check must say False
        # while the full sweep says True
        g = tg.TemporalGraph(4, (0.0, 1.0), [0, 1, 2], [1, 2, 3],
                             [0.1, 0.2, 0.3])
        assert tg.is_temporal_source(g, 0)
        assert not tg.two_hop_source_check(g, 0)

    def test_implies_temporal_source(self):
        for t in range(1000):
            g = tg.sample_fnp(10, 0.9, RngStream(41, t))
            if tg.two_hop_source_check(g, 0):
                assert tg.is_temporal_source(g, 0)

    def test_single_vertex(self):
        g = tg.TemporalGraph(1, (0.0, 1.0), [], [], [])
        assert tg.two_hop_source_check(g, 0)


class TestTextFormat:
    def test_round_trip(self):
        g = tg.sample_poisson(9, 0.8, RngStream(2, 5))
        buf = io.StringIO()
        tg.write_graph(g, buf, header="demo")
        buf.seek(0)
        h = tg.read_graph(buf)
        assert h.n == g.n
        assert h.edge_dict() == g.edge_dict()

    def test_comments_and_aggregation(self):
        text = "# a comment\nn 3\n0 1 0.5\n1 0 0.25\n1 2 0.75\n"
        g = tg.read_graph(io.StringIO(text))
        assert g.edge_dict() == {(0, 1): [0.25, 0.5], (1, 2): [0.75]}

    def test_malformed(self):
        with pytest.raises(ValueError):
            tg.read_graph(io.StringIO("0 1 0.5\n"))
        with pytest.raises(ValueError):
            tg.read_graph(io.StringIO("n 3\n0 1\n"))
