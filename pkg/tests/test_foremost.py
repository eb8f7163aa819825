"""Foremost trees: correctness against the sweep oracle and trajectories."""

import math

import numpy as np
import pytest

import tempograph as tg
from tempograph.foremost import (NotTemporalSourceError,
                                 reference_curve_points)
from tempograph.gen import RngStream


class TestForemostTree:
    def test_k3_hand_simulation(self):
        g = tg.TemporalGraph(3, (0.0, 1.0), [0, 0, 1], [1, 2, 2],
                             [0.2, 0.5, 0.3])
        t = tg.foremost_tree(g, 0)
        assert t.edges() == [(0, 1, 0.2), (1, 2, 0.3)]
        assert t.trajectory.tolist() == [0.2, 0.3]

    def test_single_edge(self):
        g = tg.TemporalGraph(2, (0.0, 1.0), [0], [1], [0.7])
        t = tg.foremost_tree(g, 0)
        assert t.trajectory.tolist() == [0.7]

    def test_star_attaches_in_label_order(self):
        g = tg.TemporalGraph(6, (0.0, 1.0), [0] * 5, [1, 2, 3, 4, 5],
                             [0.5, 0.1, 0.4, 0.2, 0.3])
        t = tg.foremost_tree(g, 0)
        assert t.attach_order.tolist() == [2, 4, 5, 3, 1]
        assert t.trajectory.tolist() == [0.1, 0.2, 0.3, 0.4, 0.5]

    def test_rejects_non_source(self):
        g = tg.TemporalGraph(3, (0.0, 1.0), [0, 1], [1, 2], [0.9, 0.1])
        with pytest.raises(NotTemporalSourceError) as err:
            tg.foremost_tree(g, 0)
        assert err.value.step is not None

    def test_trusted_flag_still_fails_loudly_when_stuck(self):
        g = tg.TemporalGraph(3, (0.0, 1.0), [0, 1], [1, 2], [0.9, 0.1])
        with pytest.raises(NotTemporalSourceError):
            tg.foremost_tree(g, 0, trusted=True)

    def test_requires_simple_graph(self):
        g = tg.TemporalGraph(2, (0.0, 1.0), [0, 0], [1, 1], [0.1, 0.6])
        with pytest.raises(ValueError):
            tg.foremost_tree(g, 0)

    def test_oracle_equivalence_random_sparse(self):
        # the greedy tree realises exactly the sweep-oracle arrival times,
        # label-for-label, on graphs where the root is a source
        checked = 0
        for t in range(400):
            g = tg.sample_fnp(9, 0.75, RngStream(101, t))
            if not tg.is_temporal_source(g, 0):
                continue
            tree = tg.foremost_tree(g, 0, trusted=True)
            am = tg.earliest_arrival_sweep(g, 0)
            arr = tree.arrival_times()
            for v in range(9):
                assert arr[v] == am[v]
            checked += 1
        assert checked > 100

    def test_monotone_labels(self):
        for t in range(100):
            g = tg.sample_complete(30, RngStream(55, t))
            y = tg.foremost_tree(g, 0, trusted=True).trajectory
            assert np.all(np.diff(y) >= 0)

    def test_tree_paths_are_valid_temporal_paths(self):
        g = tg.sample_complete(40, RngStream(3, 3))
        tree = tg.foremost_tree(g, 0, trusted=True)
        for v in tree.attach_order:
            labs = []
            w = int(v)
            while w != tree.root:
                labs.append(float(tree.parent_label[w]))
                w = int(tree.parent[w])
            labs.reverse()
            assert all(b >= a for a, b in zip(labs, labs[1:]))


class TestMultilabel:
    def test_hand_simulation_two_labels(self):
        # edge 0-1 carries {0.1, 0.6}, edge 1-2 carries {0.4}: from 0 the
        # tree uses 0-1 at 0.1 and 1-2 at 0.4
        g = tg.TemporalGraph(3, (0.0, 1.0), [0, 0, 1], [1, 1, 2],
                             [0.1, 0.6, 0.4])
        t = tg.foremost_tree_multilabel(g, 0)
        assert t.edges() == [(0, 1, 0.1), (1, 2, 0.4)]

    def test_hand_simulation_pick_earliest_eligible(self):
        # from 0: edge 0-1 has {0.5}, edge 0-2 has {0.2, 0.9}, edge 1-2
        # has {0.3}: attach 2 at 0.2 then 1 via 2 at 0.3
        g = tg.TemporalGraph(3, (0.0, 1.0), [0, 0, 0, 1], [1, 2, 2, 2],
                             [0.5, 0.2, 0.9, 0.3])
        t = tg.foremost_tree_multilabel(g, 0)
        assert t.edges() == [(0, 2, 0.2), (2, 1, 0.3)]

    def test_simple_input_degenerates_to_foremost_tree(self):
        for t in range(200):
            g = tg.sample_fnp(8, 0.8, RngStream(900, t))
            if not tg.is_temporal_source(g, 0):
                continue
            a = tg.foremost_tree(g, 0, trusted=True)
            b = tg.foremost_tree_multilabel(g, 0, trusted=True)
            assert a.attach_order.tolist() == b.attach_order.tolist()
            assert a.edges() == b.edges()

    def test_arrivals_match_sweep_on_poisson_graphs(self):
        checked = 0
        for t in range(200):
            g = tg.sample_poisson(8, 1.5, RngStream(901, t))
            am = tg.earliest_arrival_sweep(g, 0)
            if not am.all_reached:
                continue
            tree = tg.foremost_tree_multilabel(g, 0, trusted=True)
            arr = tree.arrival_times()
            for v in range(8):
                assert arr[v] == am[v]
            checked += 1
        assert checked > 50


class TestReverseForemost:
    def test_k3_reverse(self):
        g = tg.TemporalGraph(3, (0.0, 1.0), [0, 0, 1], [1, 2, 2],
                             [0.2, 0.5, 0.3])
        t = tg.reverse_foremost_tree(g, 2)
        # every vertex must reach 2 along the tree with non-increasing
        # root-ward labels; appearances must be real appearances of g
        apps = set(t.appearances())
        assert apps <= {(0, 1, 0.2), (0, 2, 0.5), (1, 2, 0.3)}
        assert len(apps) == 2

    def test_single_edge(self):
        g = tg.TemporalGraph(2, (0.0, 1.0), [0], [1], [0.7])
        t = tg.reverse_foremost_tree(g, 1)
        assert t.appearances() == [(0, 1, 0.7)]

    def test_trajectory_matches_reversed_run(self):
        for t in range(50):
            g = tg.sample_fnp(8, 0.9, RngStream(44, t))
            if not tg.is_temporal_sink(g, 3):
                continue
            rt = tg.reverse_foremost_tree(g, 3)
            ft = tg.foremost_tree(tg.reverse_time(g), 3, trusted=True)
            assert rt.trajectory.tolist() == ft.trajectory.tolist()

    def test_appearance_labels_are_exact(self):
        # label back-mapping must be lookup-exact, never arithmetic
        for t in range(50):
            g = tg.sample_fnp(10, 0.9, RngStream(45, t))
            if not tg.is_temporal_sink(g, 0):
                continue
            rt = tg.reverse_foremost_tree(g, 0)
            pairs = g.pair_label_map()
            for (a, b, lab) in rt.appearances():
                assert any(x == lab for x in pairs[(a, b)])

    def test_everyone_reaches_root(self):
        for t in range(50):
            g = tg.sample_fnp(9, 0.9, RngStream(46, t))
            if not tg.is_temporal_sink(g, 4):
                continue
            rt = tg.reverse_foremost_tree(g, 4)
            apps = rt.appearances()
            sub = tg.TemporalGraph(
                9, g.window,
                [a for a, _, _ in apps], [b for _, b, _ in apps],
                [x for _, _, x in apps])
            assert tg.is_temporal_sink(sub, 4)


class TestTruncation:
    def test_caps_formula(self):
        caps = tg.truncation_caps(4)
        # k=1: ln ln 4 / 3, k=2: (2 ln 2 + ln ln 4) / 4, k=3 symmetric to 1
        assert caps[0] == pytest.approx(0.108878, abs=1e-6)
        assert caps[1] == pytest.approx(0.428232, abs=1e-6)
        assert caps[2] == pytest.approx(caps[0])

    def test_caps_symmetry(self):
        for n in (5, 17, 60, 200):
            caps = tg.truncation_caps(n)
            assert np.allclose(caps, caps[::-1])

    def test_caps_need_n_at_least_3(self):
        with pytest.raises(ValueError):
            tg.truncation_caps(2)

    def test_truncate_below_caps_is_identity(self):
        g = tg.sample_complete(50, RngStream(70, 0))
        tree = tg.foremost_tree(g, 0, trusted=True)
        traj = tg.Trajectory.from_tree(tree)
        huge = np.full(49, 10.0)
        out = tg.truncate_trajectory(traj, huge)
        assert out.truncation_free
        assert np.array_equal(out.y_hat, out.y)

    def test_truncate_caps_bite(self):
        traj = tg.Trajectory(n=2, y=np.array([0.0, 0.5]), x=np.array([0.5]))
        out = tg.truncate_trajectory(traj, np.array([0.1]))
        assert out.y_hat[1] == pytest.approx(0.1)
        assert not out.truncation_free

    def test_y_hat_never_exceeds_y(self):
        for t in range(20):
            g = tg.sample_complete(80, RngStream(71, t))
            tree = tg.foremost_tree(g, 0, trusted=True)
            out = tg.truncate_trajectory(tg.Trajectory.from_tree(tree),
                                         tg.truncation_caps(80))
            assert np.all(out.y_hat <= out.y)
            # equality of the full vectors holds iff nothing was capped
            assert out.truncation_free == bool(
                np.array_equal(out.y_hat, out.y))


class TestReferenceCurve:
    def test_values(self):
        assert tg.reference_curve(5, 0) == 0.0
        assert tg.reference_curve(3, 2) == pytest.approx(2 / 3)
        assert tg.reference_curve(5, 4) == pytest.approx(24 / 35)

    def test_range_check(self):
        with pytest.raises(ValueError):
            tg.reference_curve(5, 5)
        with pytest.raises(ValueError):
            tg.reference_curve(5, -1)

    def test_endpoint_close_to_2log_over_n(self):
        # the curve's endpoint equals 2 ln n / n up to O(1)/n
        for n in (100, 500, 2000, 10000):
            end = tg.reference_curve(n, n - 1)
            target = 2 * math.log(n) / n
            assert target - 6.0 / n <= end <= target + 6.0 / n

    def test_points_match_scalar(self):
        pts = reference_curve_points(10)
        for k in range(1, 10):
            assert pts[k - 1] == pytest.approx(tg.reference_curve(10, k))


class TestDeviation:
    def test_zero_when_on_curve(self):
        n = 6
        ref = reference_curve_points(n)
        y = np.concatenate([[0.0], ref])
        traj = tg.Trajectory(n=n, y=y, x=np.diff(y))
        out = tg.truncate_trajectory(traj, np.full(n - 1, 10.0))
        assert tg.trajectory_deviation(out) == pytest.approx(0.0, abs=1e-15)

    def test_requires_truncation_first(self):
        traj = tg.Trajectory(n=3, y=np.zeros(3), x=np.zeros(2))
        with pytest.raises(ValueError):
            tg.trajectory_deviation(traj)
