"""Spread estimation against hand-computed and closed-form values."""

import math

import numpy as np
import pytest

from reachout.cascade import (
    EXACT_EDGE_LIMIT,
    EnsembleCascades,
    ExactOracle,
    estimate_spread,
    exact_spread,
    simulate_cascade,
)
from reachout.errors import OracleBoundError, ValidationError
from reachout.graphs import build_network, sample_network
from tests.conftest import synth_network


def path_net(prop=0.5):
    return build_network(["A", "B", "C"],
                         [("A", "B", 1.0), ("B", "C", 1.0)], prop)


class TestSimulateCascade:
    def test_seeds_always_influenced(self):
        net = synth_network(0x71, 10, 15)
        s = sample_network(net, 0)
        out = simulate_cascade(s, ["n00", "n03"], 0.01, 5)
        assert {"n00", "n03"} <= out

    def test_prop_one_reaches_component(self):
        net = path_net()
        s = sample_network(net, 0)  # both edges certain
        assert simulate_cascade(s, ["A"], 1.0, 0) == {"A", "B", "C"}

    def test_prop_zero_spreads_nowhere(self):
        net = path_net()
        s = sample_network(net, 0)
        for seed in range(20):
            assert simulate_cascade(s, ["B"], 0.0, seed) == {"B"}

    def test_deterministic_in_run_seed(self):
        net = synth_network(0x72, 15, 30)
        s = sample_network(net, 4)
        a = simulate_cascade(s, ["n01"], 0.5, 77)
        b = simulate_cascade(s, ["n01"], 0.5, 77)
        assert a == b

    def test_unknown_seed_rejected(self):
        net = path_net()
        s = sample_network(net, 0)
        with pytest.raises(ValidationError, match="not in network"):
            simulate_cascade(s, ["Z"], 0.5, 0)

    def test_influence_frequency_single_edge(self):
        # A-B certain edge, prop 0.6: P(B influenced from A) = 0.6 (4 SE).
        net = build_network(["A", "B"], [("A", "B", 1.0)], 0.6)
        s = sample_network(net, 0)
        trials = 4000
        hits = sum("B" in simulate_cascade(s, ["A"], 0.6, t) for t in range(trials))
        se = math.sqrt(0.6 * 0.4 / trials)
        assert abs(hits / trials - 0.6) < 4 * se


class TestExactOracle:
    def test_triangle_pinned(self):
        # All existence 0.5, prop 1.0, seed A: E[influenced] = 2.25 and
        # P(B) = P(C) = 0.625 by outcome enumeration.
        net = build_network(
            ["A", "B", "C"],
            [("A", "B", 0.5), ("A", "C", 0.5), ("B", "C", 0.5)],
            1.0,
        )
        est = exact_spread(net, ["A"])
        assert est.expected_influenced == pytest.approx(2.25, abs=1e-12)
        assert est.per_node_prob["A"] == 1.0
        assert est.per_node_prob["B"] == pytest.approx(0.625, abs=1e-12)
        assert est.per_node_prob["C"] == pytest.approx(0.625, abs=1e-12)

    def test_single_edge_pinned(self):
        # existence 0.5 x prop 0.5 = live 0.25: E = 1.25.
        net = build_network(["A", "B"], [("A", "B", 0.5)], 0.5)
        est = exact_spread(net, ["A"])
        assert est.expected_influenced == pytest.approx(1.25, abs=1e-12)

    def test_path_two_hop(self):
        # Seed A on A-B-C, live prob q each edge: P(B) = q, P(C) = q^2.
        q = 0.5 * 0.8
        net = build_network(["A", "B", "C"],
                            [("A", "B", 0.5), ("B", "C", 0.5)], 0.8)
        est = exact_spread(net, ["A"])
        assert est.per_node_prob["B"] == pytest.approx(q, abs=1e-12)
        assert est.per_node_prob["C"] == pytest.approx(q * q, abs=1e-12)

    def test_empty_seed_set(self):
        net = path_net()
        est = exact_spread(net, [])
        assert est.expected_influenced == 0.0
        assert all(p == 0.0 for p in est.per_node_prob.values())

    def test_all_nodes_seeded(self):
        net = path_net()
        est = exact_spread(net, ["A", "B", "C"])
        assert est.expected_influenced == 3.0

    def test_isolated_node_untouched(self):
        net = build_network(["A", "B", "Z"], [("A", "B", 0.9)], 0.9)
        est = exact_spread(net, ["A"])
        assert est.per_node_prob["Z"] == 0.0

    def test_count_moments_triangle(self):
        net = build_network(
            ["A", "B", "C"],
            [("A", "B", 0.5), ("A", "C", 0.5), ("B", "C", 0.5)],
            1.0,
        )
        mean, var = ExactOracle(net).count_moments((0,))
        assert mean == pytest.approx(2.25, abs=1e-12)
        assert var == pytest.approx(0.6875, abs=1e-12)

    def test_streaming_path_matches_cached(self):
        # Force the > _CACHE_EDGE_LIMIT streaming branch on a tiny instance
        # by lowering nothing: compare a 17-edge network against MC instead.
        net = synth_network(0x73, 10, 17, lo=0.3, hi=0.9, propagation_prob=0.5)
        oracle = ExactOracle(net)
        assert oracle._labels_matrix is None
        probs = oracle.per_node_prob((0, 1))
        est = estimate_spread(net, ["n00", "n01"], 200, 200, 5)
        for lab, p in est.per_node_prob.items():
            assert abs(p - probs[net.index[lab]]) < 0.05

    def test_edge_limit_enforced(self):
        net = synth_network(0x74, 12, EXACT_EDGE_LIMIT + 1)
        with pytest.raises(OracleBoundError, match="enumeration bound"):
            ExactOracle(net)

    def test_custom_propagation_overrides_network(self):
        net = build_network(["A", "B"], [("A", "B", 1.0)], 0.2)
        est_net = exact_spread(net, ["A"])
        est_override = exact_spread(net, ["A"], propagation_prob=0.9)
        assert est_net.per_node_prob["B"] == pytest.approx(0.2)
        assert est_override.per_node_prob["B"] == pytest.approx(0.9)


class TestEstimateSpread:
    def test_matches_exact_on_single_edge(self):
        # E = 1.25 exactly, count variance 0.1875; sample-level 4 SE bound.
        net = build_network(["A", "B"], [("A", "B", 0.5)], 0.5)
        est = estimate_spread(net, ["A"], 2000, 50, master_seed=42)
        assert abs(est.expected_influenced - 1.25) < 4 * math.sqrt(0.1875 / 2000)

    def test_matches_exact_on_triangle(self):
        # Runs within a sample share that sample's resolved edges, so the
        # conservative SE treats each sample as one draw: 4*sqrt(0.6875/2000).
        net = build_network(
            ["A", "B", "C"],
            [("A", "B", 0.5), ("A", "C", 0.5), ("B", "C", 0.5)],
            1.0,
        )
        est = estimate_spread(net, ["A"], 2000, 50, master_seed=7)
        assert abs(est.expected_influenced - 2.25) < 4 * math.sqrt(0.6875 / 2000)

    def test_seed_nodes_probability_one(self):
        net = synth_network(0x75, 8, 12)
        est = estimate_spread(net, ["n02", "n05"], 50, 10, 0)
        assert est.per_node_prob["n02"] == 1.0
        assert est.per_node_prob["n05"] == 1.0

    def test_expected_equals_prob_sum(self):
        net = synth_network(0x76, 9, 14)
        est = estimate_spread(net, ["n00"], 64, 8, 3)
        assert est.expected_influenced == sum(est.per_node_prob.values())

    def test_deterministic_across_worker_counts(self):
        net = synth_network(0x77, 20, 40)
        a = estimate_spread(net, ["n01", "n10"], 96, 5, 11, workers=1)
        b = estimate_spread(net, ["n01", "n10"], 96, 5, 11, workers=4)
        assert a == b

    def test_unknown_seed_rejected(self):
        net = path_net()
        with pytest.raises(ValidationError):
            estimate_spread(net, ["nope"], 10, 10, 0)

    def test_count_validation(self):
        net = path_net()
        with pytest.raises(ValidationError):
            estimate_spread(net, ["A"], 0, 10, 0)
        with pytest.raises(ValidationError):
            estimate_spread(net, ["A"], 10, 0, 0)


class TestEnsembleCascades:
    def test_counts_cached_and_reused(self):
        net = synth_network(0x78, 10, 16)
        ens = EnsembleCascades(net, 20, 5, 0)
        c1 = ens.counts((0, 3))
        c2 = ens.counts((0, 3))
        assert c1 is c2

    def test_coverage_weights(self):
        net = path_net(prop=1.0)
        ens = EnsembleCascades(net, 10, 2, 0)
        w_all = np.ones(3)
        w_none = np.zeros(3)
        assert ens.coverage((0,), w_all) == pytest.approx(3.0)
        assert ens.coverage((0,), w_none) == 0.0

    def test_common_random_numbers_monotone(self):
        # Under shared cascade coins a superset seed set can never influence
        # fewer runs at any node.
        net = synth_network(0x79, 12, 24)
        ens = EnsembleCascades(net, 40, 10, 9)
        small = ens.counts((1,))
        big = ens.counts((1, 4, 7))
        assert (big >= small).all()
