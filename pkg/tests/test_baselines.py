"""Centrality baselines used in the report."""

from reachout.baselines import (
    baseline_comparison,
    betweenness_ranking,
    degree_ranking,
)
from reachout.graphs import build_network
from reachout.selector import SelectionParams, update_belief, zero_belief


def star():
    labels = ["hub"] + [f"leaf{i}" for i in range(4)]
    return build_network(labels, [("hub", f"leaf{i}", 0.5) for i in range(4)], 0.5)


def test_degree_prefers_hub():
    assert degree_ranking(star(), 1) == ["hub"]


def test_degree_uses_existence_weights():
    # b has two weak ties, a one strong tie: expected degree 1.0 vs 0.4.
    net = build_network(
        ["a", "b", "c", "d"],
        [("a", "b", 0.2), ("b", "c", 0.2), ("a", "d", 1.0)],
        0.5,
    )
    assert degree_ranking(net, 2) == ["a", "d"]


def test_degree_tie_breaks_lexicographically():
    net = build_network(["x", "y"], [("x", "y", 0.5)], 0.5)
    assert degree_ranking(net, 1) == ["x"]


def test_betweenness_prefers_bridge():
    # two triangles joined through m
    net = build_network(
        ["a1", "a2", "m", "b1", "b2"],
        [("a1", "a2", 0.9), ("a1", "m", 0.9), ("a2", "m", 0.9),
         ("b1", "b2", 0.9), ("b1", "m", 0.9), ("b2", "m", 0.9)],
        0.5,
    )
    assert betweenness_ranking(net, 1) == ["m"]


def test_exclusions_respected():
    assert degree_ranking(star(), 1, exclusions={"hub"}) == ["leaf0"]
    net = star()
    assert "hub" not in betweenness_ranking(net, 2, exclusions={"hub"})


def test_comparison_greedy_dominates():
    net = star()
    params = SelectionParams(method="exact")
    rows = baseline_comparison(net, 2, zero_belief(), (), params)
    assert [r["method"] for r in rows] == \
        ["coverage greedy (exact)", "degree", "betweenness"]
    greedy_obj = rows[0]["objective"]
    for row in rows[1:]:
        assert row["objective"] <= greedy_obj + 1e-12
        assert len(row["seeds"]) == 2


def test_comparison_honors_belief_trained():
    net = star()
    params = SelectionParams(method="exact")
    belief = update_belief(zero_belief(), ["hub"], net, params)
    rows = baseline_comparison(net, 2, belief, (), params)
    for row in rows:
        assert "hub" not in row["seeds"]
