"""Centrality baselines for the report: how the coverage-driven selection
compares against picking high-degree or high-betweenness youth.

These are diagnostics only; they carry no approximation guarantee and are
never used to drive a round.
"""

from __future__ import annotations

import networkx as nx

from .graphs import UncertainNetwork
from .selector import (BeliefState, SelectionParams, greedy_select,
                       spread_provider)


def _top_k(scores: dict[str, float], k: int, exclusions: set[str]) -> list[str]:
    eligible = [(lab, s) for lab, s in scores.items() if lab not in exclusions]
    eligible.sort(key=lambda t: (-t[1], t[0]))
    return [lab for lab, _ in eligible[:k]]


def degree_ranking(net: UncertainNetwork, k: int, exclusions=()) -> list[str]:
    """Top-k by expected degree: sum of incident edge existence probabilities."""
    scores = {lab: 0.0 for lab in net.labels}
    for e in net.edges:
        scores[e.u] += e.existence_prob
        scores[e.v] += e.existence_prob
    return _top_k(scores, k, set(exclusions))


def betweenness_ranking(net: UncertainNetwork, k: int, exclusions=()) -> list[str]:
    """Top-k by exact betweenness centrality on the unweighted edge set."""
    g = nx.Graph()
    g.add_nodes_from(net.labels)
    g.add_edges_from((e.u, e.v) for e in net.edges)
    scores = nx.betweenness_centrality(g, normalized=True)
    return _top_k(scores, k, set(exclusions))


def baseline_comparison(net: UncertainNetwork, k: int, belief: BeliefState,
                        exclusions=(), params: SelectionParams | None = None,
                        ) -> list[dict]:
    """One row per method: seed set and its coverage objective value, all
    evaluated under the same provider so the numbers are comparable."""
    params = params or SelectionParams()
    ranked = greedy_select(net, k, belief, exclusions, params)
    provider, method = spread_provider(net, params)
    weights = belief.weights_for(net)
    index = net.index

    def coverage(labels) -> float:
        idx = tuple(sorted(index[lab] for lab in labels))
        return provider.coverage(idx, weights)

    rows = [{"method": f"coverage greedy ({method})",
             "seeds": list(ranked.labels),
             "objective": ranked.objective_value}]
    for name, picker in (("degree", degree_ranking),
                         ("betweenness", betweenness_ranking)):
        seeds = picker(net, k, set(exclusions) | belief.trained)
        rows.append({"method": name, "seeds": seeds,
                     "objective": coverage(seeds)})
    return rows
