"""Seed selection against a belief state.

The objective is expected newly-influenced coverage: each node is weighted by
the probability it has NOT already been influenced in earlier rounds, so the
greedy picks drift away from regions saturated by previously trained peers.
Evaluations reuse one fixed cascade ensemble (common random numbers), which
keeps the empirical objective monotone submodular and makes lazy greedy
provably identical to naive greedy.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field, replace
from itertools import combinations
from math import comb

import numpy as np

from .cascade import EXACT_EDGE_LIMIT, EnsembleCascades, ExactOracle
from .errors import ValidationError
from .graphs import UncertainNetwork

EXHAUSTIVE_SUBSET_LIMIT = 200_000


@dataclass(frozen=True)
class SelectionParams:
    """Knobs shared by every objective evaluation in one selection pass."""

    method: str = "auto"  # auto -> exact when the instance fits, else sampled
    num_samples: int = 1000
    runs_per_sample: int = 20
    master_seed: int = 0
    propagation_prob: float | None = None
    exact_edge_limit: int = EXACT_EDGE_LIMIT
    workers: int = 1
    lazy: bool = True

    def __post_init__(self):
        if self.method not in ("auto", "exact", "sampled"):
            raise ValidationError(f"unknown selection method {self.method!r}")
        if self.num_samples < 1 or self.runs_per_sample < 1:
            raise ValidationError("sample and run counts must be >= 1")

    def resolve_method(self, net: UncertainNetwork) -> str:
        if self.method == "auto":
            return "exact" if net.num_edges <= self.exact_edge_limit else "sampled"
        return self.method


def spread_provider(net: UncertainNetwork, params: SelectionParams):
    """(provider, resolved_method): provider exposes coverage() and
    per_node_prob() over dense node indices."""
    method = params.resolve_method(net)
    if method == "exact":
        return ExactOracle(net, params.propagation_prob,
                           params.exact_edge_limit), method
    return EnsembleCascades(net, params.num_samples, params.runs_per_sample,
                            params.master_seed, params.propagation_prob,
                            params.workers), method


@dataclass(frozen=True)
class BeliefState:
    """Per-node probability of already having been influenced, carried
    between rounds.  Trained peers sit at exactly 1."""

    per_node_prob: dict[str, float] = field(default_factory=dict)
    round_index: int = 0
    trained: frozenset[str] = frozenset()

    def probability(self, node: str) -> float:
        return self.per_node_prob.get(node, 0.0)

    def weights_for(self, net: UncertainNetwork) -> np.ndarray:
        """1 - belief per node, in dense index order: the coverage weight of
        reaching each node anew."""
        return np.array([1.0 - self.probability(lab) for lab in net.labels],
                        dtype=np.float64)


def zero_belief() -> BeliefState:
    return BeliefState()


@dataclass(frozen=True)
class RankedCandidates:
    """Greedy pick order with marginal gains (non-increasing)."""

    entries: tuple[tuple[str, float], ...]
    objective_value: float
    method: str
    params: SelectionParams
    evaluations: int

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.entries)

    @property
    def gains(self) -> tuple[float, ...]:
        return tuple(g for _, g in self.entries)


def coverage_objective(net: UncertainNetwork, seeds, belief: BeliefState,
                       params: SelectionParams) -> float:
    """Sum over nodes of (1 - belief) * P(influenced by seeds)."""
    seed_set = set(seeds)
    overlap = seed_set & belief.trained
    if overlap:
        raise ValidationError(
            f"seed(s) already trained: {', '.join(sorted(overlap))}")
    if not seed_set:
        return 0.0
    idx = tuple(int(i) for i in net.node_indices(seed_set))
    provider, _ = spread_provider(net, params)
    return provider.coverage(idx, belief.weights_for(net))


def _eligible(net: UncertainNetwork, belief: BeliefState, exclusions) -> list[str]:
    excl = set(exclusions) | belief.trained
    unknown = excl - set(net.labels)
    if unknown:
        raise ValidationError(
            f"exclusion(s) not in network: {', '.join(sorted(unknown))}")
    return [lab for lab in net.labels if lab not in excl]


def greedy_select(net: UncertainNetwork, k: int, belief: BeliefState,
                  exclusions=(), params: SelectionParams | None = None,
                  ) -> RankedCandidates:
    """Greedy coverage maximization, lazy (CELF) by default.

    Stale heap gains are valid upper bounds because the empirical objective
    is submodular for any fixed ensemble, so the lazy and naive variants pick
    identical nodes with identical gains; ties break on the smaller label.
    """
    params = params or SelectionParams()
    if k < 1:
        raise ValidationError("k must be >= 1")
    pool = _eligible(net, belief, exclusions)
    if len(pool) < k:
        raise ValidationError(
            f"not enough eligible nodes: have {len(pool)}, need {k}")
    provider, method = spread_provider(net, params)
    weights = belief.weights_for(net)
    index = net.index
    evaluations = 0

    def value(seed_idx: tuple[int, ...]) -> float:
        nonlocal evaluations
        evaluations += 1
        return provider.coverage(seed_idx, weights)

    chosen: list[tuple[str, float]] = []
    chosen_idx: tuple[int, ...] = ()
    current = 0.0

    if params.lazy:
        heap = []
        for lab in pool:
            gain = value((index[lab],))
            heapq.heappush(heap, (-gain, lab, 0))
        while len(chosen) < k:
            neg_gain, lab, at = heapq.heappop(heap)
            if at == len(chosen):
                chosen.append((lab, -neg_gain))
                chosen_idx = tuple(sorted(chosen_idx + (index[lab],)))
                current += -neg_gain
            else:
                gain = value(tuple(sorted(chosen_idx + (index[lab],)))) - current
                heapq.heappush(heap, (-gain, lab, len(chosen)))
    else:
        remaining = list(pool)
        while len(chosen) < k:
            best = None
            for lab in remaining:
                gain = value(tuple(sorted(chosen_idx + (index[lab],)))) - current
                cand = (-gain, lab)
                if best is None or cand < best:
                    best = cand
            neg_gain, lab = best
            chosen.append((lab, -neg_gain))
            chosen_idx = tuple(sorted(chosen_idx + (index[lab],)))
            current += -neg_gain
            remaining.remove(lab)

    return RankedCandidates(tuple(chosen), current, method, params, evaluations)


def exhaustive_select(net: UncertainNetwork, k: int, belief: BeliefState,
                      exclusions=(), params: SelectionParams | None = None,
                      ) -> tuple[frozenset[str], float]:
    """True argmax of the coverage objective by subset enumeration.

    Ties resolve to the lexicographically smallest label tuple.  Bounded, for
    tests only.
    """
    params = params or SelectionParams()
    if k < 1:
        raise ValidationError("k must be >= 1")
    pool = _eligible(net, belief, exclusions)
    if len(pool) < k:
        raise ValidationError(
            f"not enough eligible nodes: have {len(pool)}, need {k}")
    if comb(len(pool), k) > EXHAUSTIVE_SUBSET_LIMIT:
        raise ValidationError(
            f"C({len(pool)}, {k}) subsets exceed the exhaustive bound of "
            f"{EXHAUSTIVE_SUBSET_LIMIT}")
    provider, _ = spread_provider(net, params)
    weights = belief.weights_for(net)
    index = net.index
    best_set, best_value = None, -1.0
    for combo in combinations(pool, k):  # pool is label-sorted: ties keep first
        idx = tuple(sorted(index[lab] for lab in combo))
        val = provider.coverage(idx, weights)
        if val > best_value:
            best_set, best_value = frozenset(combo), val
    return best_set, best_value


def update_belief(belief: BeliefState, trained, net: UncertainNetwork,
                  params: SelectionParams | None = None) -> BeliefState:
    """Fold one round's trained set into the belief.

    new = 1 - (1 - old) * (1 - P(influenced by trained)), independence across
    rounds; trained nodes pin to exactly 1.  Empty trained set only advances
    the round counter.
    """
    params = params or SelectionParams()
    trained_set = set(trained)
    if not trained_set:
        return replace(belief, round_index=belief.round_index + 1)
    idx = tuple(int(i) for i in net.node_indices(trained_set))
    already = [t for t in sorted(trained_set) if belief.probability(t) >= 1.0]
    if already:
        raise ValidationError(
            f"node(s) already at belief 1: {', '.join(already)}")
    provider, _ = spread_provider(net, params)
    reach = provider.per_node_prob(idx)
    probs = dict(belief.per_node_prob)
    for i, lab in enumerate(net.labels):
        old = probs.get(lab, 0.0)
        probs[lab] = 1.0 - (1.0 - old) * (1.0 - float(reach[i]))
    for lab in trained_set:
        probs[lab] = 1.0
    return BeliefState(probs, belief.round_index + 1,
                       belief.trained | trained_set)
