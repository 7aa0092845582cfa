"""Influence propagation: Monte Carlo spread estimation and an exact oracle.

The estimator averages independent-cascade outcomes over an ensemble of
sampled networks.  The oracle enumerates live-edge outcomes exactly on small
instances (a node is influenced iff it is reachable from a seed through live
edges, each edge live with existence * propagation probability); it exists to
verify the estimator and to drive selection on test-sized networks.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import OracleBoundError, ValidationError
from .graphs import SampledNetwork, UncertainNetwork
from .kernels import accumulate_counts, build_ensemble, cascade_once
from .rng import MASK64

# Above this edge count the oracle streams outcomes instead of caching the
# per-outcome component labels (2^m rows).
_CACHE_EDGE_LIMIT = 16

EXACT_EDGE_LIMIT = 20


@dataclass(frozen=True)
class SpreadEstimate:
    expected_influenced: float
    per_node_prob: dict[str, float]
    num_samples: int
    runs_per_sample: int
    master_seed: int | None

    @classmethod
    def from_probs(cls, labels, probs, num_samples, runs_per_sample, master_seed):
        per_node = {lab: float(p) for lab, p in zip(labels, probs)}
        return cls(
            expected_influenced=float(sum(per_node.values())),
            per_node_prob=per_node,
            num_samples=num_samples,
            runs_per_sample=runs_per_sample,
            master_seed=master_seed,
        )


def simulate_cascade(
    sampled: SampledNetwork,
    seeds,
    propagation_prob: float,
    run_seed: int,
) -> set[str]:
    """One independent-cascade run on a resolved network.

    Returns the influenced node set (seeds included).  Deterministic in
    run_seed: the live coin of an edge is keyed on (run_seed, canonical edge
    index).
    """
    index = {lab: i for i, lab in enumerate(sampled.labels)}
    missing = [s for s in seeds if s not in index]
    if missing:
        raise ValidationError(f"seed(s) not in network: {', '.join(sorted(missing))}")
    seed_idx = np.array(sorted(index[s] for s in set(seeds)), dtype=np.int32)
    active = cascade_once(
        sampled.indptr, sampled.nbr, sampled.slot_edge,
        seed_idx, propagation_prob, run_seed & MASK64,
    )
    return {sampled.labels[i] for i in np.nonzero(active)[0]}


@dataclass
class EnsembleCascades:
    """A fixed ensemble of resolved networks, reusable across seed sets.

    All evaluations against one instance share the sampled networks and the
    per-(sample, run) cascade seeds, so comparing seed sets compares them
    under common random numbers.
    """

    net: UncertainNetwork
    num_samples: int
    runs_per_sample: int
    master_seed: int
    propagation_prob: float | None = None
    workers: int = 1
    _blob: tuple | None = field(default=None, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.num_samples < 1 or self.runs_per_sample < 1:
            raise ValidationError("sample and run counts must be >= 1")
        self.master_seed &= MASK64
        if self.propagation_prob is None:
            self.propagation_prob = self.net.propagation_prob

    @property
    def total_runs(self) -> int:
        return self.num_samples * self.runs_per_sample

    def _ensemble(self):
        if self._blob is None:
            eu, ev, ep = self.net.edge_arrays
            self._blob = build_ensemble(
                self.net.num_nodes, eu, ev, ep, self.master_seed, self.num_samples)
        return self._blob

    def counts(self, seed_idx: tuple[int, ...]) -> np.ndarray:
        """Influence counts per node over all (sample, run) pairs."""
        cached = self._cache.get(seed_idx)
        if cached is not None:
            return cached
        indptrs, nbr, slot, base = self._ensemble()
        seeds = np.array(seed_idx, dtype=np.int32)
        n = self.net.num_nodes
        M = self.num_samples
        workers = max(1, self.workers)
        if workers == 1 or M < 2 * workers:
            counts = np.zeros(n, dtype=np.int64)
            accumulate_counts(indptrs, nbr, slot, base, seeds,
                              self.propagation_prob, self.master_seed,
                              self.runs_per_sample, 0, M, counts)
        else:
            bounds = [M * w // workers for w in range(workers + 1)]
            buffers = [np.zeros(n, dtype=np.int64) for _ in range(workers)]

            def work(w):
                accumulate_counts(indptrs, nbr, slot, base, seeds,
                                  self.propagation_prob, self.master_seed,
                                  self.runs_per_sample, bounds[w], bounds[w + 1],
                                  buffers[w])

            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(work, range(workers)))
            counts = np.zeros(n, dtype=np.int64)
            for buf in buffers:
                counts += buf
        self._cache[seed_idx] = counts
        return counts

    def per_node_prob(self, seed_idx: tuple[int, ...]) -> np.ndarray:
        return self.counts(seed_idx) / float(self.total_runs)

    def coverage(self, seed_idx: tuple[int, ...], weights: np.ndarray) -> float:
        """Sum over nodes of weight * influence probability."""
        counts = self.counts(seed_idx)
        return float(np.dot(weights, counts) / float(self.total_runs))


def estimate_spread(
    net: UncertainNetwork,
    seeds,
    num_samples: int,
    runs_per_sample: int,
    master_seed: int,
    propagation_prob: float | None = None,
    workers: int = 1,
) -> SpreadEstimate:
    """Average influence indicators over num_samples networks x
    runs_per_sample cascade runs each.

    Deterministic in master_seed regardless of worker count: sample i uses
    seed master_seed + i, run (i, r) a seed keyed by pair index i * R + r,
    and the integer count accumulation is order-free.
    """
    seed_idx = tuple(int(i) for i in net.node_indices(seeds))
    ens = EnsembleCascades(net, num_samples, runs_per_sample, master_seed,
                           propagation_prob, workers)
    probs = ens.per_node_prob(seed_idx)
    return SpreadEstimate.from_probs(net.labels, probs, num_samples,
                                     runs_per_sample, ens.master_seed)


class ExactOracle:
    """Exact spread by enumerating the live-edge distribution.

    Each edge is live independently with existence_prob * propagation_prob;
    outcome k (bit j set = edge j live) has probability prod over edges, and
    a node is influenced iff its component under the live edges contains a
    seed.  Bounded to EXACT_EDGE_LIMIT edges (2^m outcomes).
    """

    def __init__(self, net: UncertainNetwork, propagation_prob: float | None = None,
                 edge_limit: int = EXACT_EDGE_LIMIT):
        if net.num_edges > edge_limit:
            raise OracleBoundError(
                f"{net.num_edges} edges exceeds the enumeration bound of "
                f"{edge_limit}")
        self.net = net
        prop = net.propagation_prob if propagation_prob is None else propagation_prob
        eu, ev, ep = net.edge_arrays
        self._eu = eu
        self._ev = ev
        self._live_prob = ep * prop
        self._outcome_probs = self._all_outcome_probs()
        self._labels_matrix = (
            self._component_labels() if net.num_edges <= _CACHE_EDGE_LIMIT else None
        )

    def _all_outcome_probs(self) -> np.ndarray:
        probs = np.ones(1, dtype=np.float64)
        for q in self._live_prob:
            probs = np.concatenate([probs * (1.0 - q), probs * q])
        return probs

    def _components_for(self, outcome: int) -> np.ndarray:
        n = self.net.num_nodes
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for j in range(self.net.num_edges):
            if outcome >> j & 1:
                ra, rb = find(int(self._eu[j])), find(int(self._ev[j]))
                if ra != rb:
                    parent[rb] = ra
        return np.array([find(i) for i in range(n)], dtype=np.int32)

    def _component_labels(self) -> np.ndarray:
        m = self.net.num_edges
        out = np.empty((1 << m, self.net.num_nodes), dtype=np.int32)
        for outcome in range(1 << m):
            out[outcome] = self._components_for(outcome)
        return out

    def _reach_matrix(self, seed_idx: tuple[int, ...]) -> np.ndarray:
        labels = self._labels_matrix
        seeds = np.array(seed_idx, dtype=np.int32)
        if labels is not None:
            if len(seeds) == 0:
                return np.zeros(labels.shape, dtype=bool)
            seed_labels = labels[:, seeds]
            return (labels[:, :, None] == seed_labels[:, None, :]).any(axis=2)
        m = self.net.num_edges
        reach = np.empty((1 << m, self.net.num_nodes), dtype=bool)
        for outcome in range(1 << m):
            comp = self._components_for(outcome)
            reach[outcome] = np.isin(comp, comp[seeds]) if len(seeds) else False
        return reach

    def per_node_prob(self, seed_idx: tuple[int, ...]) -> np.ndarray:
        probs = self._outcome_probs @ self._reach_matrix(seed_idx)
        probs[list(seed_idx)] = 1.0  # exact by definition; avoids float dust
        return probs

    def coverage(self, seed_idx: tuple[int, ...], weights: np.ndarray) -> float:
        return float(np.dot(weights, self.per_node_prob(seed_idx)))

    def count_moments(self, seed_idx: tuple[int, ...]) -> tuple[float, float]:
        """Exact mean and variance of the influenced-node count."""
        counts = self._reach_matrix(seed_idx).sum(axis=1).astype(np.float64)
        mean = float(np.dot(self._outcome_probs, counts))
        second = float(np.dot(self._outcome_probs, counts * counts))
        return mean, second - mean * mean


def exact_spread(
    net: UncertainNetwork,
    seeds,
    propagation_prob: float | None = None,
) -> SpreadEstimate:
    """Exact expected influence and per-node probabilities (small instances)."""
    seed_idx = tuple(int(i) for i in net.node_indices(seeds))
    oracle = ExactOracle(net, propagation_prob)
    probs = oracle.per_node_prob(seed_idx)
    return SpreadEstimate.from_probs(net.labels, probs, 0, 0, None)
