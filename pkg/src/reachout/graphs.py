"""Uncertain network model and deterministic sampling.

An UncertainNetwork is the merged picture of who-knows-whom: undirected edges
annotated with an existence probability and the observation source that
produced them.  A SampledNetwork is one concrete resolution of that
uncertainty; sampling is a pure function of (network, seed).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from .errors import ValidationError
from .kernels import build_csr, edge_inclusion_mask
from .rng import MASK64


class Provenance(str, Enum):
    PLATFORM = "platform"
    FIELD = "field"
    BOTH = "both"

    def merge(self, other: "Provenance") -> "Provenance":
        if self is other:
            return self
        return Provenance.BOTH


@dataclass(frozen=True, order=True)
class UncertainEdge:
    u: str
    v: str
    existence_prob: float
    provenance: Provenance = Provenance.BOTH


def _as_edge(e) -> UncertainEdge:
    if isinstance(e, UncertainEdge):
        return e
    parts = tuple(e)
    if len(parts) == 3:
        u, v, p = parts
        return UncertainEdge(str(u), str(v), float(p))
    if len(parts) == 4:
        u, v, p, prov = parts
        return UncertainEdge(str(u), str(v), float(p), Provenance(prov))
    raise ValidationError(f"edge must be (u, v, prob[, provenance]), got {e!r}")


@dataclass(frozen=True)
class UncertainNetwork:
    labels: tuple[str, ...]
    edges: tuple[UncertainEdge, ...]
    propagation_prob: float

    @cached_property
    def index(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(u_idx int32, v_idx int32, existence float64) in canonical order."""
        idx = self.index
        eu = np.fromiter((idx[e.u] for e in self.edges), dtype=np.int32,
                         count=len(self.edges))
        ev = np.fromiter((idx[e.v] for e in self.edges), dtype=np.int32,
                         count=len(self.edges))
        ep = np.fromiter((e.existence_prob for e in self.edges),
                         dtype=np.float64, count=len(self.edges))
        return eu, ev, ep

    @property
    def num_nodes(self) -> int:
        return len(self.labels)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def node_indices(self, names) -> np.ndarray:
        """Sorted dense indices for a collection of node labels."""
        idx = self.index
        missing = [n for n in names if n not in idx]
        if missing:
            raise ValidationError(f"unknown node label(s): {', '.join(sorted(missing))}")
        return np.array(sorted(idx[n] for n in set(names)), dtype=np.int32)


@dataclass(frozen=True)
class SampledNetwork:
    """One concrete resolution of an uncertain network."""

    labels: tuple[str, ...]
    sample_seed: int
    resolved_edges: np.ndarray  # canonical indices into the source edge list
    indptr: np.ndarray
    nbr: np.ndarray
    slot_edge: np.ndarray  # canonical edge index per adjacency slot

    @property
    def num_edges(self) -> int:
        return len(self.resolved_edges)

    def neighbors(self, label: str, labels_index: dict[str, int] | None = None) -> list[str]:
        idx = labels_index or {n: i for i, n in enumerate(self.labels)}
        i = idx[label]
        return [self.labels[j] for j in self.nbr[self.indptr[i]:self.indptr[i + 1]]]


def _canonical_pair(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u < v else (v, u)


def build_network(labels, edges, propagation_prob: float) -> UncertainNetwork:
    """Canonicalize and validate a network.

    Endpoints are ordered u < v, edges sorted and deduplicated.  Duplicates
    merge: provenance union (differing sources become BOTH) and the larger
    existence probability, so merged evidence never weakens an edge.
    """
    labels = list(labels)
    if not labels:
        raise ValidationError("node list is empty")
    seen: set[str] = set()
    for label in labels:
        if label in seen:
            raise ValidationError(f"duplicate node id: {label}")
        seen.add(label)
    if not 0.0 < propagation_prob <= 1.0:
        raise ValidationError(
            f"propagation probability {propagation_prob} outside (0, 1]")

    merged: dict[tuple[str, str], UncertainEdge] = {}
    for e in map(_as_edge, edges):
        if e.u == e.v:
            raise ValidationError(f"self-loop on node {e.u}")
        if e.u not in seen or e.v not in seen:
            bad = e.u if e.u not in seen else e.v
            raise ValidationError(f"edge endpoint {bad} is not a listed node")
        if not 0.0 < e.existence_prob <= 1.0:
            raise ValidationError(
                f"edge ({e.u},{e.v}) existence probability {e.existence_prob} "
                f"outside (0, 1]")
        key = _canonical_pair(e.u, e.v)
        prev = merged.get(key)
        if prev is None:
            merged[key] = UncertainEdge(key[0], key[1], e.existence_prob, e.provenance)
        else:
            merged[key] = UncertainEdge(
                key[0], key[1],
                max(prev.existence_prob, e.existence_prob),
                prev.provenance.merge(e.provenance),
            )
    canonical = tuple(merged[k] for k in sorted(merged))
    return UncertainNetwork(tuple(labels), canonical, propagation_prob)


def sample_network(net: UncertainNetwork, sample_seed: int) -> SampledNetwork:
    """Resolve each edge independently with its existence probability.

    Edge draws are keyed on (sample_seed, canonical edge index), so the
    result is reproducible bit-for-bit and independent of evaluation order.
    """
    sample_seed &= MASK64
    eu, ev, ep = net.edge_arrays
    mask = edge_inclusion_mask(sample_seed, ep)
    indptr, nbr, slot = build_csr(net.num_nodes, eu, ev, np.asarray(mask))
    return SampledNetwork(
        labels=net.labels,
        sample_seed=sample_seed,
        resolved_edges=np.nonzero(mask)[0].astype(np.int32),
        indptr=indptr,
        nbr=nbr,
        slot_edge=slot,
    )


def sample_ensemble(net: UncertainNetwork, count: int, master_seed: int) -> list[SampledNetwork]:
    """count samples with per-sample seeds master_seed + index."""
    if count < 1:
        raise ValidationError("ensemble size must be >= 1")
    return [sample_network(net, (master_seed + i) & MASK64) for i in range(count)]
