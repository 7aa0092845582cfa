"""Pure-Python kernel backend.

Reference implementation of the hot kernels: edge resolution, adjacency
construction, and independent-cascade runs.  The compiled backend
(_ccascade.pyx) implements exactly the same arithmetic; both must produce
bit-identical outputs for any input.

Cascade semantics: influence spreads over the resolved edges of one sampled
network, where each resolved edge is live with the propagation probability.
The live coin for an edge is keyed on (run_seed, canonical edge index), so a
run is a pure function of its seed no matter how the traversal is scheduled.
Influenced = reachable from the seed set over live edges, which is the same
distribution as per-contact Bernoulli attempts.
"""

from __future__ import annotations

import numpy as np

from ..rng import GAMMA, MASK64, MIX_A, MIX_B, rand_unit_array, run_seed

BACKEND_NAME = "pure"


def edge_inclusion_mask(seed: int, probs: np.ndarray) -> np.ndarray:
    """Resolve each uncertain edge: included iff its counter draw < prob.

    Draw j is keyed on (seed, canonical edge index j).
    """
    draws = rand_unit_array(seed, len(probs))
    return draws < probs


def build_csr(n: int, eu: np.ndarray, ev: np.ndarray, mask: np.ndarray):
    """Adjacency of the resolved edges in CSR form.

    Returns (indptr int64[n+1], nbr int32[2k], slot_edge int32[2k]) where
    slot_edge maps each adjacency slot back to the canonical edge index.
    Rows come out sorted by neighbor because edges are filled in canonical
    (u < v, lexicographic) order.
    """
    inc = np.nonzero(mask)[0].astype(np.int32)
    iu = eu[inc]
    iv = ev[inc]
    k = len(inc)
    src = np.empty(2 * k, dtype=np.int32)
    tgt = np.empty(2 * k, dtype=np.int32)
    slot = np.empty(2 * k, dtype=np.int32)
    src[0::2] = iu
    src[1::2] = iv
    tgt[0::2] = iv
    tgt[1::2] = iu
    slot[0::2] = inc
    slot[1::2] = inc
    order = np.argsort(src, kind="stable")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, tgt[order], slot[order]


def build_ensemble(
    n: int,
    eu: np.ndarray,
    ev: np.ndarray,
    probs: np.ndarray,
    master_seed: int,
    num_samples: int,
):
    """Resolve num_samples networks; sample i uses seed master_seed + i.

    Returns (indptrs int64[M, n+1], nbr int32[...], slot_edge int32[...],
    base int64[M+1]) with per-sample adjacency at nbr[base[i]:base[i+1]].
    """
    indptrs = np.empty((num_samples, n + 1), dtype=np.int64)
    nbrs = []
    slots = []
    base = np.zeros(num_samples + 1, dtype=np.int64)
    for i in range(num_samples):
        mask = edge_inclusion_mask((master_seed + i) & MASK64, probs)
        indptr, nbr, slot = build_csr(n, eu, ev, mask)
        indptrs[i] = indptr
        nbrs.append(nbr)
        slots.append(slot)
        base[i + 1] = base[i] + len(nbr)
    return (
        indptrs,
        np.concatenate(nbrs) if nbrs else np.empty(0, dtype=np.int32),
        np.concatenate(slots) if slots else np.empty(0, dtype=np.int32),
        base,
    )


def _live(key: int, edge_index: int, prop: float) -> bool:
    z = (key + (edge_index + 1) * GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * MIX_B) & MASK64
    z ^= z >> 31
    return (z >> 11) * (1.0 / 9007199254740992.0) < prop


def cascade_once(
    indptr,
    nbr,
    slot_edge,
    seeds: np.ndarray,
    prop: float,
    seed: int,
) -> np.ndarray:
    """One cascade run on a resolved network; returns uint8 influenced mask."""
    n = len(indptr) - 1
    active = np.zeros(n, dtype=np.uint8)
    indptr_l = indptr.tolist()
    nbr_l = nbr.tolist()
    slot_l = slot_edge.tolist()
    queue = [int(s) for s in seeds]
    for s in queue:
        active[s] = 1
    head = 0
    while head < len(queue):
        u = queue[head]
        head += 1
        for pos in range(indptr_l[u], indptr_l[u + 1]):
            v = nbr_l[pos]
            if not active[v] and _live(seed, slot_l[pos], prop):
                active[v] = 1
                queue.append(v)
    return active


def accumulate_counts(
    indptrs,
    nbr,
    slot_edge,
    base,
    seeds: np.ndarray,
    prop: float,
    master_seed: int,
    runs_per_sample: int,
    sample_lo: int,
    sample_hi: int,
    counts: np.ndarray,
) -> None:
    """Add influence indicators for samples [sample_lo, sample_hi) into counts.

    Run seeds are keyed by pair index sample * R + run, so partitioning the
    sample range across workers cannot change any draw.
    """
    n = indptrs.shape[1] - 1
    seeds_l = [int(s) for s in seeds]
    for i in range(sample_lo, sample_hi):
        indptr_l = indptrs[i].tolist()
        lo = int(base[i])
        nbr_l = nbr[lo : int(base[i + 1])].tolist()
        slot_l = slot_edge[lo : int(base[i + 1])].tolist()
        for r in range(runs_per_sample):
            key = run_seed(master_seed, i * runs_per_sample + r)
            active = bytearray(n)
            queue = list(seeds_l)
            for s in queue:
                active[s] = 1
            head = 0
            while head < len(queue):
                u = queue[head]
                head += 1
                for pos in range(indptr_l[u], indptr_l[u + 1]):
                    v = nbr_l[pos]
                    if not active[v]:
                        z = (key + (slot_l[pos] + 1) * GAMMA) & MASK64
                        z = ((z ^ (z >> 30)) * MIX_A) & MASK64
                        z = ((z ^ (z >> 27)) * MIX_B) & MASK64
                        z ^= z >> 31
                        if (z >> 11) * (1.0 / 9007199254740992.0) < prop:
                            active[v] = 1
                            queue.append(v)
            counts += np.frombuffer(active, dtype=np.uint8)
