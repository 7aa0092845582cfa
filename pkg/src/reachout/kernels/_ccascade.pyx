# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Mirrors kernels/pure.py operation for operation; outputs must be
bit-identical.  The splitmix64 constants below are duplicated from
reachout.rng on purpose (this module cannot call back into Python from its
nogil sections); tests assert the parity.
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int32_t, int64_t, uint8_t, uint64_t

cnp.import_array()

BACKEND_NAME = "cython"

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15
cdef uint64_t MIX_A = 0xBF58476D1CE4E5B9
cdef uint64_t MIX_B = 0x94D049BB133111EB
cdef uint64_t CASCADE_STREAM = 0xD1FF5109CA5CADE1
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix(uint64_t key, uint64_t counter) nogil:
    cdef uint64_t z = key + (counter + 1) * GAMMA
    z = (z ^ (z >> 30)) * MIX_A
    z = (z ^ (z >> 27)) * MIX_B
    return z ^ (z >> 31)


cdef inline double _unit(uint64_t key, uint64_t counter) nogil:
    return <double>(_mix(key, counter) >> 11) * INV_2_53


def edge_inclusion_mask(seed, probs):
    cdef uint64_t key = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef double[::1] p = np.ascontiguousarray(probs, dtype=np.float64)
    cdef Py_ssize_t m = p.shape[0]
    out = np.empty(m, dtype=bool)
    cdef uint8_t[::1] o = out.view(np.uint8)
    cdef Py_ssize_t j
    with nogil:
        for j in range(m):
            o[j] = _unit(key, <uint64_t>j) < p[j]
    return out


def build_csr(n, eu, ev, mask):
    cdef Py_ssize_t nn = n
    cdef int32_t[::1] u = np.ascontiguousarray(eu, dtype=np.int32)
    cdef int32_t[::1] v = np.ascontiguousarray(ev, dtype=np.int32)
    cdef uint8_t[::1] mk = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t m = u.shape[0]

    indptr_arr = np.zeros(nn + 1, dtype=np.int64)
    cdef int64_t[::1] indptr = indptr_arr
    cdef Py_ssize_t j
    cdef int64_t total = 0
    for j in range(m):
        if mk[j]:
            indptr[u[j] + 1] += 1
            indptr[v[j] + 1] += 1
            total += 2
    for j in range(nn):
        indptr[j + 1] += indptr[j]

    nbr_arr = np.empty(total, dtype=np.int32)
    slot_arr = np.empty(total, dtype=np.int32)
    cursor_arr = indptr_arr[:nn].copy()
    cdef int32_t[::1] nbr = nbr_arr
    cdef int32_t[::1] slot = slot_arr
    cdef int64_t[::1] cursor = cursor_arr
    for j in range(m):
        if mk[j]:
            nbr[cursor[u[j]]] = v[j]
            slot[cursor[u[j]]] = <int32_t>j
            cursor[u[j]] += 1
            nbr[cursor[v[j]]] = u[j]
            slot[cursor[v[j]]] = <int32_t>j
            cursor[v[j]] += 1
    return indptr_arr, nbr_arr, slot_arr


def build_ensemble(n, eu, ev, probs, master_seed, num_samples):
    cdef Py_ssize_t nn = n
    cdef Py_ssize_t M = num_samples
    cdef uint64_t master = <uint64_t>(int(master_seed) & 0xFFFFFFFFFFFFFFFF)
    cdef int32_t[::1] u = np.ascontiguousarray(eu, dtype=np.int32)
    cdef int32_t[::1] v = np.ascontiguousarray(ev, dtype=np.int32)
    cdef double[::1] p = np.ascontiguousarray(probs, dtype=np.float64)
    cdef Py_ssize_t m = u.shape[0]

    indptrs_arr = np.empty((M, nn + 1), dtype=np.int64)
    base_arr = np.zeros(M + 1, dtype=np.int64)
    cdef int64_t[:, ::1] indptrs = indptrs_arr
    cdef int64_t[::1] base = base_arr

    # Pass 1: inclusion masks and degree counts.
    mask_arr = np.empty((M, m if m else 1), dtype=np.uint8)
    cdef uint8_t[:, ::1] masks = mask_arr
    cdef Py_ssize_t i, j
    cdef uint64_t key
    cdef int64_t total
    with nogil:
        for i in range(M):
            key = master + <uint64_t>i
            total = 0
            for j in range(nn + 1):
                indptrs[i, j] = 0
            for j in range(m):
                if _unit(key, <uint64_t>j) < p[j]:
                    masks[i, j] = 1
                    indptrs[i, u[j] + 1] += 1
                    indptrs[i, v[j] + 1] += 1
                    total += 2
                else:
                    masks[i, j] = 0
            for j in range(nn):
                indptrs[i, j + 1] += indptrs[i, j]
            base[i + 1] = total
    np.cumsum(base_arr, out=base_arr)

    nbr_arr = np.empty(int(base_arr[M]), dtype=np.int32)
    slot_arr = np.empty(int(base_arr[M]), dtype=np.int32)
    cursor_arr = np.empty(nn, dtype=np.int64)
    cdef int32_t[::1] nbr = nbr_arr
    cdef int32_t[::1] slot = slot_arr
    cdef int64_t[::1] cursor = cursor_arr
    cdef int64_t off
    with nogil:
        for i in range(M):
            off = base[i]
            for j in range(nn):
                cursor[j] = off + indptrs[i, j]
            for j in range(m):
                if masks[i, j]:
                    nbr[cursor[u[j]]] = v[j]
                    slot[cursor[u[j]]] = <int32_t>j
                    cursor[u[j]] += 1
                    nbr[cursor[v[j]]] = u[j]
                    slot[cursor[v[j]]] = <int32_t>j
                    cursor[v[j]] += 1
    return indptrs_arr, nbr_arr, slot_arr, base_arr


cdef void _cascade(
    const int64_t* indptr,
    const int32_t* nbr,
    const int32_t* slot,
    int64_t adj_off,
    const int32_t* seeds,
    Py_ssize_t n_seeds,
    Py_ssize_t n,
    double prop,
    uint64_t key,
    uint8_t* active,
    int32_t* queue,
) nogil:
    cdef Py_ssize_t head = 0, tail = 0, pos
    cdef int32_t u_node, v_node
    cdef Py_ssize_t k
    for k in range(n):
        active[k] = 0
    for k in range(n_seeds):
        active[seeds[k]] = 1
        queue[tail] = seeds[k]
        tail += 1
    while head < tail:
        u_node = queue[head]
        head += 1
        for pos in range(indptr[u_node], indptr[u_node + 1]):
            v_node = nbr[adj_off + pos]
            if not active[v_node]:
                if _unit(key, <uint64_t>slot[adj_off + pos]) < prop:
                    active[v_node] = 1
                    queue[tail] = v_node
                    tail += 1


def cascade_once(indptr, nbr, slot_edge, seeds, prop, seed):
    cdef int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef int32_t[::1] nb = np.ascontiguousarray(nbr, dtype=np.int32)
    cdef int32_t[::1] sl = np.ascontiguousarray(slot_edge, dtype=np.int32)
    cdef int32_t[::1] sd = np.ascontiguousarray(seeds, dtype=np.int32)
    cdef Py_ssize_t n = ip.shape[0] - 1
    cdef uint64_t key = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef double pp = prop
    out = np.zeros(n, dtype=np.uint8)
    cdef uint8_t[::1] active = out
    queue_arr = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] queue = queue_arr
    cdef const int32_t* nb_p = &nb[0] if nb.shape[0] else NULL
    cdef const int32_t* sl_p = &sl[0] if sl.shape[0] else NULL
    cdef const int32_t* sd_p = &sd[0] if sd.shape[0] else NULL
    with nogil:
        _cascade(&ip[0], nb_p, sl_p, 0, sd_p, sd.shape[0], n, pp, key,
                 &active[0], &queue[0])
    return out


def accumulate_counts(
    indptrs,
    nbr,
    slot_edge,
    base,
    seeds,
    prop,
    master_seed,
    runs_per_sample,
    sample_lo,
    sample_hi,
    counts,
):
    cdef int64_t[:, ::1] ips = np.ascontiguousarray(indptrs, dtype=np.int64)
    cdef int32_t[::1] nb = np.ascontiguousarray(nbr, dtype=np.int32)
    cdef int32_t[::1] sl = np.ascontiguousarray(slot_edge, dtype=np.int32)
    cdef int64_t[::1] bs = np.ascontiguousarray(base, dtype=np.int64)
    cdef int32_t[::1] sd = np.ascontiguousarray(seeds, dtype=np.int32)
    cdef int64_t[::1] out = counts
    cdef Py_ssize_t n = ips.shape[1] - 1
    cdef Py_ssize_t lo = sample_lo, hi = sample_hi, R = runs_per_sample
    cdef uint64_t master = <uint64_t>(int(master_seed) & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t stream = master ^ CASCADE_STREAM
    cdef double pp = prop
    active_arr = np.empty(n, dtype=np.uint8)
    queue_arr = np.empty(n, dtype=np.int32)
    cdef uint8_t[::1] active = active_arr
    cdef int32_t[::1] queue = queue_arr
    cdef Py_ssize_t i, r, k
    cdef uint64_t key
    cdef const int32_t* nb_p = &nb[0] if nb.shape[0] else NULL
    cdef const int32_t* sl_p = &sl[0] if sl.shape[0] else NULL
    cdef const int32_t* sd_p = &sd[0] if sd.shape[0] else NULL
    with nogil:
        for i in range(lo, hi):
            for r in range(R):
                key = _mix(stream, <uint64_t>(i * R + r))
                _cascade(&ips[i, 0], nb_p, sl_p, bs[i], sd_p, sd.shape[0],
                         n, pp, key, &active[0], &queue[0])
                for k in range(n):
                    out[k] += active[k]
