"""Cross-backend parity: the compiled kernels and the pure-Python kernels
must produce bit-identical arrays for every operation."""

import subprocess
import sys

import numpy as np
import pytest

from reachout.kernels import BACKEND, available_backends, get_backend
from tests.conftest import synth_network

pure = get_backend("pure")

if "cython" in available_backends():
    cy = get_backend("cython")
else:  # pragma: no cover - build environments without the extension
    cy = None

needs_cython = pytest.mark.skipif(cy is None, reason="compiled backend not built")


def _arrays(key=0xABC0, n=30, m=60):
    net = synth_network(key, n, m)
    eu, ev, probs = net.edge_arrays
    return net, eu, ev, probs


def test_backend_name_reported():
    assert BACKEND in ("pure", "cython")
    assert "pure" in available_backends()


@needs_cython
def test_inclusion_mask_parity():
    _, _, _, probs = _arrays()
    for seed in (0, 1, 12345, 2**63):
        assert np.array_equal(
            pure.edge_inclusion_mask(seed, probs),
            cy.edge_inclusion_mask(seed, probs),
        )


@needs_cython
def test_build_csr_parity():
    net, eu, ev, probs = _arrays()
    mask = pure.edge_inclusion_mask(99, probs)
    p_ind, p_nbr, p_slot = pure.build_csr(net.num_nodes, eu, ev, mask)
    c_ind, c_nbr, c_slot = cy.build_csr(net.num_nodes, eu, ev, mask)
    assert np.array_equal(p_ind, c_ind)
    assert np.array_equal(p_nbr, c_nbr)
    assert np.array_equal(p_slot, c_slot)


@needs_cython
def test_build_ensemble_parity():
    net, eu, ev, probs = _arrays(key=0xABC1)
    for blobs in (pure.build_ensemble(net.num_nodes, eu, ev, probs, 7, 25),):
        c_blobs = cy.build_ensemble(net.num_nodes, eu, ev, probs, 7, 25)
        for a, b in zip(blobs, c_blobs):
            assert np.array_equal(a, b)


@needs_cython
def test_cascade_once_parity():
    net, eu, ev, probs = _arrays(key=0xABC2)
    mask = pure.edge_inclusion_mask(3, probs)
    indptr, nbr, slot = pure.build_csr(net.num_nodes, eu, ev, mask)
    seeds = np.array([0, 5, 11], dtype=np.int32)
    for run in range(50):
        a = pure.cascade_once(indptr, nbr, slot, seeds, 0.4, run)
        b = cy.cascade_once(indptr, nbr, slot, seeds, 0.4, run)
        assert np.array_equal(a, b)


@needs_cython
def test_accumulate_counts_parity_and_chunking():
    net, eu, ev, probs = _arrays(key=0xABC3)
    blob = pure.build_ensemble(net.num_nodes, eu, ev, probs, 11, 40)
    seeds = np.array([2, 9], dtype=np.int32)
    ref = np.zeros(net.num_nodes, dtype=np.int64)
    pure.accumulate_counts(*blob, seeds, 0.35, 11, 8, 0, 40, ref)

    got = np.zeros(net.num_nodes, dtype=np.int64)
    cy.accumulate_counts(*blob, seeds, 0.35, 11, 8, 0, 40, got)
    assert np.array_equal(ref, got)

    # chunk boundaries must not matter
    chunked = np.zeros(net.num_nodes, dtype=np.int64)
    for lo, hi in ((0, 13), (13, 14), (14, 40)):
        cy.accumulate_counts(*blob, seeds, 0.35, 11, 8, lo, hi, chunked)
    assert np.array_equal(ref, chunked)


def test_env_override_forces_pure():
    code = (
        "import os; os.environ['REACHOUT_BACKEND'] = 'pure'; "
        "import reachout.kernels as k; print(k.BACKEND)"
    )
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "pure"


def test_get_backend_rejects_unknown():
    with pytest.raises(ValueError):
        get_backend("jit")


def test_empty_ensemble_shapes():
    net, eu, ev, probs = _arrays(n=5, m=4)
    indptrs, nbr, slot, base = pure.build_ensemble(
        net.num_nodes, eu, ev, probs, 0, 0
    )
    assert indptrs.shape == (0, net.num_nodes + 1)
    assert nbr.size == 0 and slot.size == 0
    assert base.tolist() == [0]
