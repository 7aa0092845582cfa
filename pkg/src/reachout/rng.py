"""Counter-based deterministic random primitives.

Every random decision in the engine is a pure function of a 64-bit key and a
64-bit counter, so results never depend on call order, thread count, or
process scheduling.  The generator is the splitmix64 finalizer applied to
``key + (counter + 1) * GAMMA``; the compiled kernel backend hardcodes the
same constants (see tests/test_backends.py for the parity check).
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

GAMMA = 0x9E3779B97F4A7C15
MIX_A = 0xBF58476D1CE4E5B9
MIX_B = 0x94D049BB133111EB

# Stream labels keep unrelated draws (edge sampling, cascade coins, behavior
# models, per-round selection) from ever sharing a (key, counter) pair.
CASCADE_STREAM = 0xD1FF5109CA5CADE1
ROUND_STREAM = 0x5E1EC7005EED0001
BEHAVIOR_STREAM = 0xBEA40FBEA40F0001

_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def rand_u64(key: int, counter: int) -> int:
    """Pseudorandom 64-bit integer for the (key, counter) pair."""
    z = (key + (counter + 1) * GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * MIX_B) & MASK64
    return z ^ (z >> 31)


def rand_unit(key: int, counter: int) -> float:
    """Uniform double in [0, 1) for the (key, counter) pair."""
    return (rand_u64(key, counter) >> 11) * _INV_2_53


def rand_unit_array(key: int, count: int) -> np.ndarray:
    """Vectorized rand_unit for counters 0..count-1, bit-identical to the
    scalar path."""
    idx = np.arange(1, count + 1, dtype=np.uint64)
    z = np.uint64(key & MASK64) + idx * np.uint64(GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX_A)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX_B)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53


def sample_seed(master_seed: int, sample_index: int) -> int:
    """Seed for the i-th sampled network of an ensemble: master + index."""
    return (master_seed + sample_index) & MASK64


def run_seed(master_seed: int, pair_index: int) -> int:
    """Seed for one cascade run, keyed by its (sample, run) pair index."""
    return rand_u64((master_seed ^ CASCADE_STREAM) & MASK64, pair_index)


def derive_seed(master_seed: int, stream: int, index: int) -> int:
    """Independent sub-seed for a named stream (rounds, behavior models)."""
    return rand_u64((master_seed ^ stream) & MASK64, index)
