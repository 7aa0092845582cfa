from __future__ import annotations

from pathlib import Path

import pytest

from reachout.graphs import UncertainNetwork, build_network
from reachout.ingest import read_network_file
from reachout.rng import rand_u64, rand_unit

FIXTURES = Path(__file__).parent / "fixtures"


def synth_network(key: int, num_nodes: int, num_edges: int,
                  lo: float = 0.1, hi: float = 0.9,
                  propagation_prob: float | None = None) -> UncertainNetwork:
    """Deterministic random connected-ish test network.

    Uses the package's own counter-based generator so instances are
    identical on every platform and run.
    """
    labels = [f"n{i:02d}" for i in range(num_nodes)]
    max_edges = num_nodes * (num_nodes - 1) // 2
    if num_edges > max_edges:
        raise ValueError(f"{num_edges} edges impossible on {num_nodes} nodes")
    pairs: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    counter = 0
    while len(pairs) < num_edges:
        a = rand_u64(key, counter) % num_nodes
        b = rand_u64(key, counter + 1) % num_nodes
        counter += 2
        if a == b:
            continue
        pair = (min(a, b), max(a, b))
        if pair in seen:
            continue
        seen.add(pair)
        pairs.append(pair)
    edges = []
    for i, (a, b) in enumerate(sorted(pairs)):
        p = lo + (hi - lo) * rand_unit(key ^ 0xE0E0E0E0, i)
        edges.append((labels[a], labels[b], p))
    if propagation_prob is None:
        propagation_prob = 0.2 + 0.7 * rand_unit(key ^ 0x9999, 0)
    return build_network(labels, edges, propagation_prob)


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def golden_net() -> UncertainNetwork:
    return read_network_file(FIXTURES / "golden_network.txt")


@pytest.fixture(scope="session")
def seven_node_net() -> UncertainNetwork:
    return read_network_file(FIXTURES / "seven_node.txt")


@pytest.fixture(scope="session")
def two_cluster_net() -> UncertainNetwork:
    return read_network_file(FIXTURES / "two_cluster.txt")


@pytest.fixture
def triangle() -> UncertainNetwork:
    return build_network(["A", "B", "C"],
                         [("A", "B", 1.0), ("A", "C", 1.0), ("B", "C", 1.0)],
                         propagation_prob=0.5)
