"""Compare the compiled cascade kernels against the pure-Python fallback.

Times the two hot paths (ensemble construction, cascade count accumulation)
on each available backend and checks that the counts agree bit for bit.
Run from the repository root:

    python3 benchmarks/bench_backends.py
    python3 benchmarks/bench_backends.py --nodes 200 --edges 600 --samples 400
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from conftest import synth_network  # noqa: E402

from reachout.kernels import available_backends, get_backend  # noqa: E402


def bench(backend_name: str, net, seeds, samples: int, runs: int,
          master_seed: int):
    k = get_backend(backend_name)
    eu, ev, probs = net.edge_arrays
    n = net.num_nodes

    t0 = time.perf_counter()
    indptrs, nbr, slot, base = k.build_ensemble(n, eu, ev, probs,
                                                master_seed, samples)
    t_build = time.perf_counter() - t0

    counts = np.zeros(n, dtype=np.int64)
    t0 = time.perf_counter()
    k.accumulate_counts(indptrs, nbr, slot, base, seeds, net.propagation_prob,
                        master_seed, runs, 0, samples, counts)
    t_run = time.perf_counter() - t0
    return t_build, t_run, counts


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=62)
    ap.add_argument("--edges", type=int, default=126)
    ap.add_argument("--samples", type=int, default=400)
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0xBE7C)
    args = ap.parse_args(argv)

    net = synth_network(args.seed, args.nodes, args.edges, lo=0.3, hi=0.9,
                        propagation_prob=0.5)
    seeds = np.array(sorted(net.index[lab] for lab in net.labels[:4]),
                     dtype=np.int32)
    cascades = args.samples * args.runs
    print(f"network: {net.num_nodes} nodes, {net.num_edges} edges; "
          f"{args.samples} samples x {args.runs} runs = {cascades} cascades")

    results = {}
    for name in available_backends():
        t_build, t_run, counts = bench(name, net, seeds, args.samples,
                                       args.runs, args.seed)
        results[name] = (t_build, t_run, counts)
        rate = cascades / t_run
        print(f"{name:>7}: build {t_build * 1e3:8.1f} ms   "
              f"cascades {t_run * 1e3:8.1f} ms   ({rate:,.0f} runs/s)")

    if len(results) == 2:
        pure_b, pure_r, pure_c = results["pure"]
        cy_b, cy_r, cy_c = results["cython"]
        if not np.array_equal(pure_c, cy_c):
            print("BACKEND MISMATCH: counts differ", file=sys.stderr)
            return 1
        print(f"counts identical; speedup: build {pure_b / cy_b:.1f}x, "
              f"cascades {pure_r / cy_r:.1f}x")
    else:
        print("single backend available; no comparison")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
