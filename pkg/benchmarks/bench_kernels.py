"""Time the compiled kernels against their pure-Python mirrors.

    python benchmarks/bench_kernels.py --nodes 20000 --edges 200000

Both implementations receive identical inputs and their outputs are checked
for equality before any timing is reported.
"""

import argparse
import sys
import timeit

import numpy as np

from sugraph import _kernels_py
from sugraph.universe import _build_csr

try:
    from sugraph import _kernels as compiled
except ImportError:
    compiled = None


def synthetic_graph(n, m, seed):
    """Skewed random digraph: a few targets attract most dependency edges."""
    rng = np.random.default_rng(seed)
    src = rng.integers(0, n, size=m, dtype=np.int64)
    dst = np.minimum(rng.zipf(1.6, size=m) - 1, n - 1).astype(np.int64)
    keep = src != dst
    pairs = np.unique(np.stack([src[keep], dst[keep]], axis=1), axis=0)
    return pairs[:, 0].copy(), pairs[:, 1].copy()


def chain_edges(n, seed):
    """Update-like edges: short linear runs of consecutive indices."""
    rng = np.random.default_rng(seed + 1)
    cut = rng.random(n - 1) < 0.2
    src = np.flatnonzero(~cut).astype(np.int64)
    return src, src + 1


def cases(n, m, members, seed):
    src, dst = synthetic_graph(n, m, seed)
    csr = _build_csr(n, src, dst)
    usrc, udst = chain_edges(n, seed)
    popular = np.argsort(-np.diff(csr.rev_indptr), kind="stable")[:members]
    member_pos = np.full(n, -1, dtype=np.int64)
    member_pos[popular] = np.arange(len(popular))
    rows = np.arange(n, dtype=np.int64)
    anchor = int(popular[0])
    return {
        "component_labels": lambda impl: impl.component_labels(n, usrc, udst),
        "cooccurrence": lambda impl: impl.cooccurrence(
            csr.fwd_indptr, csr.fwd_indices, csr.rev_indptr, csr.rev_indices, anchor
        ),
        "pair_matrix": lambda impl: impl.pair_matrix(csr.fwd_indptr, csr.fwd_indices, rows, member_pos, len(popular)),
    }


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nodes", type=int, default=20000)
    parser.add_argument("--edges", type=int, default=200000)
    parser.add_argument("--members", type=int, default=64, help="columns of the pair matrix")
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if compiled is None:
        print("compiled extension not built; reinstall without SUGRAPH_NO_EXT", file=sys.stderr)
        return 1

    print(f"{'kernel':<18}{'python (s)':>12}{'cython (s)':>12}{'speedup':>10}")
    for name, run in cases(args.nodes, args.edges, args.members, args.seed).items():
        slow, fast = run(_kernels_py), run(compiled)
        if not np.array_equal(slow, fast):
            print(f"{name}: outputs differ", file=sys.stderr)
            return 2
        t_py = best_of(lambda: run(_kernels_py), args.repeat)
        t_cy = best_of(lambda: run(compiled), args.repeat)
        print(f"{name:<18}{t_py:>12.4f}{t_cy:>12.5f}{t_py / t_cy:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
