"""Time the numba and numpy kernels on the calibration workload.

    python benchmarks/bench_kernels.py [--n 5] [--patterns 1024] [--repeat 5]

Reports best-of-``repeat`` wall time per kernel and checks both backends agree.
"""

import argparse
import time

import numpy as np

from pcm_threshold import kernels
from pcm_threshold.pcm import PerturbationConfig, build_perfect_pcm, perturb_batch
from pcm_threshold.search import all_patterns
from pcm_threshold.trees import _prufer_bfs_tables, _prufer_bfs_tables_jit, tree_tables


def best_time(fn, repeat):
    fn()  # warm-up, includes JIT compilation for numba
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--patterns", type=int, default=1024)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    w = np.geomspace(1, 9, args.n)
    cfg = PerturbationConfig(0.3)
    pats = all_patterns(cfg.pattern_length(args.n), cfg.mode.alphabet)[: args.patterns]
    mats = perturb_batch(build_perfect_pcm(w).entries, cfg, pats)
    child, parent = tree_tables(args.n)
    print(f"n={args.n}  trees={child.shape[0]}  matrices={mats.shape[0]}")

    spectra = kernels.tree_weights_numpy(mats, child, parent)
    assert np.allclose(spectra, kernels.tree_weights_numba(mats, child, parent), rtol=1e-14, atol=0)
    assert np.allclose(kernels.abs_spread_numpy(spectra), kernels.abs_spread_numba(spectra), rtol=1e-12)

    cases = [
        ("tree_weights (batch)", lambda: kernels.tree_weights_numpy(mats, child, parent),
         lambda: kernels.tree_weights_numba(mats, child, parent)),
        ("tree_weights (single)", lambda: kernels.tree_weights_numpy(mats[:1], child, parent),
         lambda: kernels.tree_weights_numba(mats[:1], child, parent)),
        ("abs_spread (batch)", lambda: kernels.abs_spread_numpy(spectra),
         lambda: kernels.abs_spread_numba(spectra)),
        ("prufer tables", lambda: _prufer_bfs_tables(args.n), lambda: _prufer_bfs_tables_jit(args.n)),
    ]
    print(f"{'kernel':<24}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, f_np, f_nb in cases:
        t_np = best_time(f_np, args.repeat)
        t_nb = best_time(f_nb, args.repeat)
        print(f"{name:<24}{1e3 * t_np:12.3f}{1e3 * t_nb:12.3f}{t_np / t_nb:10.1f}x")


if __name__ == "__main__":
    main()
