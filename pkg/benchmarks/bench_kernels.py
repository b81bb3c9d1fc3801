"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each workload runs through the public API after switching backends, so the
numbers include the Python driver loop that both backends share. Outputs of
the two backends are compared: walks must agree bitwise, deconvolution only to
roundoff (the fallback sums with BLAS dot products, in a different order).
"""
import argparse
import time

import numpy as np

from hyperwalk import _kernels
from hyperwalk.analytics import occupation_series
from hyperwalk.generators import cover_instance, load_instance
from hyperwalk.hypergraph import build_transition
from hyperwalk.montecarlo import cover_time, highest_hyperdegree_node, simulate_hitting_time
from hyperwalk.spectral import ResetWalkSpec


def workloads(quick):
    scale = 10 if quick else 1
    lolli = load_instance("lollipop")
    cover = cover_instance()
    r = highest_hyperdegree_node(cover)
    series = occupation_series(build_transition(lolli), 9, 2**14 // scale)
    p_ij, p_jj = series[:, 0].copy(), series[:, 9].copy()
    return {
        "hit_walk  lollipop c0->p4": lambda: simulate_hitting_time(
            lolli, None, 0, 9, 4000 // scale, master_seed=1
        ).values,
        "cover_walk cover171 g=5e-4": lambda: cover_time(
            cover, ResetWalkSpec(r, 5e-4), 40 // scale, master_seed=1
        ).values,
        "deconvolve lollipop t=2^14": lambda: _kernels.deconvolve(p_ij, p_jj, False),
    }


def best_of(fn, repeat):
    out, best = None, float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="shrink every workload tenfold")
    args = ap.parse_args()

    names = list(_kernels.backends())
    if "cython" not in names:
        print("compiled kernels are not built; only the Python backend is available")
    print(f"{'workload':30s} " + " ".join(f"{n:>10s}" for n in names) + "   speedup  max|diff|")
    previous = _kernels.BACKEND
    try:
        for label, fn in workloads(args.quick).items():
            times, outs = [], []
            for name in names:
                _kernels.use_backend(name)
                t, out = best_of(fn, args.repeat)
                times.append(t)
                outs.append(np.asarray(out))
            speedup = times[0] / times[-1] if len(times) > 1 else 1.0
            diff = max((float(np.abs(outs[0] - o).max()) for o in outs[1:]), default=0.0)
            cells = " ".join(f"{t:9.3f}s" for t in times)
            print(f"{label:30s} {cells}   {speedup:6.1f}x  {diff:.1e}")
    finally:
        _kernels.use_backend(previous)


if __name__ == "__main__":
    main()
