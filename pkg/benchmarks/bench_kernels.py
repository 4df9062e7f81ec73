"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--seed 0]

Prints one ``key=value`` line per (kernel, backend) with the best wall time
of ``--repeat`` runs, then the speedup of the compiled backend when it is
available.
"""
import argparse
import timeit

import numpy as np

from cechapprox import kernels
from cechapprox.driver import RunConfig, run_collapse
from cechapprox.geometry import gen_circle_wedge


def workloads(rng):
    balls = [rng.normal(size=(int(n), d)) for n, d in zip(rng.integers(2, 40, 2000), rng.integers(2, 5, 2000))]
    simplex = rng.normal(size=(3, 3))
    cands = rng.normal(size=(5000, 3))
    cols = [sorted(set(rng.integers(0, 400, 3).tolist())) for _ in range(3000)]
    wedge = gen_circle_wedge([40, 40, 40], [1, 2, 3], 0.02, seed=int(rng.integers(1 << 31)))
    return {
        "miniball": lambda m: [m.miniball(b) for b in balls],
        "coface_radii": lambda m: m.coface_radii(simplex, cands, 2.0),
        "z2_rank": lambda m: m.z2_rank(cols, 400),
        "run_collapse": lambda m: run_collapse(wedge, RunConfig(0.5, 2.0, 2)),
    }


def use(module):
    for name in ("miniball", "miniball_radius", "coface_radii", "z2_rank"):
        setattr(kernels, name, getattr(module, name))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    backends = kernels.available_backends()
    jobs = workloads(np.random.default_rng(args.seed))
    best = {}
    for name, module in sorted(backends.items()):
        use(module)
        for job, fn in jobs.items():
            t = min(timeit.repeat(lambda: fn(module), number=1, repeat=args.repeat))
            best[job, name] = t
            print(f"kernel={job} backend={name} seconds={t:.4f}")
    if "cython" in backends:
        for job in jobs:
            print(f"kernel={job} speedup={best[job, 'python'] / best[job, 'cython']:.1f}x")
    else:
        print("compiled backend unavailable")


if __name__ == "__main__":
    main()
