"""Time generator assembly and moment kernels, numba against numpy.

Usage: python benchmarks/bench_assembly.py [--n-max 64 256 1024] [--repeat 20]
"""
import argparse
import time

import numpy as np

from lambda_osc import _kernels
from lambda_osc.config import load_preset
from lambda_osc.generator import case1_terms, case2_terms, realify
from lambda_osc.params import derive_dressed
from lambda_osc.rates import base_rates, case1_rates, case2_rates


def best_of(fn, repeat):
    fn()  # warm-up, includes numba compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, nargs="+", default=[64, 256, 1024, 4096])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed")
    p = load_preset("fig5").params.replace(omega23=20.0)
    d = derive_dressed(p)
    b = base_rates(d, p.gamma2, p.gamma3, p.gamma)
    tables = {1: realify(case1_terms(p, d, case1_rates(b, d, p.gamma2, p.gamma3, p.gamma)), 1),
              2: realify(case2_terms(p, d, case2_rates(b, d, p.gamma2, p.gamma3, p.gamma)), 2)}
    print(f"{'kernel':<10}{'case':>5}{'n_max':>7}{'numpy ms':>11}{'numba ms':>11}{'speedup':>9}")
    for case, terms in tables.items():
        for n_max in args.n_max:
            nf = n_max + 1
            t_np = best_of(lambda: _kernels.fill_triplets_numpy(*terms, nf), args.repeat)
            t_nb = best_of(lambda: _kernels.fill_triplets_numba(*terms, nf), args.repeat)
            print(f"{'triplets':<10}{case:>5}{n_max:>7}{1e3 * t_np:>11.3f}{1e3 * t_nb:>11.3f}{t_np / t_nb:>9.2f}")
    rng = np.random.default_rng(0)
    for n_max in args.n_max:
        p0 = rng.random(n_max + 1)
        t_np = best_of(lambda: _kernels.moments_numpy(p0), args.repeat)
        t_nb = best_of(lambda: _kernels.moments_numba(p0), args.repeat)
        print(f"{'moments':<10}{'-':>5}{n_max:>7}{1e3 * t_np:>11.3f}{1e3 * t_nb:>11.3f}{t_np / t_nb:>9.2f}")


if __name__ == "__main__":
    main()
