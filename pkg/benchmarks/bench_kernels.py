"""Time the numba and numpy kernel backends on loop-sized inputs.

    python benchmarks/bench_kernels.py [--repeat 5]

Both backends are called directly, so the environment flag is irrelevant
here. The first numba call (compilation) is excluded.
"""

import argparse
import timeit

import numpy as np

from hamdelay import kernels
from hamdelay.loop_space import derivative_stencil


def cases(N, rng):
    n = 2
    d = np.array(derivative_stencil(N))
    V = rng.standard_normal((N, 2 * n))
    W = rng.standard_normal((N, N))
    G = rng.standard_normal((N, N, 2 * n))
    A = rng.standard_normal((n, n))
    A = A - A.T
    b = rng.standard_normal(n)
    x = rng.random((N, n))
    return {
        "circulant_apply": (kernels.circulant_apply_numpy, kernels.circulant_apply_numba, (d, V)),
        "lagged_weighted_sum": (kernels.lagged_weighted_sum_numpy, kernels.lagged_weighted_sum_numba, (W, G, 1)),
        "skew_diagonal_mean": (kernels.skew_diagonal_mean_numpy, kernels.skew_diagonal_mean_numba, (W, -1)),
        "lv_rhs_loop": (kernels.lv_rhs_loop_numpy, kernels.lv_rhs_loop_numba, (A, b, x, N // 4)),
    }


def best_time(fn, args, repeat):
    number = max(1, int(0.05 / max(timeit.timeit(lambda: fn(*args), number=1), 1e-7)))
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--sizes", type=int, nargs="+", default=[32, 64, 128, 256])
    args = parser.parse_args(argv)
    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}{'N':>6}{'numpy [us]':>14}{'numba [us]':>14}{'speedup':>10}  agree")
    for N in args.sizes:
        for name, (np_fn, nb_fn, fn_args) in cases(N, rng).items():
            a, b = np_fn(*fn_args), nb_fn(*fn_args)  # also compiles
            agree = "exact" if np.array_equal(a, b) else f"{np.max(np.abs(a - b)):.1e}"
            t_np = best_time(np_fn, fn_args, args.repeat)
            t_nb = best_time(nb_fn, fn_args, args.repeat)
            print(f"{name:<22}{N:>6}{t_np * 1e6:>14.1f}{t_nb * 1e6:>14.1f}{t_np / t_nb:>10.1f}  {agree}")


if __name__ == "__main__":
    main()
