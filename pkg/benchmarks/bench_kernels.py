"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat N]

Times the (break, lag) search grid at the default annual setting (6 lags,
9 breaks plus the no-break baseline, 49 periods), a larger quarterly grid,
and the Bartlett long-run variance used by the Phillips-Perron test.
"""
import argparse
import timeit

import numpy as np

from cumbreak import _pykernels

try:
    from cumbreak import _ckernels
except ImportError:
    _ckernels = None


def cases():
    rng = np.random.default_rng(0)
    annual = (0.02 + 0.01 * rng.standard_normal((6, 49)), rng.standard_normal(49), np.arange(20, 29))
    quarterly = (0.02 + 0.01 * rng.standard_normal((13, 196)), rng.standard_normal(196), np.arange(80, 113))
    resid = rng.standard_normal(200)
    return [
        ("cumfit_grid annual 6x10", "cumfit_grid", annual),
        ("cumfit_grid quarterly 13x34", "cumfit_grid", quarterly),
        ("bartlett_lrv T=200 q=4", "bartlett_lrv", (resid, 4)),
        ("bartlett_lrv T=200 q=50", "bartlett_lrv", (resid, 50)),
    ]


def best_of(fn, args, repeat):
    timer = timeit.Timer(lambda: fn(*args))
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':<30}{'python':>12}{'cython':>12}{'speedup':>10}")
    for label, name, call_args in cases():
        py = best_of(getattr(_pykernels, name), call_args, args.repeat)
        if _ckernels is None:
            print(f"{label:<30}{py * 1e6:>10.1f}us{'n/a':>12}{'':>10}")
            continue
        c = best_of(getattr(_ckernels, name), call_args, args.repeat)
        print(f"{label:<30}{py * 1e6:>10.1f}us{c * 1e6:>10.1f}us{py / c:>9.1f}x")


if __name__ == "__main__":
    main()
