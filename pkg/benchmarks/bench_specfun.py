"""Time the compiled and pure-numpy Bessel backends (scipy.special as reference).

    python3 benchmarks/bench_specfun.py [--sizes 1000 100000] [--repeat 5]
"""

import argparse
import timeit

import numpy as np
import scipy.special as sp

from elastic_inclusion import _specfun_py

try:
    from elastic_inclusion import _specfun_ext
except ImportError:
    _specfun_ext = None


def scipy_bessel01(x):
    return sp.j0(x), sp.j1(x), sp.y0(x), sp.y1(x)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1000, 100_000])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = [("python", _specfun_py.bessel01), ("scipy", scipy_bessel01)]
    if _specfun_ext is not None:
        backends.insert(0, ("cython", _specfun_ext.bessel01))
    else:
        print("compiled backend not built; timing the fallback only")

    rng = np.random.default_rng(0)
    print(f"{'size':>8} {'backend':>8} {'best [ms]':>10} {'max rel err':>12}")
    for size in args.sizes:
        # arguments span the series, recurrence and asymptotic regimes
        x = rng.uniform(1e-3, 80.0, size)
        ref = scipy_bessel01(x)
        for name, fn in backends:
            t = min(timeit.repeat(lambda: fn(x), number=1, repeat=args.repeat))
            err = max(float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))
                      for a, b in zip(fn(x), ref))
            print(f"{size:>8} {name:>8} {1e3 * t:>10.3f} {err:>12.2e}")


if __name__ == "__main__":
    main()
