"""Time the compiled Jacobi kernel against the numpy fallback (and numpy.linalg.eigh for scale).

    python3 benchmarks/bench_jacobi.py [--sizes 4 8 16 32 64] [--repeat 5]
"""
import argparse
import time

import numpy as np

from selftesting import _jacobi_py
from selftesting.config import DEFAULT

try:
    from selftesting import _jacobi_ext
except ImportError:
    _jacobi_ext = None


def best_time(fn, a, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(a)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16, 32, 64])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)

    tol, sweeps = DEFAULT.jacobi_tol, DEFAULT.jacobi_max_sweeps
    kernels = {"python": lambda a: _jacobi_py.jacobi_eigh(a, tol, sweeps)}
    if _jacobi_ext is not None:
        kernels["compiled"] = lambda a: _jacobi_ext.jacobi_eigh(a, tol, sweeps)
    kernels["numpy.eigh"] = np.linalg.eigh

    print(f"{'n':>4} " + " ".join(f"{k:>14}" for k in kernels) + f" {'speedup':>9}")
    for n in args.sizes:
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        a = (g + g.conj().T) / 2
        times = {k: best_time(f, a, args.repeat) for k, f in kernels.items()}
        speed = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        print(f"{n:>4} " + " ".join(f"{times[k] * 1e3:>12.3f}ms" for k in kernels) + f" {speed:>8.1f}x")
    if _jacobi_ext is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation` with Cython available")


if __name__ == "__main__":
    main()
