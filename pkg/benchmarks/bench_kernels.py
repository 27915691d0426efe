"""Time the exact convolution kernel: numba loops vs the numpy slice fallback.

Also times the pseudo-spectral path for reference.  The first numba call
(compilation, or loading the on-disk cache) is excluded from the timings.

    python3 benchmarks/bench_kernels.py --sizes 4 6 8 --repeat 3
"""

import argparse
import time

import numpy as np

from gevrey_nse import _accel
from gevrey_nse.kernels import convolve
from gevrey_nse.nonlinear import advect_fast
from gevrey_nse.spectral import make_grid, random_band


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[4, 6, 8])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    if not _accel.use_numba():
        print("numba disabled (GEVREY_NSE_NUMBA=0); timing the numpy fallback only")
    print(f"{'N':>3} {'numba [s]':>11} {'numpy [s]':>11} {'speedup':>8} {'fft [s]':>9} {'max diff':>9}")
    for N in args.sizes:
        u = random_band(make_grid(N), 1, N, seed=N).coeff
        ref = convolve(u, u, N, backend="numpy")
        t_np = best_of(lambda: convolve(u, u, N, backend="numpy"), args.repeat)
        t_fft = best_of(lambda: advect_fast(u, None, N), args.repeat)
        if _accel.use_numba():
            out = convolve(u, u, N, backend="numba")  # warm-up / compile
            t_nb = best_of(lambda: convolve(u, u, N, backend="numba"), args.repeat)
            diff = float(np.max(np.abs(out - ref)))
            print(f"{N:>3} {t_nb:>11.4f} {t_np:>11.4f} {t_np / t_nb:>7.1f}x {t_fft:>9.4f} {diff:>9.1e}")
        else:
            print(f"{N:>3} {'-':>11} {t_np:>11.4f} {'-':>8} {t_fft:>9.4f} {'-':>9}")


if __name__ == "__main__":
    main()
