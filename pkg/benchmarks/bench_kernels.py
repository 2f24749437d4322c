"""Compare the numba kernels with their pure-numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--rows 256] [--repeat 20]

Both implementations are called directly, so the result does not depend on
``PAPR_LAB_DISABLE_JIT``. Shapes match one batch of passband OFDM symbols.
"""
import argparse
import time

import numpy as np

from papr_lab import kernels
from papr_lab.clipping import build_variant
from papr_lab.ofdm import OfdmParams


def best_of(fn, repeat):
    fn()  # warm-up (triggers compilation for the jit path)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(rows, rng):
    p = OfdmParams()
    m = p.fft_size
    x = rng.standard_normal((rows, m)) + 1j * rng.standard_normal((rows, m))
    real = rng.standard_normal((rows, m + p.cp_samples))
    rev, tw = kernels.fft_tables(m)
    lpf = build_variant("none", p).final_lpf
    sos = build_variant("proposed", p).composed_kernel.sos
    return {
        "fft_rows": (x, rev, tw, False),
        "fir_rows": (real, lpf.taps, lpf.delay),
        "sos_rows": (real, sos),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':<10}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}{'max diff':>12}")
    for name, call_args in cases(args.rows, rng).items():
        jit, ref = kernels.IMPLEMENTATIONS[name]
        t_jit = best_of(lambda: jit(*call_args), args.repeat)
        t_ref = best_of(lambda: ref(*call_args), args.repeat)
        diff = np.max(np.abs(jit(*call_args) - ref(*call_args)))
        print(f"{name:<10}{1e3 * t_jit:>12.3f}{1e3 * t_ref:>12.3f}{t_ref / t_jit:>10.1f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
