"""Timing comparison of the compiled kernel extension against the numpy
reference implementations.

Runs each of the five hot kernels at several problem sizes, reports the
median per-call time for both backends and the speedup, and cross-checks
that the two backends agree numerically on every benchmarked input.

Usage:
    python3 benchmarks/bench_kernels.py [--repeats 7] [--csv out.csv]
"""

import argparse
import csv
import statistics
import sys
import time

import numpy as np

from chanzo import _kernels_np as np_backend

try:
    from chanzo import _fast as fast_backend
except ImportError:
    fast_backend = None


def _time(fn, args, repeats, min_batch_s=5e-3):
    """Median per-call seconds; each sample loops until min_batch_s elapses
    so sub-microsecond calls are measured above timer resolution."""
    fn(*args)  # warm up / JIT caches out of the measurement
    n = 1
    while True:
        t0 = time.perf_counter()
        for _ in range(n):
            fn(*args)
        dt = time.perf_counter() - t0
        if dt >= min_batch_s:
            break
        n *= 4
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(n):
            fn(*args)
        samples.append((time.perf_counter() - t0) / n)
    return statistics.median(samples)


def _cases(rng):
    """(kernel name, size label, args) for every benchmarked call."""
    for m in (64, 512, 4096):
        coeffs = (rng.standard_normal(m) + 1j * rng.standard_normal(m)) / np.sqrt(2)
        phases = rng.uniform(0.0, 2.0 * np.pi, m)
        yield "ris_response", f"M={m}", (coeffs, phases, 0.2 + 0.1j)
        mat = rng.uniform(0.0, 2.0 * np.pi, (256, m))
        yield "ris_response_batch", f"256xM={m}", (coeffs, mat, 0.2 + 0.1j)

    for k in (5, 50):
        gains = (rng.standard_normal(k) + 1j * rng.standard_normal(k)) / np.sqrt(2)
        dirs = rng.standard_normal((k, 2))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        pos = rng.uniform(0.0, 2.0, 2)
        yield "ma_response", f"K={k}", (gains, dirs, 1.0, pos)
        pts = rng.uniform(0.0, 2.0, (1024, 2))
        yield "ma_response_batch", f"1024xK={k}", (gains, dirs, 1.0, pts)

    for n, m in ((256, 64), (2048, 512)):
        powers = rng.uniform(0.0, 4.0, n)
        codes = rng.integers(0, 4, (n, m))
        yield "csm_tally", f"N={n},M={m}", (powers, codes, 4)


def _agree(a, b):
    if isinstance(a, tuple):
        return all(_agree(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, rtol=1e-12, atol=1e-12)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=7,
                    help="timing samples per case (default 7)")
    ap.add_argument("--csv", default=None, help="also write results as CSV")
    args = ap.parse_args(argv)

    if fast_backend is None:
        print("compiled extension not built; nothing to compare "
              "(pip install -e . rebuilds it)", file=sys.stderr)
        return 1

    rng = np.random.default_rng(0)
    rows = []
    print(f"{'kernel':<20} {'size':<14} {'numpy':>12} {'compiled':>12} {'speedup':>8}")
    for name, size, call_args in _cases(rng):
        f_np = getattr(np_backend, name)
        f_c = getattr(fast_backend, name)
        if not _agree(f_np(*call_args), f_c(*call_args)):
            print(f"{name} [{size}]: backends disagree!", file=sys.stderr)
            return 1
        t_np = _time(f_np, call_args, args.repeats)
        t_c = _time(f_c, call_args, args.repeats)
        rows.append((name, size, t_np, t_c, t_np / t_c))
        print(f"{name:<20} {size:<14} {t_np * 1e6:>10.2f}us {t_c * 1e6:>10.2f}us "
              f"{t_np / t_c:>7.2f}x")

    geo = float(np.exp(np.mean(np.log([r[4] for r in rows]))))
    print(f"\ngeometric-mean speedup: {geo:.2f}x over {len(rows)} cases "
          f"(all outputs cross-checked)")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["kernel", "size", "numpy_s", "compiled_s", "speedup"])
            w.writerows(rows)
        print(f"wrote {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
