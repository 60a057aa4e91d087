"""Benchmark the compiled kernels against the pure-numpy fallback.

Runs each kernel on identical inputs, checks the outputs agree, and prints
a timing table. Usage:

    python benchmarks/bench_kernels.py [--paths 200000] [--steps 100] [--repeat 5]
"""

import argparse
import time

import numpy as np

from filtra._kernels import have_native, pure

if have_native():
    from filtra._kernels import _native as native
else:
    native = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--paths", type=int, default=200_000)
    parser.add_argument("--steps", type=int, default=100)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    ups = (rng.random((args.paths, args.steps)) < 0.5).astype(np.uint8)
    positions = (rng.random((args.paths, args.steps)) < 0.5).astype(np.uint8)
    increments = rng.uniform(-1.0, 1.0, size=(args.paths, args.steps))
    values = rng.uniform(300.0, 360.0, size=args.paths)
    lows = np.array([310.0, 330.0, 350.0])
    lows_closed = np.array([1, 0, 1], dtype=np.uint8)
    highs = np.array([315.0, 340.0, 355.0])
    highs_closed = np.array([0, 1, 1], dtype=np.uint8)

    cases = [
        ("path_rewards", lambda impl: impl.path_rewards(
            ups, positions, 10.0, 5.0, 0.999)),
        ("walk_cone_violations", lambda impl: impl.walk_cone_violations(
            increments, 332.0, 1.0, 1.0)),
        ("walk_prices_at", lambda impl: impl.walk_prices_at(
            increments, 332.0, args.steps)),
        ("count_in_pieces", lambda impl: impl.count_in_pieces(
            values, lows, lows_closed, highs, highs_closed)),
    ]

    print(f"paths={args.paths} steps={args.steps} repeat={args.repeat} "
          f"(best-of timings)")
    header = f"{'kernel':<22}{'pure':>12}{'native':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, call in cases:
        pure_time, pure_out = best_of(lambda: call(pure), args.repeat)
        if native is None:
            print(f"{name:<22}{pure_time * 1e3:>10.2f}ms{'n/a':>12}{'':>10}")
            continue
        native_time, native_out = best_of(lambda: call(native), args.repeat)
        if isinstance(pure_out, np.ndarray):
            assert np.array_equal(pure_out, native_out), name
        else:
            assert pure_out == native_out, name
        print(f"{name:<22}{pure_time * 1e3:>10.2f}ms"
              f"{native_time * 1e3:>10.2f}ms"
              f"{pure_time / native_time:>9.1f}x")
    if native is None:
        print("\ncompiled kernels not built; showing fallback timings only")


if __name__ == "__main__":
    main()
