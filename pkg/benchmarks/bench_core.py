"""Side-by-side timings of the hot-loop backends.

Runs the compiled extension and the numpy/pure-Python fallback on identical
inputs, checks the agreement contract (identical enumeration and membership
decisions, series values within a few ulp), and prints a timing table.

Usage:  python3 benchmarks/bench_core.py [--quick]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from poincare_kernels import _core_py

try:
    from poincare_kernels import _core
except ImportError:  # pragma: no cover - exercised only on fallback installs
    _core = None


def _best_of(fn, args, repeats: int) -> tuple[float, object]:
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def _row(name: str, py_s: float, cy_s: float) -> str:
    speedup = py_s / cy_s if cy_s > 0 else float("inf")
    return f"{name:28s} {py_s * 1e3:10.2f} ms {cy_s * 1e3:10.2f} ms {speedup:8.1f}x"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller inputs, fewer repeats")
    args = parser.parse_args()

    if _core is None:
        print("compiled extension is not available; nothing to compare")
        return 1

    repeats = 3 if args.quick else 5
    radius = 400.0 if args.quick else 2000.0
    n_series = 2000 if args.quick else 8000

    z = (0.3, 1.7)
    w = (0.0, 2.4)
    budget = 50_000_000

    print(f"{'function':28s} {'python':>13s} {'cython':>13s} {'speedup':>9s}")

    ball_args = (z[0], z[1], w[0], w[1], radius, budget)
    t_py, mats_py = _best_of(_core_py.ball_sweep, ball_args, repeats)
    t_cy, mats_cy = _best_of(_core.ball_sweep, ball_args, repeats)
    assert np.array_equal(mats_py, mats_cy), "enumeration mismatch"
    print(_row(f"ball_sweep (R={radius:g})", t_py, t_cy))

    pair_args = (mats_py, z[0], z[1], w[0], w[1])
    t_py, pairs_py = _best_of(_core_py.pair_arrays, pair_args, repeats)
    t_cy, pairs_cy = _best_of(_core.pair_arrays, pair_args, repeats)
    for field_py, field_cy in zip(pairs_py, pairs_cy):
        assert np.array_equal(field_py, field_cy), "pair-data mismatch"
    print(_row(f"pair_arrays (n={len(mats_py)})", t_py, t_cy))

    rng = np.random.default_rng(5)
    worst = 0.0
    for n in (200, n_series):
        xs = np.ascontiguousarray(1.0 / (1.0 + 10.0 ** rng.uniform(-2.0, 2.0, size=n)))
        hyp_args = (2.5 + 0.3j, 1.9 - 0.3j, 4.4, xs)
        t_py, h_py = _best_of(_core_py.hyp2f1_series_batch, hyp_args, repeats)
        t_cy, h_cy = _best_of(_core.hyp2f1_series_batch, hyp_args, repeats)
        worst = max(worst, float(np.max(np.abs(h_py - h_cy) / np.abs(h_py))))
        assert worst < 1e-13, f"series mismatch {worst}"
        print(_row(f"hyp2f1_batch (n={n})", t_py, t_cy))
    print(f"\nseries cross-backend agreement: {worst:.2e} (relative)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
