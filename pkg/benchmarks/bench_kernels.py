"""Time the compiled orbit kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py --n 200000 --repeat 3
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from markedrot import kernels
from markedrot.exactnum import FIXED_ONE, PartialQuotients
from markedrot.orbit import TOL0, TOL_STEP, alpha_fixed


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run(n: int, repeat: int, cuts: int, seed: int) -> list[tuple[str, float, float]]:
    rng = np.random.default_rng(seed)
    afp = alpha_fixed(PartialQuotients.periodic([1]))
    cut_fp = np.sort(rng.integers(1, FIXED_ONE, size=cuts, dtype=np.uint64))
    cut_fp = np.concatenate([np.zeros(1, dtype=np.uint64), cut_fp])
    x0 = int(rng.integers(0, FIXED_ONE, dtype=np.uint64))
    impls = {name: kernels.backend_module(name) for name in ("python", "cython")}
    table = rng.integers(0, 2, size=(cuts + 1, 2), dtype=np.int32)
    images = np.array([[0, 1], [1, 0]], dtype=np.int32)
    rows = []

    def labels(impl):
        return kernels.orbit_labels(x0, afp, cut_fp, n, TOL0, TOL_STEP, impl=impl)[0]

    lab = labels(impls["python"])
    pidx = kernels.prefix_perm_index(lab, table, 0)
    q = 144
    cases = {
        "orbit_labels": lambda impl: labels(impl),
        "prefix_perm_index": lambda impl: kernels.prefix_perm_index(lab, table, 0, impl=impl),
        "shift_mismatch": lambda impl: kernels.shift_mismatch(lab, pidx, images, q, n - q - 1, impl=impl),
    }
    for name, fn in cases.items():
        tp = _best(lambda: fn(impls["python"]), repeat)
        tc = _best(lambda: fn(impls["cython"]), repeat)
        rows.append((name, tp, tc))
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000, help="orbit length")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--cuts", type=int, default=4, help="number of marked points")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    try:
        kernels.backend_module("cython")
    except ImportError:
        raise SystemExit("compiled kernels are not built; run pip install -e . first")
    print(f"{'kernel':<20}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    for name, tp, tc in run(args.n, args.repeat, args.cuts, args.seed):
        print(f"{name:<20}{tp:12.4f}{tc:12.4f}{tp / tc:10.1f}")


if __name__ == "__main__":
    main()
