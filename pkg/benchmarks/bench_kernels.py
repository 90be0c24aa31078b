"""Compare the compiled and NumPy kernels on real design workloads.

    python benchmarks/bench_kernels.py            # GF(243) pair counting
    python benchmarks/bench_kernels.py --large    # adds GF(512), about a minute
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from qdesign import designs, family, kernels
from qdesign.family import FamilySpec


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_case(spec: FamilySpec, threads: int, repeat: int, samples: int) -> dict:
    k = len(family.image_set(spec))
    st = designs.build_structure(spec.field, spec.power_map(), k)
    cost = designs.exact_cost(st, 2)
    rng = np.random.default_rng(0)
    subsets = designs._random_subsets(rng, st.v, 2, samples)
    bits = st.point_bits()
    row = {"spec": spec.label(), "v": st.v, "k": k, "b": st.b, "increments": cost}
    reference = None
    for name in ("numpy", "cython"):
        try:
            kern = kernels.get(name)
        except RuntimeError:
            row[name] = None
            continue
        secs, counts = timed(lambda: designs.pair_coverage(st, threads=threads, backend=name),
                             repeat)
        if reference is None:
            reference = counts
        elif not (counts == reference).all():
            raise SystemExit(f"backends disagree on {spec.label()}")
        ssecs, _ = timed(lambda: kern.subset_coverage(bits, subsets, threads), repeat)
        row[name] = {"pair_seconds": round(secs, 4),
                     "increments_per_second": round(cost / secs),
                     "sampled_seconds": round(ssecs, 4)}
    if row.get("numpy") and row.get("cython"):
        row["speedup"] = round(row["numpy"]["pair_seconds"] / row["cython"]["pair_seconds"], 2)
    return row


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--threads", type=int, default=kernels.default_threads())
    ap.add_argument("--repeat", type=int, default=1)
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--large", action="store_true")
    ap.add_argument("--small", action="store_true", help="tiny cases, for smoke tests")
    args = ap.parse_args(argv)

    if args.small:
        cases = [FamilySpec(3, 3, 2), FamilySpec(2, 5, 1)]
    else:
        cases = [FamilySpec(2, 7, 1), FamilySpec(3, 5, 2)]
        if args.large:
            cases.append(FamilySpec(2, 9, 1))
    rows = [bench_case(s, args.threads, args.repeat, args.samples) for s in cases]
    print(json.dumps({"active_backend": kernels.BACKEND, "threads": args.threads,
                      "results": rows}, indent=2))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
