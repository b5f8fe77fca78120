#!/usr/bin/env python3
"""Compare the compiled bitmap kernels against the pure-numpy fallback.

Runs the same workload twice in subprocesses (SUMMEX_KERNELS=compiled|pure)
and prints a side-by-side table: closed-itemset mining, the entry-count
kernel, superset scans, and greedy planning steps.

    python benchmarks/kernel_bench.py [--items 1200] [--attrs 8] [--support 6]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def measure(items: int, attrs: int, support: int) -> dict:
    import numpy as np

    from summex import KERNEL_BACKEND
    from summex import _kernels as K
    from summex.catalog import build_occurrence_bitmaps, mine_closed_itemsets
    from summex.engine import SessionConfig, apply_step, start_session, top1sum_next
    from summex.ingest import equi_depth_bin
    from summex.metrics import ComponentScales, UtilityWeights
    from summex.synthetic import make_synthetic

    raw, _ = make_synthetic(n_items=items, n_attrs=attrs, n_clusters=10, seed=0)
    data = equi_depth_bin(raw, 10)

    t0 = time.perf_counter()
    catalog = mine_closed_itemsets(data, support)
    mine_s = time.perf_counter() - t0

    occ = build_occurrence_bitmaps(data)
    query = catalog.members_matrix[catalog.root_id]
    t0 = time.perf_counter()
    reps = 2000
    for _ in range(reps):
        K.facet_counts(query, occ)
    facet_us = (time.perf_counter() - t0) / reps * 1e6

    rng = np.random.default_rng(0)
    ids = rng.integers(0, len(catalog), size=500)
    t0 = time.perf_counter()
    for iid in ids:
        K.superset_scan(
            catalog.members_matrix,
            catalog.sizes,
            catalog.size_order,
            catalog.members_matrix[int(iid)],
            int(catalog.sizes[int(iid)]),
            10,
        )
    superset_us = (time.perf_counter() - t0) / len(ids) * 1e6

    config = SessionConfig(
        mode="full", strategy="top1sum", weights=UtilityWeights(preset="HU"),
        k=8, t_total=6, swap_threshold=0.0,
    )
    session = start_session(catalog, config, ComponentScales.disabled())
    t0 = time.perf_counter()
    steps = 0
    while not session.done:
        apply_step(session, top1sum_next(session))
        steps += 1
    plan_ms = (time.perf_counter() - t0) / max(1, steps) * 1e3

    return {
        "backend": KERNEL_BACKEND,
        "itemsets": len(catalog),
        "mine_s": mine_s,
        "facet_counts_us": facet_us,
        "superset_scan_us": superset_us,
        "top1sum_step_ms": plan_ms,
    }


def run_child(backend: str, args) -> dict:
    env = dict(os.environ, SUMMEX_KERNELS=backend)
    out = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--child",
         "--items", str(args.items), "--attrs", str(args.attrs), "--support", str(args.support)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--items", type=int, default=2400)
    parser.add_argument("--attrs", type=int, default=10)
    parser.add_argument("--support", type=int, default=8)
    parser.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.child:
        print(json.dumps(measure(args.items, args.attrs, args.support)))
        return

    results = {}
    for backend in ("compiled", "pure"):
        try:
            results[backend] = run_child(backend, args)
        except subprocess.CalledProcessError as exc:
            if backend == "compiled":
                print("compiled backend unavailable; run `pip install -e .` first", file=sys.stderr)
                print(exc.stderr, file=sys.stderr)
                sys.exit(1)
            raise

    c, p = results["compiled"], results["pure"]
    assert c["itemsets"] == p["itemsets"], "backends mined different catalogs"
    print(f"\ncatalog: {c['itemsets']} closed itemsets "
          f"({args.items} items, {args.attrs} attrs, support {args.support})\n")
    rows = [
        ("mine_closed_itemsets", "s", "mine_s"),
        ("facet_counts", "us/call", "facet_counts_us"),
        ("superset_scan (limit 10)", "us/call", "superset_scan_us"),
        ("top1sum planning", "ms/step", "top1sum_step_ms"),
    ]
    print(f"{'workload':26} {'compiled':>12} {'pure':>12} {'speedup':>9}")
    for label, unit, key in rows:
        speedup = p[key] / c[key] if c[key] > 0 else float("inf")
        print(f"{label:26} {c[key]:10.2f} {unit:>2} {p[key]:10.2f} {unit:>2} {speedup:8.1f}x")


if __name__ == "__main__":
    main()
