"""Compare the compiled decode core against the pure-Python fallback.

Usage:
    python benchmarks/bench_backends.py [--trials N] [--z Z]

Both backends run the same trials; besides timing, the script asserts the
outcomes are bit-identical, so it doubles as an end-to-end parity check.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ldpcsched import (
    CodeSpec,
    DecodeConfig,
    HAVE_C_CORE,
    build_code,
    decode_code,
    sample_llrs,
    trial_rng,
)


def bench(code, scheduler: str, cfg: DecodeConfig, trials: int, backend: str) -> tuple[float, list]:
    outs = []
    t0 = time.perf_counter()
    for t in range(trials):
        llrs = sample_llrs(code, -1.5, trial_rng(1234, 0, t))
        outs.append(decode_code(code, llrs, scheduler, cfg, backend=backend))
    return (time.perf_counter() - t0) / trials, outs


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--z", type=int, default=8)
    args = ap.parse_args()

    if not HAVE_C_CORE:
        print("compiled core is not built; nothing to compare")
        return 1

    code = build_code(CodeSpec(base_graph="bg1", z=args.z, parity_truncation=11 * args.z))
    g = code.graph
    print(f"code: N={g.num_vars} M={g.num_checks} E={g.num_edges}, {args.trials} trials each\n")
    print(f"{'scheduler':>10s} {'granularity':>11s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}")

    cases = [
        ("flooding", "check"),
        ("lbp", "check"),
        ("static-ep", "check"),
        ("dyn-ebp", "check"),
        ("dyn-ebp", "layer"),
        ("dyn-pebp", "check"),
        ("dyn-pebp", "layer"),
        ("rbp-decay", "check"),
    ]
    for scheduler, gran in cases:
        cfg = DecodeConfig(max_iters=5, granularity=gran)
        t_py, out_py = bench(code, scheduler, cfg, args.trials, "py")
        t_c, out_c = bench(code, scheduler, cfg, args.trials, "c")
        for a, b in zip(out_py, out_c):
            assert a.success == b.success
            assert np.array_equal(a.posterior, b.posterior), "backend divergence"
        print(f"{scheduler:>10s} {gran:>11s} {t_py*1e3:9.2f}ms {t_c*1e3:9.2f}ms "
              f"{t_py/t_c:7.1f}x")
    print("\nall outcomes bit-identical across backends")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
