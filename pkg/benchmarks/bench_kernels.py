"""Compare the compiled contraction kernel with the numpy fallback.

Runs both on random sparse generator matrices and on whole-rule
evaluations in k[S3], checks that the outputs agree, and prints timings.

    python benchmarks/bench_kernels.py [--repeat N] [--json]
"""
from __future__ import annotations

import argparse
import json
import time

import numpy as np

from hopfdiag import _kernels_py
from hopfdiag.models import builtin_group, group_algebra
from hopfdiag.theories import load_theory

try:
    from hopfdiag import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def synthetic_cases(rng: np.random.Generator):
    # (A, K, R, I): shapes met when evaluating in models of dimension 6
    for A, K, R, I in [(1, 6, 36, 6), (6, 36, 6, 6), (36, 6, 6, 36), (1, 36, 216, 6), (6, 6, 216, 36)]:
        nnz = max(1, K * I // 6)
        rows = rng.integers(0, I, nnz).astype(np.int64)
        cols = rng.integers(0, K, nnz).astype(np.int64)
        vals = rng.integers(-3, 4, nnz).astype(np.int64)
        state = rng.integers(-5, 6, A * K * R).astype(np.int64)
        yield f"A={A} K={K} R={R} I={I}", (state, A, K, R, rows, cols, vals, I)


def rule_evaluation(rules, model, contract):
    """Evaluate every rule side in ``model`` with the given kernel."""
    from hopfdiag import models as mod
    saved = mod.kernels.contract
    mod.kernels.contract = contract
    try:
        for r in rules:
            mod.evaluate(r.lhs_term, model)
            mod.evaluate(r.rhs_term, model)
    finally:
        mod.kernels.contract = saved


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)

    backends = {"python": _kernels_py.contract}
    if _compiled is not None:
        backends["cython"] = _compiled.contract
    rng = np.random.default_rng(args.seed)
    rows = []
    for label, case in synthetic_cases(rng):
        outs = {name: fn(*case) for name, fn in backends.items()}
        ref = outs["python"]
        agree = all(np.array_equal(ref, o) for o in outs.values())
        times = {name: _best(lambda fn=fn: fn(*case), args.repeat) for name, fn in backends.items()}
        rows.append({"case": label, "agree": agree, **{k: v * 1e6 for k, v in times.items()}})

    model = group_algebra(builtin_group("s3"))
    rules = load_theory("HR").rules
    times = {name: _best(lambda fn=fn: rule_evaluation(rules, model, fn), max(1, args.repeat // 2))
             for name, fn in backends.items()}
    rows.append({"case": f"all HR rules in k[s3] ({len(rules)} rules)", "agree": True,
                 **{k: v * 1e6 for k, v in times.items()}})

    if args.json:
        print(json.dumps(rows, indent=2))
        return
    names = list(backends)
    print(f"{'case':<40}" + "".join(f"{n + ' (us)':>16}" for n in names)
          + ("   speedup" if "cython" in names else ""))
    for r in rows:
        line = f"{r['case']:<40}" + "".join(f"{r[n]:>16.1f}" for n in names)
        if "cython" in names:
            line += f"   {r['python'] / r['cython']:6.2f}x"
        if not r["agree"]:
            line += "   MISMATCH"
        print(line)
    if _compiled is None:
        print("compiled kernel not built; only the fallback was timed")


if __name__ == "__main__":
    main()
