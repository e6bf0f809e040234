"""Time the profiled-deviance kernel: compiled extension vs numpy fallback.

Run from the repository root::

    python benchmarks/bench_kernels.py [--evals 2000] [--json]

The data are a synthetic crossed design (subjects x items x two conditions)
with random intercepts and slopes for both groupings, the shape the fitting
loop sees most often.
"""
from __future__ import annotations

import argparse
import io
import json
import time

import numpy as np

from mixlm import build_model_frame, parse_formula, read_csv
from mixlm import kernels
from mixlm.lmm import LmmProblem, fit_lmm
from mixlm.numstat import Rng

FORMULA = "y ~ cond + (1+cond|subject) + (1+cond|item)"


def crossed_csv(n_subjects: int, n_items: int, seed: int = 11) -> str:
    rng = Rng(seed)
    s_eff, i_eff = 2.0 * rng.normal(n_subjects), 1.0 * rng.normal(n_items)
    noise = rng.normal(2 * n_subjects * n_items)
    rows, k = ["subject,item,cond,y"], 0
    for s in range(n_subjects):
        for i in range(n_items):
            for c in ("a", "b"):
                y = 10.0 + (c == "b") * 1.5 + s_eff[s] + i_eff[i] + noise[k]
                rows.append(f"s{s},i{i},{c},{float(y)!r}")
                k += 1
    return "\n".join(rows) + "\n"


def time_deviance(problem: LmmProblem, thetas: np.ndarray) -> float:
    t0 = time.perf_counter()
    for th in thetas:
        problem.deviance(th, True)
    return (time.perf_counter() - t0) / len(thetas)


def time_fit(frame, kernel_cls) -> float:
    import mixlm.lmm as lmm

    saved = lmm.PlsKernel
    lmm.PlsKernel = kernel_cls
    try:
        t0 = time.perf_counter()
        fit_lmm(frame)
        return time.perf_counter() - t0
    finally:
        lmm.PlsKernel = saved


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--evals", type=int, default=2000)
    parser.add_argument("--sizes", default="6x7,20x20,40x30", help="comma list of SUBJECTSxITEMS")
    parser.add_argument("--json", action="store_true")
    args = parser.parse_args(argv)

    results = []
    for size in args.sizes.split(","):
        ns, ni = map(int, size.split("x"))
        df = read_csv(io.StringIO(crossed_csv(ns, ni)))
        frame = build_model_frame(df, parse_formula(FORMULA))
        rng = np.random.default_rng(0)
        row = {"subjects": ns, "items": ni, "n": frame.n}
        candidates = [("python", kernels.PythonPlsKernel)]
        if kernels.BACKEND == "compiled":
            candidates.insert(0, ("compiled", kernels.PlsKernel))
        for name, cls in candidates:
            problem = LmmProblem(frame, cls)
            thetas = rng.uniform(-1.5, 1.5, (args.evals, problem.n_theta))
            row[f"{name}_us_per_eval"] = 1e6 * time_deviance(problem, thetas)
            row[f"{name}_fit_s"] = time_fit(frame, cls)
        if "compiled_us_per_eval" in row:
            row["speedup"] = row["python_us_per_eval"] / row["compiled_us_per_eval"]
        results.append(row)

    if args.json:
        print(json.dumps({"backend": kernels.BACKEND, "results": results}, indent=2))
        return 0
    print(f"backend in use: {kernels.BACKEND}")
    print(f"{'design':>10} {'n':>6} {'compiled us':>12} {'python us':>12} {'speedup':>8} "
          f"{'fit comp s':>10} {'fit py s':>9}")
    for r in results:
        print(f"{r['subjects']:>4}x{r['items']:<5} {r['n']:>6} "
              f"{r.get('compiled_us_per_eval', float('nan')):>12.1f} {r['python_us_per_eval']:>12.1f} "
              f"{r.get('speedup', float('nan')):>8.2f} {r.get('compiled_fit_s', float('nan')):>10.3f} "
              f"{r['python_fit_s']:>9.3f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
