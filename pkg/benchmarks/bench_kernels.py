"""Compare the compiled and NumPy kernel backends on realistic workloads.

Times the two hot loops (per-draw class posteriors and posterior-weighted KL
scores) at interview-like sizes and reports the speedup plus the maximum
disagreement between backends. Runs fine without the compiled extension, in
which case only the NumPy numbers are shown.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from vaq._kernels import _fallback

try:
    from vaq._kernels import _speedups
except ImportError:
    _speedups = None


def make_workload(rng: np.random.Generator, num_draws: int, num_causes: int,
                  num_questions: int, num_answered: int):
    theta = rng.uniform(0.05, 0.95, size=(num_draws, num_causes, num_questions))
    prior = rng.dirichlet(np.ones(num_causes), size=num_draws)
    log_theta = np.log(theta)
    log_comp = np.log1p(-theta)
    idx = rng.choice(num_questions, size=num_answered, replace=False).astype(np.int64)
    vals = rng.integers(0, 2, size=num_answered).astype(np.int8)
    post = rng.dirichlet(np.ones(num_causes), size=num_draws)
    yhat = post.argmax(axis=1).astype(np.int64)
    cand = np.setdiff1d(np.arange(num_questions, dtype=np.int64), idx)
    return {
        "posterior_args": (np.log(prior), log_theta, log_comp, idx, vals),
        "score_args": (theta, log_theta, log_comp, post, yhat, cand),
    }


def best_time(fn, args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=20,
                        help="timing repetitions per case (best is reported)")
    args = parser.parse_args()

    cases = [
        ("paper-scale", dict(num_draws=500, num_causes=10, num_questions=50,
                             num_answered=10)),
        ("large", dict(num_draws=1000, num_causes=34, num_questions=100,
                       num_answered=25)),
    ]
    kernels = [
        ("class_posteriors", "posterior_args"),
        ("pwkl_scores", "score_args"),
    ]

    if _speedups is None:
        print("compiled extension not available; timing NumPy backend only")
    header = f"{'case':<12} {'kernel':<18} {'numpy':>10} {'compiled':>10} {'speedup':>8} {'max|diff|':>10}"
    print(header)
    print("-" * len(header))

    rng = np.random.default_rng(0)
    for case_name, sizes in cases:
        work = make_workload(rng, **sizes)
        for kernel_name, arg_key in kernels:
            call_args = work[arg_key]
            ref = getattr(_fallback, kernel_name)(*call_args)
            t_numpy = best_time(getattr(_fallback, kernel_name), call_args,
                                args.repeats)
            if _speedups is None:
                print(f"{case_name:<12} {kernel_name:<18} {t_numpy * 1e3:>8.2f}ms"
                      f" {'-':>10} {'-':>8} {'-':>10}")
                continue
            got = getattr(_speedups, kernel_name)(*call_args)
            diff = float(np.max(np.abs(got - ref)))
            t_comp = best_time(getattr(_speedups, kernel_name), call_args,
                               args.repeats)
            print(f"{case_name:<12} {kernel_name:<18} {t_numpy * 1e3:>8.2f}ms"
                  f" {t_comp * 1e3:>8.2f}ms {t_numpy / t_comp:>7.1f}x"
                  f" {diff:>10.1e}")


if __name__ == "__main__":
    main()
