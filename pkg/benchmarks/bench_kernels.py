"""Compare the compiled and pure-Python receiver kernels on harness-sized batches.

Usage: ``python3 benchmarks/bench_kernels.py [--trials 2000] [--repeat 5]``
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from lpwus import kernels
from lpwus.receiver import butterworth


def make_batch(trials, n_samples, seed=0):
    rng = np.random.default_rng(seed)
    y = rng.standard_normal((trials, n_samples)) + 1j * rng.standard_normal((trials, n_samples))
    starts = rng.integers(140, 152, size=trials).astype(np.int64)
    return y, starts


def time_backend(fn, args, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--samples", type=int, default=3 * 548 + 60)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)

    fs = 512 * 30e3
    b1, a1 = butterworth(132 * 30e3 / 2, fs)
    b2, a2 = butterworth(132 * 30e3 / 2, fs)
    y, starts = make_batch(args.trials, args.samples)
    call = (y, b1, a1, b2, a2, 4, starts, 128, 4, 0, 0, 4)

    results, outputs = {}, {}
    for name in kernels.available_backends():
        t, out = time_backend(kernels.get_backend(name), call, args.repeat)
        results[name] = t
        outputs[name] = out
    names = list(results)
    identical = all(np.array_equal(outputs[names[0]], outputs[n]) for n in names[1:])
    report = {
        "trials": args.trials,
        "samples": args.samples,
        "selected": kernels.BACKEND,
        "seconds": results,
        "outputs_identical": identical,
    }
    if "cython" in results:
        report["speedup"] = results["python"] / results["cython"]
    print(json.dumps(report, indent=2))


if __name__ == "__main__":
    main()
