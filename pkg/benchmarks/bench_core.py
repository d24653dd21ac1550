"""Compare the compiled kernels with the pure-Python fallback.

Usage: python3 benchmarks/bench_core.py [--periods N] [--repeat R]

Times three workloads on both backends: single field evaluations, plain
integration over drive periods and tangent propagation with five tangents.
"""

import argparse
import time

import numpy as np

from bubblechaos import _pycore
from bubblechaos.integrator import StepControl
from bubblechaos.params import nondimensionalize, preset

try:
    from bubblechaos import _ccore
except ImportError:
    _ccore = None


def _best(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def workloads(periods):
    dp = nondimensionalize(preset("sonovue-1.72um").at(20.0, 1.2e6))
    coef = dp.as_array()
    ctl = StepControl().as_array()
    y0 = np.array([1.05, 0.0, 0.95, 0.0, 0.0])

    def fields(k):
        y = y0.copy()
        return lambda: [k.field(coef, y) for _ in range(20000)]

    def periods_run(k):
        return lambda: k.run_periods(coef, y0.copy(), periods, dp.period, ctl, 1e-3)

    def tangents(k):
        def run():
            logs = np.zeros((periods, 5))
            k.lyapunov(coef, y0.copy(), np.eye(5), periods, dp.period, 0.0, ctl, 1e-3, logs)
        return run

    return {"field x20000": fields, f"integrate {periods} periods": periods_run,
            f"tangents {periods} periods": tangents}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--periods", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    print(f"{'workload':28s} {'python [s]':>12s} {'compiled [s]':>13s} {'speedup':>9s}")
    for name, make in workloads(args.periods).items():
        tp = _best(make(_pycore), args.repeat)
        if _ccore is None:
            print(f"{name:28s} {tp:12.4f} {'n/a':>13s} {'n/a':>9s}")
            continue
        tc = _best(make(_ccore), args.repeat)
        print(f"{name:28s} {tp:12.4f} {tc:13.4f} {tp / tc:9.1f}")


if __name__ == "__main__":
    main()
