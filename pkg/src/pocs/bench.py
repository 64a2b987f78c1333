"""Compiled vs numpy kernel timings.

Run with ``pocs bench`` or ``python -m pocs.bench``. Kernel timings call
both backends directly; the end-to-end row times one noiseless recovery in
a subprocess per backend (``POCS_PURE_PYTHON`` selects the fallback).
"""
from __future__ import annotations

import os
import subprocess
import sys
import timeit

import numpy as np

from . import _kernels_py

_E2E = """
import time
from pocs.experiments import ExperimentConfig, run_trial
cfg = ExperimentConfig(mode="pocs-noiseless", base_seed=7)
t = time.perf_counter()
for k in range(20):
    run_trial(cfg, 40, 0, k)
print((time.perf_counter() - t) / 20)
"""


def _time(fn, repeat):
    return min(timeit.repeat(fn, number=repeat, repeat=3)) / repeat


def _e2e(pure: bool) -> float:
    env = dict(os.environ, POCS_PURE_PYTHON="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", _E2E], env=env, check=True,
                         capture_output=True, text=True)
    return float(out.stdout.strip())


def main(repeat: int = 2000) -> int:
    try:
        from . import _kernels as compiled
    except ImportError:
        print("compiled extension not built; only the numpy fallback is available")
        return 1
    rng = np.random.default_rng(0)
    n, m = 100, 40
    b = rng.standard_normal(n)
    tau = 0.3 * np.abs(b).sum()
    v = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    A = (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(m)
    M = rng.standard_normal((2 * m, n)) / np.sqrt(2 * m)
    x = np.zeros(n)
    x[:10] = rng.standard_normal(10)
    MT, y = np.ascontiguousarray(M.T), M @ x
    target = 1e-8 * np.linalg.norm(y)
    cases = [
        ("project_l1_ball n=100", lambda k: k.project_l1_ball(b, tau), repeat),
        ("hard_threshold n=100 s=10", lambda k: k.hard_threshold(b, 10), repeat),
        ("signc m=40", lambda k: k.signc(v), repeat),
        ("equivalent_matrix 40x100", lambda k: k.equivalent_matrix(A, v, 0.1), max(1, repeat // 10)),
        ("spg_bpdn 80x100 s=10", lambda k: k.spg_bpdn(MT, y, 0.0, target, 1e-6, 100_000),
         max(1, repeat // 500)),
    ]
    print(f"{'kernel':30s} {'cython (us)':>12s} {'numpy (us)':>12s} {'speedup':>8s}")
    for name, call, reps in cases:
        tc = _time(lambda: call(compiled), reps) * 1e6
        tp = _time(lambda: call(_kernels_py), reps) * 1e6
        print(f"{name:30s} {tc:12.2f} {tp:12.2f} {tp / tc:8.1f}x")
    tc, tp = _e2e(False), _e2e(True)
    print(f"{'PO-CS trial n=100 s=10 m=40':30s} {tc * 1e3:10.2f}ms {tp * 1e3:10.2f}ms {tp / tc:8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
