"""Benchmark comparing the compiled kernel with the pure-Python fallback on
the batch-run primitive, checking output equality along the way."""

from __future__ import annotations

import time

import numpy as np

from . import _kernel_py
from .core import precompute_tables
from .generate import GeneratorSpec, generate_stream
from .stream import MatrixOverlay

try:
    from . import _kernel  # type: ignore[attr-defined]
except ImportError:
    _kernel = None


def _time_backend(backend, args, runs: int) -> float:
    best = float("inf")
    for _ in range(runs):
        t0 = time.perf_counter()
        backend.pd_run_many(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def run_bench(n: int = 1024, m: int = 8192, t: int = 256, lam: int = 2,
              n_runs: int = 20000, repeats: int = 3, seed: int = 7) -> dict:
    spec = GeneratorSpec(kind="planted-heavy", n=n, m=m,
                         heavy_frequency=max(1, m // 20), seed=seed)
    view = generate_stream(spec)
    ov = MatrixOverlay.from_view(view, t)
    d, uniq, cnt, off = precompute_tables(ov.padded, ov.r, ov.t)
    args = (ov.padded, d, uniq, cnt, off, ov.r, ov.t, lam, n_runs, seed)

    result = {
        "workload": {"n": n, "m": m, "t": t, "r": ov.r, "lambda": lam,
                     "runs_per_call": n_runs},
        "backends": {},
    }
    py_time = _time_backend(_kernel_py, args, repeats)
    result["backends"]["python"] = {
        "seconds_per_call": py_time,
        "runs_per_second": n_runs / py_time,
    }
    if _kernel is not None:
        cy_time = _time_backend(_kernel, args, repeats)
        result["backends"]["cython"] = {
            "seconds_per_call": cy_time,
            "runs_per_second": n_runs / cy_time,
        }
        result["speedup"] = py_time / cy_time
        S1, C1 = _kernel_py.pd_run_many(*args)
        S2, C2 = _kernel.pd_run_many(*args)
        result["outputs_identical"] = bool(
            np.array_equal(S1, S2) and np.array_equal(C1, C2)
        )
    return result
