"""Numba vs NumPy timings for the hot kernels and a full scd_map pass.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``. Each kernel is
warmed up once (so numba compilation is excluded), checked for agreement
between the two builds, then timed with the best of ``--repeat`` runs.
The end-to-end row runs ``scd_map`` in subprocesses with and without
``CYCLOSCD_DISABLE_NUMBA=1``, since the backend is fixed at import time.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from cycloscd import kernels
from cycloscd._accel import ENV_FLAG, NUMBA_AVAILABLE


def _cases(rng):
    spec = rng.standard_normal((98, 512)) + 1j * rng.standard_normal((98, 512))

    def sc_reduce(fn):
        col = np.zeros(257, complex)
        a_row = np.zeros(98, complex)
        b_acc = np.zeros((257, 98), complex)
        fn(spec, 1 / 400, 1 / 257, 1 / 257, col, a_row, b_acc)
        return col

    frame = rng.standard_normal(400)
    exc = rng.standard_normal(16000)
    coeffs = np.concatenate(([1.2, -0.5], np.zeros(18)))
    return {
        "sc_reduce (98x512)": (kernels.sc_reduce_numba, kernels.sc_reduce_numpy, sc_reduce),
        "cyclic_autocorr_lags (N=400)": (
            kernels.cyclic_autocorr_lags_numba,
            kernels.cyclic_autocorr_lags_numpy,
            lambda fn: fn(frame, 0.0125),
        ),
        "allpole_filter (16000, p=20)": (
            kernels.allpole_filter_numba,
            kernels.allpole_filter_numpy,
            lambda fn: fn(exc, coeffs, np.zeros(20))[0],
        ),
        "splitmix64_uniform (1e6)": (
            kernels.splitmix64_uniform_numba,
            kernels.splitmix64_uniform_numpy,
            lambda fn: fn(np.uint64(42), 1_000_000),
        ),
    }


END_TO_END = """
import timeit
from cycloscd import AnalysisConfig, scd_map
from cycloscd.synthgen import demo_signals
sig = demo_signals()["x1"]
cfg = AnalysisConfig.from_ms(16000)
scd_map(sig, cfg)
print(min(timeit.repeat(lambda: scd_map(sig, cfg), number=1, repeat={repeat})))
"""


def _end_to_end(repeat: int, disable: bool) -> float:
    env = dict(os.environ)
    if disable:
        env[ENV_FLAG] = "1"
    else:
        env.pop(ENV_FLAG, None)
    out = subprocess.run(
        [sys.executable, "-c", END_TO_END.format(repeat=repeat)], env=env, capture_output=True, text=True, check=True
    )
    return float(out.stdout.strip())


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    if not NUMBA_AVAILABLE:
        print("numba is not installed; nothing to compare (pip install numba)")
        return 1

    rng = np.random.default_rng(0)
    print(f"{'kernel':32s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for name, (fast, slow, run) in _cases(rng).items():
        a, b = run(fast), run(slow)  # warm-up and agreement check
        if not np.allclose(a, b, rtol=1e-10, atol=1e-12):
            print(f"{name}: numba and numpy results disagree")
            return 1
        t_fast = min(timeit.repeat(lambda: run(fast), number=1, repeat=args.repeat))
        t_slow = min(timeit.repeat(lambda: run(slow), number=1, repeat=args.repeat))
        print(f"{name:32s} {t_fast * 1e3:10.2f} {t_slow * 1e3:10.2f} {t_slow / t_fast:7.1f}x")

    t_fast = _end_to_end(args.repeat, disable=False)
    t_slow = _end_to_end(args.repeat, disable=True)
    print(f"{'scd_map 1 s @ 16 kHz':32s} {t_fast * 1e3:10.2f} {t_slow * 1e3:10.2f} {t_slow / t_fast:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
