"""Seeded generators for the modulated test signals.

Noise comes from a fixed, documented recipe so fixtures can be regenerated
bit-for-bit in any language:

1. Uniforms: SplitMix64 in counter form. Draw ``i`` (0-based) mixes
   ``seed + (i + 1) * 0x9E3779B97F4A7C15 (mod 2**64)`` through the SplitMix64
   finaliser and keeps the top 53 bits, ``u = (z >> 11) * 2**-53``.
2. Gaussians: Box-Muller on consecutive pairs ``(u1, u2)``, both consumed,
   ``r = sqrt(-2 ln(1 - u1))``, output ``r cos(2 pi u2)`` then
   ``r sin(2 pi u2)``. An odd request drops the final sine value.

Independent streams (the two noises of ``noise_mixture``) use seeds
``seed + 0`` and ``seed + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .dsp import AudioSignal

KINDS = ("am_noise", "noise_mixture", "am_sinusoid", "am_sinusoid_noisy")

DEFAULT_PARAMS = {
    "am_noise": {"f_c": 100.0},
    "noise_mixture": {"f_c1": 100.0, "f_c2": 250.0},
    "am_sinusoid": {"f_m": 150.0, "f_c": 500.0},
    "am_sinusoid_noisy": {"f_m": 150.0, "f_c": 500.0},
}

# x1..x4 in the order used by the demo.
DEMO_KINDS = {"x1": "am_noise", "x2": "noise_mixture", "x3": "am_sinusoid", "x4": "am_sinusoid_noisy"}


def gen_white_noise(n: int, seed: int) -> np.ndarray:
    """``n`` i.i.d. standard normal samples (SplitMix64 + Box-Muller)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    n_pairs = (n + 1) // 2
    u = kernels.splitmix64_uniform(seed, 2 * n_pairs)
    radius = np.sqrt(-2.0 * np.log1p(-u[0::2]))
    theta = 2.0 * np.pi * u[1::2]
    out = np.empty(2 * n_pairs)
    out[0::2] = radius * np.cos(theta)
    out[1::2] = radius * np.sin(theta)
    return out[:n]


@dataclass(frozen=True)
class TestSignalSpec:
    kind: str
    params: dict = field(default_factory=dict)
    duration: float = 1.0
    sample_rate: int = 16000
    seed: int = 0

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown test signal kind {self.kind!r}; expected one of {KINDS}")
        if self.duration <= 0:
            raise ValueError(f"duration must be > 0, got {self.duration}")
        merged = {**DEFAULT_PARAMS[self.kind], **self.params}
        unknown = set(merged) - set(DEFAULT_PARAMS[self.kind])
        if unknown:
            raise ValueError(f"unexpected parameters for {self.kind}: {sorted(unknown)}")
        nyquist = self.sample_rate / 2
        for name, freq in merged.items():
            if not 0 <= freq < nyquist:
                raise ValueError(f"{name}={freq} Hz must lie in [0, {nyquist}) Hz")
        object.__setattr__(self, "params", merged)

    @property
    def n_samples(self) -> int:
        return int(round(self.duration * self.sample_rate))


def _cos(freq: float, n: np.ndarray, fs: int) -> np.ndarray:
    return np.cos(2.0 * np.pi * freq * n / fs)


def gen_test_signal(spec: TestSignalSpec) -> AudioSignal:
    fs = spec.sample_rate
    n = np.arange(spec.n_samples)
    p = spec.params
    if spec.kind == "am_noise":
        x = gen_white_noise(len(n), spec.seed) * _cos(p["f_c"], n, fs)
    elif spec.kind == "noise_mixture":
        w1 = gen_white_noise(len(n), spec.seed)
        w2 = gen_white_noise(len(n), spec.seed + 1)
        x = w1 * _cos(p["f_c1"], n, fs) + w2 * _cos(p["f_c2"], n, fs)
    else:
        x = _cos(p["f_m"], n, fs) * _cos(p["f_c"], n, fs)
        if spec.kind == "am_sinusoid_noisy":
            x = x + gen_white_noise(len(n), spec.seed)
    return AudioSignal(x, fs)


def demo_signals(seed: int = 42, duration: float = 1.0, sample_rate: int = 16000):
    """``{"x1": ..., "x4": ...}`` with default parameters."""
    return {
        name: gen_test_signal(TestSignalSpec(kind, duration=duration, sample_rate=sample_rate, seed=seed))
        for name, kind in DEMO_KINDS.items()
    }
