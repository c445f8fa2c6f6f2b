import numpy as np
import pytest

from cycloscd.dsp import AnalysisConfig, AudioSignal
from cycloscd.synthgen import demo_signals, gen_white_noise

FS = 16000


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def default_cfg():
    return AnalysisConfig.from_ms(FS)


@pytest.fixture(scope="session")
def demo():
    return demo_signals(seed=42)


def local_maxima(profile):
    p = np.asarray(profile)
    return np.flatnonzero((p[1:-1] > p[:-2]) & (p[1:-1] >= p[2:])) + 1


AR2_RADIUS = 0.95
AR2_FREQ = 500.0
THREE_TONES = ((440.0, 1.0), (1250.0, 0.5), (2730.0, 0.25))


def ar2_coefficients(radius=AR2_RADIUS, freq=AR2_FREQ, fs=FS):
    """Predictor coefficients (a1, a2) for a pole pair at ``radius * exp(+-j 2 pi freq / fs)``."""
    return np.array([2 * radius * np.cos(2 * np.pi * freq / fs), -radius**2])


def ar2_noise(n, seed):
    from scipy.signal import lfilter

    a = ar2_coefficients()
    w = gen_white_noise(n, seed)
    return lfilter([1.0], np.concatenate(([1.0], -a)), w)


def three_tone(n, fs=FS, phases=(0.3, 1.1, -2.0)):
    idx = np.arange(n)
    return sum(amp * np.sin(2 * np.pi * f * idx / fs + ph) for (f, amp), ph in zip(THREE_TONES, phases))


def tone_complex(seed, seconds=0.5, fs=FS):
    """Ten harmonics of 125 Hz at amplitude 0.5 / k plus 0.01-rms seeded noise."""
    n = int(seconds * fs)
    idx = np.arange(n)
    x = sum(0.5 / k * np.cos(2 * np.pi * 125.0 * k * idx / fs) for k in range(1, 11))
    return AudioSignal(x + 0.01 * gen_white_noise(n, seed), fs)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import CRITERIA, RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, _ in CRITERIA:
        terminalreporter.write_line(RESULTS.get(name, f"[SKIP] {name}: not run"))
