import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.signal import lfilter

from cycloscd import _accel, kernels

needs_numba = pytest.mark.skipif(not _accel.NUMBA_AVAILABLE, reason="numba not installed")

# First three SplitMix64 outputs for seed 0 (reference C implementation).
SPLITMIX64_SEED0 = [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


def test_backend_selection_matches_flag():
    expected = "numba" if _accel.USE_NUMBA else "numpy"
    assert _accel.backend_name() == expected
    if _accel.USE_NUMBA:
        assert kernels.sc_reduce is kernels.sc_reduce_numba
    else:
        assert kernels.sc_reduce is kernels.sc_reduce_numpy


@pytest.mark.parametrize("impl", ["numpy", pytest.param("numba", marks=needs_numba)])
def test_splitmix64_reference_vector(impl):
    fn = getattr(kernels, f"splitmix64_uniform_{impl}")
    expected = [(v >> 11) * 2.0**-53 for v in SPLITMIX64_SEED0]
    assert fn(np.uint64(0), 3).tolist() == expected
    assert kernels.splitmix64_uniform(2**64, 3).tolist() == expected


@needs_numba
@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(1, 300))
def test_splitmix64_twins_identical(seed, n):
    s = np.uint64(seed)
    assert np.array_equal(kernels.splitmix64_uniform_numba(s, n), kernels.splitmix64_uniform_numpy(s, n))


def _run_reduce(fn, spec, n_alpha):
    n_frames, n_fft = spec.shape
    nb = n_fft // 2 + 1
    col = np.zeros(nb, complex)
    a_row = np.zeros(n_frames, complex)
    b_acc = np.zeros((nb, n_frames), complex)
    fn(spec, 1.0 / 40, 1.0 / nb, 1.0 / n_alpha, col, a_row, b_acc)
    return col, a_row, b_acc


@pytest.mark.parametrize("impl", ["numpy", pytest.param("numba", marks=needs_numba)])
def test_sc_reduce_against_direct_loops(impl, rng):
    spec = rng.standard_normal((6, 32)) + 1j * rng.standard_normal((6, 32))
    col, a_row, b_acc = _run_reduce(getattr(kernels, f"sc_reduce_{impl}"), spec, 3)
    sc = np.empty((6, 17), complex)
    for t in range(6):
        for k in range(17):
            lower = np.conj(spec[t, (-k) % 32])  # X(f - alpha/2) for a real frame
            upper = spec[t, k]
            sc[t, k] = lower * np.conj(upper) / 40
    assert np.allclose(col, sc.sum(axis=0), atol=1e-13)
    assert np.allclose(a_row, sc.mean(axis=1), atol=1e-13)
    assert np.allclose(b_acc, sc.T / 3, atol=1e-13)


@needs_numba
@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12), st.sampled_from([8, 16, 64]))
def test_sc_reduce_twins_agree(seed, n_frames, n_fft):
    rng = np.random.default_rng(seed)
    spec = rng.standard_normal((n_frames, n_fft)) + 1j * rng.standard_normal((n_frames, n_fft))
    a = _run_reduce(kernels.sc_reduce_numba, spec, 5)
    b = _run_reduce(kernels.sc_reduce_numpy, spec, 5)
    for x, y in zip(a, b):
        assert np.max(np.abs(x - y)) <= 1e-12 * max(1.0, np.max(np.abs(y)))


@pytest.mark.parametrize("impl", ["numpy", pytest.param("numba", marks=needs_numba)])
def test_allpole_matches_lfilter(impl, rng):
    fn = getattr(kernels, f"allpole_filter_{impl}")
    coeffs = np.array([1.6, -0.9, 0.05])
    exc = rng.standard_normal(500)
    y, _ = fn(exc, coeffs, np.zeros(3))
    ref = lfilter([1.0], np.concatenate(([1.0], -coeffs)), exc)
    assert np.max(np.abs(y - ref)) < 1e-10


@pytest.mark.parametrize("impl", ["numpy", pytest.param("numba", marks=needs_numba)])
def test_allpole_state_chaining(impl, rng):
    fn = getattr(kernels, f"allpole_filter_{impl}")
    coeffs = np.array([1.2, -0.6])
    exc = rng.standard_normal(300)
    whole, _ = fn(exc, coeffs, np.zeros(2))
    head, state = fn(exc[:117], coeffs, np.zeros(2))
    tail, _ = fn(exc[117:], coeffs, state)
    assert np.allclose(np.concatenate([head, tail]), whole, atol=1e-12)
    assert state.tolist() == [head[-1], head[-2]]


def test_allpole_order_zero():
    y, state = kernels.allpole_filter_numpy(np.arange(5.0), np.zeros(0), np.zeros(0))
    assert y.tolist() == [0.0, 1.0, 2.0, 3.0, 4.0] and state.size == 0


@pytest.mark.parametrize("impl", ["numpy", pytest.param("numba", marks=needs_numba)])
def test_cyclic_autocorr_against_scalar_sum(impl, rng):
    fn = getattr(kernels, f"cyclic_autocorr_lags_{impl}")
    x = rng.standard_normal(32)
    alpha_norm = 250.0 / 16000
    got = fn(x, alpha_norm)
    for tau in (0, 1, 5, 31):
        acc = 0j
        for n in range(tau, 32):
            acc += x[n] * x[n - tau] * np.exp(-2j * np.pi * alpha_norm * n)
        expected = np.exp(1j * np.pi * alpha_norm * tau) * acc / 32
        assert abs(got[tau] - expected) < 1e-12
