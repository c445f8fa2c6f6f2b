"""Hot numeric kernels, each with a numba loop body and a numpy twin.

The public names (``sc_reduce``, ``cyclic_autocorr_lags``, ``allpole_filter``,
``splitmix64_uniform``) are bound to the numba build when acceleration is
active and to the numpy twin otherwise, see :mod:`cycloscd._accel`.
"""

import numpy as np

from ._accel import compile_kernel, pick

# SplitMix64 constants (Steele, Lea & Flood 2014).
SM64_GAMMA = np.uint64(0x9E3779B97F4A7C15)
SM64_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
SM64_MUL2 = np.uint64(0x94D049BB133111EB)
_TWO_POW_M53 = 1.0 / 9007199254740992.0


# ---------------------------------------------------------------------------
# spectral-correlation reduction
# ---------------------------------------------------------------------------


def _sc_reduce_loops(spec, inv_n, inv_bins, inv_nalpha, col_sum, a_row, b_acc):
    # spec: (T, n_fft) DFT of frames modulated by exp(-j*pi*alpha*n/fs).
    # SC[t, k] = conj(spec[t, -k] * spec[t, k]) / N for one-sided k.
    n_frames, n_fft = spec.shape
    n_bins = n_fft // 2 + 1
    for t in range(n_frames):
        row_total = 0.0 + 0.0j
        for k in range(n_bins):
            kneg = (n_fft - k) % n_fft
            prod = spec[t, kneg] * spec[t, k]
            sc = complex(prod.real, -prod.imag) * inv_n
            col_sum[k] += sc
            row_total += sc
            b_acc[k, t] += sc * inv_nalpha
        a_row[t] = row_total * inv_bins


def sc_reduce_numpy(spec, inv_n, inv_bins, inv_nalpha, col_sum, a_row, b_acc):
    """Accumulate one cyclic frequency's SC into the three estimator outputs.

    ``col_sum`` receives the frame-sum of SC (the SCD column before 1/T),
    ``a_row`` is overwritten with the frequency mean per frame (SCD_a row) and
    ``b_acc`` receives SC scaled by ``inv_nalpha`` (running SCD_b mean).
    """
    n_fft = spec.shape[1]
    n_bins = n_fft // 2 + 1
    k = np.arange(n_bins)
    sc = np.conj(spec[:, (n_fft - k) % n_fft] * spec[:, :n_bins]) * inv_n
    col_sum += sc.sum(axis=0)
    a_row[:] = sc.sum(axis=1) * inv_bins
    b_acc += sc.T * inv_nalpha


sc_reduce_numba = compile_kernel(_sc_reduce_loops)
sc_reduce = pick(sc_reduce_numba, sc_reduce_numpy)


# ---------------------------------------------------------------------------
# cyclic autocorrelation for every lag of one frame
# ---------------------------------------------------------------------------


def _cyclic_autocorr_loops(frame, alpha_norm):
    n = frame.shape[0]
    out = np.zeros(n, dtype=np.complex128)
    carrier = np.empty(n, dtype=np.complex128)
    for i in range(n):
        ph = -2.0 * np.pi * alpha_norm * i
        carrier[i] = complex(np.cos(ph), np.sin(ph))
    for tau in range(n):
        acc = 0.0 + 0.0j
        for i in range(tau, n):
            acc += frame[i] * frame[i - tau] * carrier[i]
        ph0 = np.pi * alpha_norm * tau
        out[tau] = complex(np.cos(ph0), np.sin(ph0)) * acc / n
    return out


def cyclic_autocorr_lags_numpy(frame, alpha_norm):
    """Cyclic autocorrelation of ``frame`` at lags ``0..N-1``.

    ``alpha_norm`` is the cyclic frequency divided by the sample rate.
    """
    frame = np.asarray(frame, dtype=np.float64)
    n = frame.shape[0]
    idx = np.arange(n)
    carrier = np.exp(-2j * np.pi * alpha_norm * idx)
    out = np.empty(n, dtype=np.complex128)
    for tau in range(n):
        prod = frame[tau:] * frame[: n - tau] * carrier[tau:]
        out[tau] = np.exp(1j * np.pi * alpha_norm * tau) * prod.sum() / n
    return out


cyclic_autocorr_lags_numba = compile_kernel(_cyclic_autocorr_loops)
cyclic_autocorr_lags = pick(cyclic_autocorr_lags_numba, cyclic_autocorr_lags_numpy)


# ---------------------------------------------------------------------------
# all-pole synthesis filter y[n] = e[n] + sum_k a[k] y[n-k]
# ---------------------------------------------------------------------------


def _allpole_loops(excitation, coeffs, state):
    # state[i] holds y[-1-i]; a fresh state array is returned.
    p = coeffs.shape[0]
    n = excitation.shape[0]
    hist = np.zeros(p + n, dtype=np.float64)
    for i in range(p):
        hist[p - 1 - i] = state[i]
    for i in range(n):
        acc = excitation[i]
        for k in range(p):
            acc += coeffs[k] * hist[p + i - 1 - k]
        hist[p + i] = acc
    y = hist[p:].copy()
    new_state = np.empty(p, dtype=np.float64)
    for i in range(p):
        new_state[i] = hist[p + n - 1 - i]
    return y, new_state


def allpole_filter_numpy(excitation, coeffs, state):
    """Run ``1 / (1 - sum a_k z^-k)`` over ``excitation``.

    ``state[i]`` is the output ``i + 1`` samples before the block. Returns
    ``(y, new_state)`` in the same layout so blocks can be chained.
    """
    excitation = np.asarray(excitation, dtype=np.float64)
    coeffs = np.asarray(coeffs, dtype=np.float64)
    p = coeffs.shape[0]
    n = excitation.shape[0]
    hist = np.zeros(p + n)
    hist[:p] = np.asarray(state, dtype=np.float64)[::-1]
    rev = coeffs[::-1]
    for i in range(n):
        hist[p + i] = excitation[i] + np.dot(rev, hist[i : p + i])
    return hist[p:].copy(), hist[n:][::-1].copy()


allpole_filter_numba = compile_kernel(_allpole_loops)
allpole_filter = pick(allpole_filter_numba, allpole_filter_numpy)


# ---------------------------------------------------------------------------
# SplitMix64 uniform stream (counter form)
# ---------------------------------------------------------------------------


def _splitmix64_loops(seed, n):
    out = np.empty(n, dtype=np.float64)
    state = np.uint64(seed)
    for i in range(n):
        state = state + SM64_GAMMA
        z = state
        z = (z ^ (z >> np.uint64(30))) * SM64_MUL1
        z = (z ^ (z >> np.uint64(27))) * SM64_MUL2
        z = z ^ (z >> np.uint64(31))
        out[i] = np.float64(z >> np.uint64(11)) * _TWO_POW_M53
    return out


def splitmix64_uniform_numpy(seed, n):
    """``n`` uniforms in [0, 1) from SplitMix64 started at ``seed``.

    Output ``i`` mixes the counter ``seed + (i + 1) * GAMMA`` (mod 2**64) and
    keeps the top 53 bits.
    """
    counters = np.arange(1, n + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed) + counters * SM64_GAMMA
        z = (z ^ (z >> np.uint64(30))) * SM64_MUL1
        z = (z ^ (z >> np.uint64(27))) * SM64_MUL2
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * _TWO_POW_M53


splitmix64_uniform_numba = compile_kernel(_splitmix64_loops)
_splitmix64_impl = pick(splitmix64_uniform_numba, splitmix64_uniform_numpy)


def splitmix64_uniform(seed, n):
    # seeds are reduced mod 2**64 and passed as uint64 so numba never sees an int64 overflow
    return _splitmix64_impl(np.uint64(int(seed) % (1 << 64)), int(n))
