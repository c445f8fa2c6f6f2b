"""Spectral correlation estimators.

Everything here works on the quadrant ``f >= 0``, ``alpha >= 0``. A frame's
spectral correlation at cyclic frequency ``alpha`` is

    SC(f, alpha, t) = X(f - alpha/2, t) * conj(X(f + alpha/2, t)) / N

where the half-shifted spectra are DFTs of the windowed frame multiplied by
``exp(+j*pi*alpha*n/fs)`` and ``exp(-j*pi*alpha*n/fs)`` respectively, ``n``
counting samples inside the frame. The ``1/N`` factor turns the
``alpha = 0`` slice into the ordinary periodogram.

Bins where ``f +- alpha/2`` crosses Nyquist hold circularly wrapped content;
they are kept as computed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .dsp import AnalysisConfig, AudioSignal, frequency_axis, windowed_frames

CYCLIC = "cyclic"
SPECTRAL = "spectral"


@dataclass(frozen=True)
class ScdMap:
    """Time-averaged SCD, shape (n_fft // 2 + 1, n_alpha): rows f, columns alpha."""

    data: np.ndarray
    f_axis: np.ndarray
    alpha_axis: np.ndarray

    @property
    def shape(self):
        return self.data.shape


@dataclass(frozen=True)
class TemporalScdMap:
    """Per-frame SCD marginal, shape (axis size, T).

    ``axis_kind`` is ``"cyclic"`` for SCD_a (rows are alpha values) and
    ``"spectral"`` for SCD_b (rows are f values).
    """

    data: np.ndarray
    axis: np.ndarray
    axis_kind: str

    @property
    def shape(self):
        return self.data.shape

    @property
    def n_frames(self) -> int:
        return self.data.shape[1]


def cyclic_grid(cfg: AnalysisConfig) -> np.ndarray:
    """``n_alpha`` uniformly spaced cyclic frequencies on ``[0, alpha_max]``."""
    if cfg.n_alpha == 1:
        return np.zeros(1)
    if cfg.alpha_max <= 0:
        raise ValueError("alpha_max must be > 0 when n_alpha > 1")
    return np.linspace(0.0, cfg.alpha_max, cfg.n_alpha)


def _check_alpha(alpha: float, sample_rate: int) -> None:
    if not 0.0 <= alpha <= sample_rate / 2:
        raise ValueError(f"alpha={alpha} Hz outside [0, {sample_rate / 2}]")


def spectral_correlation_frame(
    frame,
    alpha: float,
    cfg: AnalysisConfig,
    sample_rate: int,
    swap_shifts: bool = False,
) -> np.ndarray:
    """One-sided SC of an already windowed frame at a single cyclic frequency.

    With ``swap_shifts`` the two half-shifted spectra trade places, which for a
    real frame yields the complex conjugate.
    """
    _check_alpha(alpha, sample_rate)
    frame = np.asarray(frame, dtype=np.float64)
    n = frame.shape[0]
    n_bins = cfg.n_fft // 2 + 1
    if alpha == 0.0:
        spec = np.fft.rfft(frame, cfg.n_fft)
        return (spec.real**2 + spec.imag**2).astype(np.complex128) / n
    phase = np.pi * alpha * np.arange(n) / sample_rate
    lower = np.fft.fft(frame * np.exp(1j * phase), cfg.n_fft)[:n_bins]
    upper = np.fft.fft(frame * np.exp(-1j * phase), cfg.n_fft)[:n_bins]
    if swap_shifts:
        lower, upper = upper, lower
    return lower * np.conj(upper) / n


def _estimate(signal: AudioSignal, cfg: AnalysisConfig, alphas: np.ndarray):
    """Shared pass over frames and cyclic frequencies.

    Returns ``(scd, scd_a, scd_b)`` with shapes (n_bins, A), (A, T), (n_bins, T).
    """
    frames = windowed_frames(signal, cfg)
    n_frames, n = frames.shape
    n_bins = cfg.n_fft // 2 + 1
    n_alpha = alphas.shape[0]
    inv_n = 1.0 / n
    inv_bins = 1.0 / n_bins
    inv_nalpha = 1.0 / n_alpha

    scd = np.zeros((n_bins, n_alpha), dtype=np.complex128)
    scd_a = np.zeros((n_alpha, n_frames), dtype=np.complex128)
    scd_b = np.zeros((n_bins, n_frames), dtype=np.complex128)
    col = np.zeros(n_bins, dtype=np.complex128)
    idx = np.arange(n)
    for j, alpha in enumerate(alphas):
        if alpha == 0.0:
            spec = np.fft.rfft(frames, cfg.n_fft, axis=1)
            sc = (spec.real**2 + spec.imag**2) * inv_n
            scd[:, j] = sc.sum(axis=0) / n_frames
            scd_a[j] = sc.sum(axis=1) * inv_bins
            scd_b += sc.T * inv_nalpha
            continue
        carrier = np.exp(-1j * np.pi * alpha * idx / signal.sample_rate)
        spec = np.fft.fft(frames * carrier, cfg.n_fft, axis=1)
        col[:] = 0.0
        kernels.sc_reduce(spec, inv_n, inv_bins, inv_nalpha, col, scd_a[j], scd_b)
        scd[:, j] = col / n_frames
    return scd, scd_a, scd_b


def _prepare(signal: AudioSignal, cfg: AnalysisConfig) -> np.ndarray:
    cfg.check_rate(signal.sample_rate)
    return cyclic_grid(cfg)


def scd_map(signal: AudioSignal, cfg: AnalysisConfig) -> ScdMap:
    """Time-smoothed SCD: the frame average of SC over the alpha grid."""
    alphas = _prepare(signal, cfg)
    scd, _, _ = _estimate(signal, cfg, alphas)
    return ScdMap(scd, frequency_axis(cfg, signal.sample_rate), alphas)


def scd_a(signal: AudioSignal, cfg: AnalysisConfig) -> TemporalScdMap:
    """SCD_a(alpha, t): SC averaged over the one-sided frequency bins."""
    alphas = _prepare(signal, cfg)
    _, a, _ = _estimate(signal, cfg, alphas)
    return TemporalScdMap(a, alphas, CYCLIC)


def scd_b(signal: AudioSignal, cfg: AnalysisConfig) -> TemporalScdMap:
    """SCD_b(f, t): SC averaged over the cyclic frequency grid."""
    alphas = _prepare(signal, cfg)
    _, _, b = _estimate(signal, cfg, alphas)
    return TemporalScdMap(b, frequency_axis(cfg, signal.sample_rate), SPECTRAL)


def scd_all(signal: AudioSignal, cfg: AnalysisConfig):
    """All three representations from one pass: ``(ScdMap, SCD_a, SCD_b)``."""
    alphas = _prepare(signal, cfg)
    scd, a, b = _estimate(signal, cfg, alphas)
    f_axis = frequency_axis(cfg, signal.sample_rate)
    return (
        ScdMap(scd, f_axis, alphas),
        TemporalScdMap(a, alphas, CYCLIC),
        TemporalScdMap(b, f_axis, SPECTRAL),
    )


def marginal_profiles(scd: ScdMap):
    """``(scd_alpha, scd_f)``: mean magnitude over f and over alpha."""
    mag = np.abs(scd.data)
    return mag.mean(axis=0), mag.mean(axis=1)


# ---------------------------------------------------------------------------
# direct (lag-domain) oracles
# ---------------------------------------------------------------------------


def cyclic_autocorrelation(frame, tau: int, alpha: float, sample_rate: float) -> complex:
    """Cyclic autocorrelation of one frame at lag ``tau`` (samples).

    ``exp(j*pi*alpha*tau/fs) / N * sum_{n=tau}^{N-1} x[n] x[n-tau] exp(-j*2*pi*alpha*n/fs)``
    """
    x = np.asarray(frame, dtype=np.float64)
    n = x.shape[0]
    if not 0 <= tau < n:
        raise ValueError(f"tau={tau} outside [0, {n - 1}]")
    idx = np.arange(tau, n)
    terms = x[tau:] * x[: n - tau] * np.exp(-2j * np.pi * alpha * idx / sample_rate)
    return complex(np.exp(1j * np.pi * alpha * tau / sample_rate) * terms.sum() / n)


def scd_direct_oracle(frame, alpha: float, cfg: AnalysisConfig, sample_rate: int) -> np.ndarray:
    """Lag-domain SCD of one frame on the one-sided DFT grid. O(N^2).

    Computes the cyclic autocorrelation at every lag, extends it to negative
    lags (for a real frame it is even in the lag) and takes the Fourier sum
    over ``tau in [-(N-1), N-1]``. The lag sequence is conjugated before the
    sum so the result shares the ``X(f - a/2) X*(f + a/2)`` ordering used by
    :func:`spectral_correlation_frame`; without it the two would be complex
    conjugates of one another.
    """
    frame = np.asarray(frame, dtype=np.float64)
    n = frame.shape[0]
    r = kernels.cyclic_autocorr_lags(frame, alpha / sample_rate)
    lags = np.arange(-(n - 1), n)
    seq = np.conj(r[np.abs(lags)])
    k = np.arange(cfg.n_fft // 2 + 1)
    basis = np.exp(-2j * np.pi * np.outer(k, lags) / cfg.n_fft)
    return basis @ seq
