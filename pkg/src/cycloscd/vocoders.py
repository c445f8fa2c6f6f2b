"""Sinusoidal and LPC analysis/resynthesis, overlap-add and SCD difference maps."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .dsp import AnalysisConfig, AudioSignal, frame_signal, window_coefficients
from .errors import ShapeMismatchError, SignalTooShortError, UnstableModelError
from .scd import ScdMap, TemporalScdMap
from .synthgen import gen_white_noise

POLE_RADIUS_LIMIT = 1.0 - 1e-9


def vocoder_config(sample_rate: int, n_fft: int = 512, window: str = "hamming") -> AnalysisConfig:
    """20 ms Hamming frames, 10 ms hop (50 % overlap)."""
    return AnalysisConfig.from_ms(sample_rate, 20.0, 10.0, n_fft=n_fft, window=window)


# ---------------------------------------------------------------------------
# sinusoidal model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SinusoidSet:
    """Rows of (amplitude, frequency Hz, phase rad); sample n = sum A sin(2 pi f n / fs + phi)."""

    amplitudes: np.ndarray
    frequencies: np.ndarray
    phases: np.ndarray

    def __len__(self) -> int:
        return self.amplitudes.shape[0]

    @classmethod
    def empty(cls) -> "SinusoidSet":
        z = np.zeros(0)
        return cls(z, z.copy(), z.copy())


def sinusoidal_analyze(
    frame,
    cfg: AnalysisConfig,
    sample_rate: int,
    max_peaks: int = 60,
    floor_db: float = -50.0,
) -> SinusoidSet:
    """Pick spectral peaks of a windowed frame.

    Peaks are local maxima of the one-sided magnitude spectrum within
    ``floor_db`` of the largest bin. Each peak frequency is refined by a
    parabola through the three log-magnitude bins around it. Amplitude and
    phase come from the frame's DTFT at the refined frequency, with the
    window's coherent gain divided out. The phase is measured at the frame
    centre and carried back to sample 0.
    """
    frame = np.asarray(frame, dtype=np.float64)
    n = frame.shape[0]
    win = window_coefficients(cfg.window, n) if n >= 2 else np.ones(n)
    coherent = win.sum()
    spec = np.fft.rfft(frame, cfg.n_fft)
    mag = np.abs(spec)
    top = mag.max() if mag.size else 0.0
    if top <= 0.0:
        return SinusoidSet.empty()
    interior = mag[1:-1]
    is_peak = (interior > mag[:-2]) & (interior >= mag[2:]) & (interior > top * 10.0 ** (floor_db / 20.0))
    bins = np.flatnonzero(is_peak) + 1
    if bins.size == 0:
        return SinusoidSet.empty()
    bins = bins[np.argsort(mag[bins])[::-1][:max_peaks]]
    bins.sort()

    db = 20.0 * np.log10(np.maximum(mag, top * 1e-15))
    left, mid, right = db[bins - 1], db[bins], db[bins + 1]
    denom = left - 2.0 * mid + right
    offset = np.where(denom < 0, 0.5 * (left - right) / np.where(denom < 0, denom, 1.0), 0.0)
    freqs = (bins + offset) * sample_rate / cfg.n_fft

    centre = (n - 1) / 2.0
    t = np.arange(n) - centre
    kern = np.exp(-2j * np.pi * np.outer(freqs, t) / sample_rate)
    values = kern @ frame
    amps = 2.0 * np.abs(values) / coherent
    # cos phase at sample 0, then shifted to the sine convention
    phases = np.angle(values) - 2.0 * np.pi * freqs * centre / sample_rate + np.pi / 2.0
    phases = np.angle(np.exp(1j * phases))

    keep = (freqs > 0) & (freqs < sample_rate / 2) & (amps > 0)
    return SinusoidSet(amps[keep], freqs[keep], phases[keep])


def sinusoidal_synthesize(components: SinusoidSet, n: int, sample_rate: int) -> np.ndarray:
    idx = np.arange(n)
    if len(components) == 0:
        return np.zeros(n)
    arg = 2.0 * np.pi * np.outer(components.frequencies, idx) / sample_rate + components.phases[:, None]
    return components.amplitudes @ np.sin(arg)


# ---------------------------------------------------------------------------
# LPC
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LpcModel:
    """All-pole model, prediction s_hat[n] = sum_k a_k s[n-k], H(z) = g / (1 - sum a_k z^-k)."""

    coefficients: np.ndarray
    gain: float

    @property
    def order(self) -> int:
        return self.coefficients.shape[0]

    def poles(self) -> np.ndarray:
        if self.order == 0:
            return np.zeros(0, dtype=complex)
        return np.roots(np.concatenate(([1.0], -self.coefficients)))

    def is_stable(self, limit: float = POLE_RADIUS_LIMIT) -> bool:
        return bool(np.all(np.abs(self.poles()) <= limit))


@dataclass(frozen=True)
class VoicingInfo:
    voiced: bool
    period: int | None
    confidence: float


def biased_autocorrelation(x, max_lag: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    full = np.correlate(x, x, mode="full")[n - 1 :]
    out = np.zeros(max_lag + 1)
    m = min(max_lag + 1, n)
    out[:m] = full[:m] / n
    return out


def levinson_durbin(r, order: int):
    """Solve the normal equations for ``order`` predictor coefficients.

    Returns ``(a, error_power, reflection)``. Reflection coefficients are
    clamped to (-1, 1), so the recursion cannot blow up on near-singular input.
    """
    r = np.asarray(r, dtype=np.float64)
    a = np.zeros(order)
    refl = np.zeros(order)
    err = r[0]
    for i in range(order):
        if err <= r[0] * 1e-15:
            break
        k = (r[i + 1] - np.dot(a[:i], r[i:0:-1])) / err
        k = float(np.clip(k, -POLE_RADIUS_LIMIT, POLE_RADIUS_LIMIT))
        refl[i] = k
        prev = a[:i].copy()
        a[:i] = prev - k * prev[::-1]
        a[i] = k
        err *= 1.0 - k * k
    return a, err, refl


def lpc_analyze(frame, order: int = 20) -> LpcModel:
    """Autocorrelation-method LPC of a windowed frame.

    ``gain`` is the square root of the final prediction-error power. If the
    estimated poles end up outside radius ``1 - 1e-9`` the coefficients are
    bandwidth-expanded (``a_k *= g**k``) just enough to pull them inside.
    """
    frame = np.asarray(frame, dtype=np.float64)
    if frame.shape[0] <= order:
        raise SignalTooShortError(f"frame of {frame.shape[0]} samples cannot fit order {order}")
    r = biased_autocorrelation(frame, order)
    if r[0] <= 0.0:
        return LpcModel(np.zeros(order), 0.0)
    a, err, _ = levinson_durbin(r, order)
    model = LpcModel(a, float(np.sqrt(max(err, 0.0))))
    if order and not model.is_stable():
        radius = np.abs(model.poles()).max()
        shrink = POLE_RADIUS_LIMIT / radius * (1.0 - 1e-12)
        model = replace(model, coefficients=a * shrink ** np.arange(1, order + 1))
    return model


def lpc_residual(x, model: LpcModel) -> np.ndarray:
    """Inverse-filter ``x`` with ``1 - sum a_k z^-k`` (zero initial state)."""
    x = np.asarray(x, dtype=np.float64)
    fir = np.concatenate(([1.0], -model.coefficients))
    return np.convolve(x, fir)[: x.shape[0]]


def voicing_decision(
    residual,
    sample_rate: int,
    f0_min: float = 60.0,
    f0_max: float = 400.0,
    threshold: float = 0.3,
) -> VoicingInfo:
    """Pitch/voicing from the normalised autocorrelation of an LPC residual.

    Lags ``floor(fs / f0_max) .. ceil(fs / f0_min)`` are searched; the frame is
    voiced when the largest normalised value reaches ``threshold``.
    """
    residual = np.asarray(residual, dtype=np.float64)
    lo = int(np.floor(sample_rate / f0_max))
    hi = int(np.ceil(sample_rate / f0_min))
    if residual.shape[0] < hi:
        raise SignalTooShortError(f"residual of {residual.shape[0]} samples is shorter than max lag {hi}")
    r = biased_autocorrelation(residual, hi)
    if r[0] <= 0.0:
        return VoicingInfo(False, None, 0.0)
    norm = r[lo : hi + 1] / r[0]
    best = int(np.argmax(norm))
    peak = float(np.clip(norm[best], 0.0, 1.0))
    if peak >= threshold:
        return VoicingInfo(True, lo + best, peak)
    return VoicingInfo(False, None, peak)


def _excitation(voicing: VoicingInfo, n: int, seed: int, first_pulse: int = 0) -> np.ndarray:
    if voicing.voiced:
        exc = np.zeros(n)
        exc[first_pulse::voicing.period] = np.sqrt(voicing.period)
        return exc
    return gen_white_noise(n, seed)


def lpc_synthesize_frame(
    model: LpcModel,
    voicing: VoicingInfo,
    n: int,
    seed: int = 0,
    state=None,
    first_pulse: int = 0,
    return_state: bool = False,
):
    """Drive ``H(z)`` with an impulse train (voiced) or seeded noise (unvoiced).

    Both excitations have unit mean power, so the output power is about
    ``gain**2 * sum h**2``, which for an autocorrelation-method model equals
    the analysed frame power. ``state`` holds the last ``order`` outputs of a
    preceding block (most recent first); pass ``return_state=True`` to chain.
    """
    if not model.is_stable():
        raise UnstableModelError("synthesis filter has poles on or outside the unit circle")
    exc = _excitation(voicing, n, seed, first_pulse) * model.gain
    zi = np.zeros(model.order) if state is None else np.asarray(state, dtype=np.float64)
    y, zf = kernels.allpole_filter(exc, model.coefficients, zi)
    return (y, zf) if return_state else y


# ---------------------------------------------------------------------------
# utterance resynthesis
# ---------------------------------------------------------------------------


def overlap_add(frames, window, hop: int, length: int) -> np.ndarray:
    """Weighted overlap-add ``sum_t w y_t / sum_t w``; zero where no frame lands."""
    frames = np.asarray(frames, dtype=np.float64)
    n_frames, n = frames.shape
    out = np.zeros(length)
    env = np.zeros(length)
    for t in range(n_frames):
        start = t * hop
        out[start : start + n] += window * frames[t]
        env[start : start + n] += window
    covered = env > 0
    out[covered] /= env[covered]
    return out


def _lpc_frames(frames, win, cfg, sample_rate, order, seed):
    n_frames, n = frames.shape
    hop = cfg.hop
    power_comp = 1.0 / np.sqrt(np.mean(win**2))
    out = np.empty((n_frames, n))
    state = np.zeros(order)
    pulse_ref = None  # absolute index of a pulse on the running grid
    for t in range(n_frames):
        start = t * hop
        model = lpc_analyze(frames[t] * win, order)
        model = replace(model, gain=model.gain * power_comp)
        voicing = voicing_decision(lpc_residual(frames[t], model), sample_rate)
        first = 0
        if voicing.voiced:
            if pulse_ref is None:
                pulse_ref = start
            first = (pulse_ref - start) % voicing.period
            pulses = start + first + voicing.period * np.arange((n - 1 - first) // voicing.period + 1)
            before_next = pulses[pulses < start + hop]
            pulse_ref = int(before_next[-1]) if before_next.size else int(pulses[0])
        else:
            pulse_ref = None
        exc = _excitation(voicing, n, seed + t, first) * model.gain
        head, mid_state = kernels.allpole_filter(exc[:hop], model.coefficients, state)
        tail, _ = kernels.allpole_filter(exc[hop:], model.coefficients, mid_state)
        out[t, :hop] = head
        out[t, hop:] = tail
        state = mid_state
    return out


def resynthesize_utterance(
    signal: AudioSignal,
    method: str,
    cfg: AnalysisConfig | None = None,
    order: int = 20,
    max_peaks: int = 60,
    seed: int = 0,
) -> AudioSignal:
    """Frame-wise analysis/resynthesis joined by window-normalised overlap-add.

    ``method`` is ``"sinusoidal"`` or ``"lpc"``. The output has the input's
    length; samples after the last full frame are zero.
    """
    if cfg is None:
        cfg = vocoder_config(signal.sample_rate)
    fs = signal.sample_rate
    frames = frame_signal(signal, cfg)
    win = window_coefficients(cfg.window, cfg.frame_len)
    if method == "sinusoidal":
        synth = np.stack(
            [
                sinusoidal_synthesize(sinusoidal_analyze(fr * win, cfg, fs, max_peaks), cfg.frame_len, fs)
                for fr in frames
            ]
        )
    elif method == "lpc":
        synth = _lpc_frames(frames, win, cfg, fs, order, seed)
    else:
        raise ValueError(f"method must be 'sinusoidal' or 'lpc', got {method!r}")
    return AudioSignal(overlap_add(synth, win, cfg.hop, len(signal)), fs)


# ---------------------------------------------------------------------------
# difference maps
# ---------------------------------------------------------------------------

ABSOLUTE = "absolute"
RELATIVE = "relative"


@dataclass(frozen=True)
class DiffMap:
    data: np.ndarray
    mode: str


def _payload(m):
    if isinstance(m, (ScdMap, TemporalScdMap)):
        return m.data
    return np.asarray(m)


def scd_difference_map(reference, test, mode: str = ABSOLUTE) -> DiffMap:
    """Signed magnitude difference ``|ref| - |test|``, optionally relative to ``|ref|``."""
    if type(reference) is not type(test):
        raise ShapeMismatchError(f"cannot compare {type(reference).__name__} with {type(test).__name__}")
    ref = np.abs(_payload(reference))
    tst = np.abs(_payload(test))
    if ref.shape != tst.shape:
        raise ShapeMismatchError(f"shape {ref.shape} != {tst.shape}")
    if isinstance(reference, ScdMap):
        if not (np.array_equal(reference.f_axis, test.f_axis) and np.array_equal(reference.alpha_axis, test.alpha_axis)):
            raise ShapeMismatchError("maps use different frequency or cyclic-frequency axes")
    elif isinstance(reference, TemporalScdMap):
        if reference.axis_kind != test.axis_kind or not np.array_equal(reference.axis, test.axis):
            raise ShapeMismatchError("temporal maps use different axes")
    diff = ref - tst
    if mode == ABSOLUTE:
        return DiffMap(diff, mode)
    if mode == RELATIVE:
        eps = 1e-12 * ref.max() if ref.size else 0.0
        eps = max(eps, np.finfo(float).tiny)
        return DiffMap(diff / (ref + eps), mode)
    raise ValueError(f"mode must be 'absolute' or 'relative', got {mode!r}")
