"""Audio ingestion, framing, windows and the DFT shared by every estimator."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    AllSilentError,
    EmptyAudioError,
    NotAWavError,
    SignalTooShortError,
    UnsupportedEncodingError,
)

WINDOW_KINDS = ("hamming", "hann", "rectangular")

PCM16_SCALE = 32768.0


@dataclass(frozen=True)
class AudioSignal:
    """Mono audio: float samples (nominally in [-1, 1]) and an integer rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be a positive integer, got {self.sample_rate!r}")
        samples = np.array(self.samples, dtype=np.float64, copy=True).reshape(-1)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate

    def scaled(self, gain: float) -> "AudioSignal":
        return AudioSignal(self.samples * gain, self.sample_rate)


@dataclass(frozen=True)
class AnalysisConfig:
    """Framing, window, DFT and cyclic-frequency grid parameters.

    ``frame_len`` and ``hop`` are in samples, ``alpha_max`` in Hz. The sample
    rate is not part of the config; checks that need it (``alpha_max`` below
    Nyquist) happen where a signal is available, see :meth:`check_rate`.
    """

    frame_len: int
    hop: int
    n_fft: int = 512
    window: str = "hamming"
    alpha_max: float = 2000.0
    n_alpha: int = 257

    def __post_init__(self):
        if not (0 < self.hop <= self.frame_len <= self.n_fft):
            raise ValueError(
                "need 0 < hop <= frame_len <= n_fft, got "
                f"hop={self.hop}, frame_len={self.frame_len}, n_fft={self.n_fft}"
            )
        if self.window not in WINDOW_KINDS:
            raise ValueError(f"window must be one of {WINDOW_KINDS}, got {self.window!r}")
        if self.alpha_max < 0:
            raise ValueError(f"alpha_max must be >= 0, got {self.alpha_max}")
        if self.n_alpha < 1:
            raise ValueError(f"n_alpha must be >= 1, got {self.n_alpha}")

    @classmethod
    def from_ms(
        cls,
        sample_rate: int,
        frame_ms: float = 25.0,
        hop_ms: float = 10.0,
        n_fft: int = 512,
        window: str = "hamming",
        alpha_max: float = 2000.0,
        n_alpha: int = 257,
    ) -> "AnalysisConfig":
        frame_len = int(round(frame_ms * 1e-3 * sample_rate))
        hop = int(round(hop_ms * 1e-3 * sample_rate))
        return cls(frame_len, hop, n_fft, window, float(alpha_max), n_alpha)

    @property
    def n_bins(self) -> int:
        return self.n_fft // 2 + 1

    def check_rate(self, sample_rate: int) -> None:
        if self.alpha_max > sample_rate / 2:
            raise ValueError(
                f"alpha_max={self.alpha_max} Hz exceeds Nyquist ({sample_rate / 2} Hz)"
            )

    def n_frames(self, n_samples: int) -> int:
        if n_samples < self.frame_len:
            return 0
        return (n_samples - self.frame_len) // self.hop + 1


# ---------------------------------------------------------------------------
# WAV I/O
# ---------------------------------------------------------------------------


def _iter_chunks(blob: bytes):
    pos = 12
    while pos + 8 <= len(blob):
        cid, size = struct.unpack_from("<4sI", blob, pos)
        body = blob[pos + 8 : pos + 8 + size]
        yield cid, size, body
        pos += 8 + size + (size & 1)


def parse_wav_bytes(blob: bytes) -> AudioSignal:
    """Decode a RIFF/WAVE, PCM 16-bit, mono byte string."""
    if len(blob) < 12 or blob[:4] != b"RIFF" or blob[8:12] != b"WAVE":
        magic = blob[:4].decode("latin-1", "replace")
        raise NotAWavError(f"not a RIFF/WAVE file (magic {magic!r})")
    fmt = None
    data = None
    for cid, size, body in _iter_chunks(blob):
        if cid == b"fmt ":
            if len(body) < 16:
                raise NotAWavError("fmt chunk shorter than 16 bytes")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif cid == b"data":
            if len(body) < size:
                raise NotAWavError(f"data chunk truncated: header says {size} bytes, found {len(body)}")
            data = body
            break
    if fmt is None:
        raise NotAWavError("missing fmt chunk")
    if data is None:
        raise NotAWavError("missing data chunk")
    audio_format, channels, rate, _, _, bits = fmt
    if audio_format != 1:
        raise UnsupportedEncodingError(f"audio_format={audio_format}, only PCM (1) is supported")
    if channels != 1:
        raise UnsupportedEncodingError(f"channels={channels}, only mono is supported")
    if bits != 16:
        raise UnsupportedEncodingError(f"bits_per_sample={bits}, only 16 is supported")
    if rate == 0:
        raise UnsupportedEncodingError("sample_rate=0 in fmt chunk")
    n = len(data) // 2
    if n == 0:
        raise EmptyAudioError("data chunk holds no samples")
    pcm = np.frombuffer(data[: 2 * n], dtype="<i2")
    return AudioSignal(pcm.astype(np.float64) / PCM16_SCALE, rate)


def load_wav(path) -> AudioSignal:
    """Read a PCM16 mono WAV file; samples are divided by 32768."""
    blob = Path(path).read_bytes()
    return parse_wav_bytes(blob)


def to_pcm16(samples) -> np.ndarray:
    """Quantise float samples to int16, clipping at full scale."""
    q = np.round(np.asarray(samples, dtype=np.float64) * PCM16_SCALE)
    return np.clip(q, -32768, 32767).astype("<i2")


def wav_bytes(signal: AudioSignal) -> bytes:
    payload = to_pcm16(signal.samples).tobytes()
    rate = signal.sample_rate
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(payload),
        b"WAVE",
        b"fmt ",
        16,
        1,
        1,
        rate,
        rate * 2,
        2,
        16,
        b"data",
        len(payload),
    )
    pad = b"\x00" if len(payload) & 1 else b""
    return header + payload + pad


def write_wav(path, signal: AudioSignal) -> None:
    Path(path).write_bytes(wav_bytes(signal))


# ---------------------------------------------------------------------------
# framing, windows, DFT
# ---------------------------------------------------------------------------


def window_coefficients(kind: str, n: int) -> np.ndarray:
    """Symmetric window of length ``n`` (``n >= 2``)."""
    if n < 2:
        raise ValueError(f"window length must be >= 2, got {n}")
    idx = np.arange(n)
    if kind == "hamming":
        return 0.54 - 0.46 * np.cos(2.0 * np.pi * idx / (n - 1))
    if kind == "hann":
        return 0.5 * (1.0 - np.cos(2.0 * np.pi * idx / (n - 1)))
    if kind == "rectangular":
        return np.ones(n)
    raise ValueError(f"unknown window kind {kind!r}")


def frame_signal(signal: AudioSignal, cfg: AnalysisConfig) -> np.ndarray:
    """Split into a (T, frame_len) matrix; frame t starts at sample t*hop.

    A trailing remainder shorter than ``frame_len`` is dropped.
    """
    x = signal.samples
    if len(x) < cfg.frame_len:
        raise SignalTooShortError(
            f"signal has {len(x)} samples, fewer than frame_len={cfg.frame_len}"
        )
    view = np.lib.stride_tricks.sliding_window_view(x, cfg.frame_len)
    return view[:: cfg.hop].copy()


def windowed_frames(signal: AudioSignal, cfg: AnalysisConfig) -> np.ndarray:
    return frame_signal(signal, cfg) * window_coefficients(cfg.window, cfg.frame_len)


def dft(frame, n_fft: int) -> np.ndarray:
    """Full-length DFT of ``frame`` zero-padded to ``n_fft``."""
    frame = np.asarray(frame)
    if frame.shape[-1] > n_fft:
        raise ValueError(f"frame length {frame.shape[-1]} exceeds n_fft={n_fft}")
    return np.fft.fft(frame, n_fft)


def idft(spectrum) -> np.ndarray:
    return np.fft.ifft(spectrum)


def stft(signal: AudioSignal, cfg: AnalysisConfig) -> np.ndarray:
    """One-sided STFT, shape (T, n_fft // 2 + 1)."""
    return np.fft.rfft(windowed_frames(signal, cfg), cfg.n_fft, axis=-1)


def periodograms(signal: AudioSignal, cfg: AnalysisConfig) -> np.ndarray:
    """Per-frame |X(t, f)|^2 / N, shape (T, n_fft // 2 + 1)."""
    return np.abs(stft(signal, cfg)) ** 2 / cfg.frame_len


def frequency_axis(cfg: AnalysisConfig, sample_rate: int) -> np.ndarray:
    return np.arange(cfg.n_bins) * (sample_rate / cfg.n_fft)


# ---------------------------------------------------------------------------
# silence trimming
# ---------------------------------------------------------------------------


def trim_silence(
    signal: AudioSignal, cfg: AnalysisConfig, threshold_db: float = -40.0
) -> AudioSignal:
    """Drop low-energy blocks.

    The signal is cut into consecutive, non-overlapping blocks of
    ``cfg.frame_len`` samples (a trailing partial block is discarded). Blocks
    whose energy exceeds the loudest block's energy by ``threshold_db`` are
    kept and concatenated in order. Non-overlapping blocks make the operation
    idempotent.
    """
    if threshold_db >= 0:
        raise ValueError(f"threshold_db must be negative, got {threshold_db}")
    n = cfg.frame_len
    n_blocks = len(signal) // n
    if n_blocks == 0:
        raise SignalTooShortError(f"signal has {len(signal)} samples, fewer than frame_len={n}")
    blocks = signal.samples[: n_blocks * n].reshape(n_blocks, n)
    energy = np.einsum("ij,ij->i", blocks, blocks)
    floor = energy.max() * 10.0 ** (threshold_db / 10.0)
    keep = energy > floor
    if not keep.any():
        raise AllSilentError("no frame exceeds the silence threshold")
    return AudioSignal(blocks[keep].reshape(-1), signal.sample_rate)
