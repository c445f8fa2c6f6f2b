"""Feature extraction and the CYCF feature container.

CYCF layout (little-endian, 36-byte header then payload)::

    offset  type     field
    0       4s       magic "CYCF"
    4       u16      version (1)
    6       u8       kind (0=scd, 1=scd_a, 2=scd_b, 3=stft)
    7       u8       flags (bit 0: log-compressed)
    8       u32      rows
    12      u32      cols
    16      f32      sample rate (Hz)
    20      f32      alpha_max (Hz)
    24      u32      frame_len
    28      u32      hop
    32      u32      n_fft
    36      f32[rows*cols]  row-major payload
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import scd as scd_mod
from .dsp import AnalysisConfig, AudioSignal, stft
from .errors import BadMagicError, FeatureFileError, TruncatedPayloadError, VersionUnsupportedError

KINDS = ("scd", "scd_a", "scd_b", "stft")

# alpha_max (Hz) per representation
DEFAULT_ALPHA_MAX = {"scd": 2000.0, "scd_a": 2500.0, "scd_b": 500.0, "stft": 0.0}

MAGIC = b"CYCF"
VERSION = 1
HEADER = struct.Struct("<4sHBBIIffIII")
FLAG_LOG = 0x01
LOG_FLOOR = 1e-10


@dataclass(frozen=True)
class FeatureMeta:
    sample_rate: float
    alpha_max: float
    frame_len: int
    hop: int
    n_fft: int
    log_compressed: bool = False

    def __post_init__(self):
        # the container stores these as f32
        object.__setattr__(self, "sample_rate", float(np.float32(self.sample_rate)))
        object.__setattr__(self, "alpha_max", float(np.float32(self.alpha_max)))


@dataclass(frozen=True)
class FeatureMatrix:
    """Real feature matrix; rows are the frequency-like axis."""

    data: np.ndarray
    kind: str
    meta: FeatureMeta

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if np.asarray(self.data).ndim != 2:
            raise ValueError("feature data must be 2-D")

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def astype(self, dtype) -> "FeatureMatrix":
        return replace(self, data=np.asarray(self.data, dtype=dtype))


def feature_config(kind: str, sample_rate: int, **overrides) -> AnalysisConfig:
    """Default framing (25 ms / 10 ms / 512-point Hamming) with the kind's alpha_max."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    params = {"alpha_max": DEFAULT_ALPHA_MAX[kind], **overrides}
    return AnalysisConfig.from_ms(sample_rate, **params)


def fix_frames(data: np.ndarray, n_frames: int) -> np.ndarray:
    """Crop to the first ``n_frames`` columns or repeat columns cyclically from column 0."""
    if n_frames < 1:
        raise ValueError(f"fixed_frames must be >= 1, got {n_frames}")
    cols = data.shape[1]
    if cols >= n_frames:
        return data[:, :n_frames].copy()
    return data[:, np.arange(n_frames) % cols]


def extract_features(
    signal: AudioSignal,
    kind: str,
    cfg: AnalysisConfig | None = None,
    fixed_frames: int | None = None,
    log_compress: bool = False,
) -> FeatureMatrix:
    """Magnitude features of one utterance.

    ``scd`` is (n_bins, n_alpha); ``scd_a`` is (n_alpha, T); ``scd_b`` and
    ``stft`` are (n_bins, T). ``fixed_frames`` crops/replicates the time axis
    and is ignored for ``scd``, which has none.
    """
    if cfg is None:
        cfg = feature_config(kind, signal.sample_rate)
    if kind == "scd":
        data = np.abs(scd_mod.scd_map(signal, cfg).data)
    elif kind == "scd_a":
        data = np.abs(scd_mod.scd_a(signal, cfg).data)
    elif kind == "scd_b":
        data = np.abs(scd_mod.scd_b(signal, cfg).data)
    elif kind == "stft":
        data = np.abs(stft(signal, cfg)).T
    else:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    if fixed_frames is not None and kind != "scd":
        data = fix_frames(data, fixed_frames)
    if log_compress:
        data = np.log(data + LOG_FLOOR)
    meta = FeatureMeta(
        float(signal.sample_rate),
        float(cfg.alpha_max),
        cfg.frame_len,
        cfg.hop,
        cfg.n_fft,
        log_compress,
    )
    return FeatureMatrix(np.ascontiguousarray(data), kind, meta)


# ---------------------------------------------------------------------------
# CYCF container
# ---------------------------------------------------------------------------


def feature_bytes(m: FeatureMatrix) -> bytes:
    """Serialise to CYCF; the payload is stored as float32."""
    meta = m.meta
    header = HEADER.pack(
        MAGIC,
        VERSION,
        KINDS.index(m.kind),
        FLAG_LOG if meta.log_compressed else 0,
        m.rows,
        m.cols,
        meta.sample_rate,
        meta.alpha_max,
        meta.frame_len,
        meta.hop,
        meta.n_fft,
    )
    payload = np.ascontiguousarray(m.data, dtype="<f4").tobytes()
    return header + payload


def parse_feature_bytes(blob: bytes) -> FeatureMatrix:
    if len(blob) < 4 or blob[:4] != MAGIC:
        raise BadMagicError(f"bad magic {blob[:4]!r}, expected {MAGIC!r}")
    if len(blob) < HEADER.size:
        raise TruncatedPayloadError(f"header needs {HEADER.size} bytes, file has {len(blob)}")
    magic, version, kind, flags, rows, cols, fs, amax, flen, hop, nfft = HEADER.unpack_from(blob)
    if version != VERSION:
        raise VersionUnsupportedError(f"version {version} not supported (expected {VERSION})")
    if kind >= len(KINDS):
        raise FeatureFileError(f"kind code {kind} not recognised")
    expected = rows * cols * 4
    payload = blob[HEADER.size :]
    if len(payload) != expected:
        raise TruncatedPayloadError(
            f"header declares {rows}x{cols} ({expected} bytes), payload has {len(payload)} bytes"
        )
    data = np.frombuffer(payload, dtype="<f4").reshape(rows, cols).astype(np.float32)
    meta = FeatureMeta(fs, amax, flen, hop, nfft, bool(flags & FLAG_LOG))
    return FeatureMatrix(data, KINDS[kind], meta)


def write_feature_file(m: FeatureMatrix, path) -> None:
    Path(path).write_bytes(feature_bytes(m))


def read_feature_file(path) -> FeatureMatrix:
    return parse_feature_bytes(Path(path).read_bytes())


def write_csv(data, path) -> None:
    """Row-major, comma-separated, ``%.9g``."""
    data = np.atleast_2d(np.asarray(data, dtype=np.float64))
    lines = [",".join("%.9g" % v for v in row) for row in data]
    Path(path).write_text("\n".join(lines) + "\n")
