"""8-bit RGB PNG heatmaps without a plotting dependency.

Colormaps are piecewise-linear between anchor colours:

* ``viridis`` (magnitudes): nine anchors sampled from matplotlib's viridis.
* ``diverging`` (signed differences): blue (-1) through white (0) to red (+1),
  symmetric around zero so negative differences always render blue.

Matrices are drawn with row 0 at the bottom (low frequency down).
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

VIRIDIS = np.array(
    [
        (68, 1, 84),
        (71, 44, 122),
        (59, 81, 139),
        (44, 113, 142),
        (33, 144, 141),
        (39, 173, 129),
        (92, 200, 99),
        (170, 220, 50),
        (253, 231, 37),
    ],
    dtype=np.float64,
)
DIVERGING = np.array([(33, 102, 172), (247, 247, 247), (178, 24, 43)], dtype=np.float64)

DB_RANGE = 80.0


def apply_colormap(values, anchors) -> np.ndarray:
    """Map values in [0, 1] to uint8 RGB."""
    v = np.clip(np.nan_to_num(np.asarray(values, dtype=np.float64)), 0.0, 1.0)
    pos = v * (len(anchors) - 1)
    lo = np.minimum(np.floor(pos).astype(int), len(anchors) - 2)
    frac = (pos - lo)[..., None]
    rgb = anchors[lo] * (1.0 - frac) + anchors[lo + 1] * frac
    return np.round(rgb).astype(np.uint8)


def scale_magnitude(mag, db: bool = False) -> np.ndarray:
    """Min-max scale to [0, 1]; with ``db`` use 10*log10 over an 80 dB range."""
    mag = np.abs(np.asarray(mag, dtype=np.float64))
    if db:
        top = mag.max()
        if top <= 0:
            return np.zeros_like(mag)
        level = 10.0 * np.log10(np.maximum(mag, top * 10.0 ** (-DB_RANGE / 10.0)) / top)
        return 1.0 + level / DB_RANGE
    lo, hi = mag.min(), mag.max()
    if hi <= lo:
        return np.zeros_like(mag)
    return (mag - lo) / (hi - lo)


def scale_signed(values) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    peak = np.abs(values).max() if values.size else 0.0
    if peak <= 0:
        return np.full(values.shape, 0.5)
    return 0.5 + 0.5 * values / peak


def png_bytes(rgb: np.ndarray) -> bytes:
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    height, width, _ = rgb.shape
    raw = b"".join(b"\x00" + rgb[row].tobytes() for row in range(height))

    def chunk(tag: bytes, body: bytes) -> bytes:
        return struct.pack(">I", len(body)) + tag + body + struct.pack(">I", zlib.crc32(tag + body) & 0xFFFFFFFF)

    ihdr = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    return b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", ihdr) + chunk(b"IDAT", zlib.compress(raw, 9)) + chunk(b"IEND", b"")


def write_heatmap(path, matrix, db: bool = False, signed: bool = False) -> None:
    matrix = np.asarray(matrix)
    if signed:
        rgb = apply_colormap(scale_signed(matrix), DIVERGING)
    else:
        rgb = apply_colormap(scale_magnitude(matrix, db), VIRIDIS)
    Path(path).write_bytes(png_bytes(rgb[::-1]))
