"""Binary PGM/PPM (P5/P6, 8-bit) and a lossless float container.

Float container layout (all little-endian)::

    bytes 0-7    magic b"RLRPIMG1"
    bytes 8-19   uint32 height, width, channels
    bytes 20-    float64 samples, planar (channel, row, column)

Grayscale images are ``(H, W)`` arrays; color images ``(3, H, W)``.
8-bit samples map to [0, 1] by ``/ 255``; on write values are clamped to
[0, 1] and rounded half-up to the nearest level.
"""
import os
import struct

import numpy as np

from .core import RLRPError

MAGIC = b"RLRPIMG1"
FLOAT_SUFFIXES = (".rlf",)


class FormatError(RLRPError, ValueError):
    """Malformed image file; `offset` is the byte position of the problem."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


def _read_token(data, pos):
    n = len(data)
    while pos < n:
        ch = data[pos:pos + 1]
        if ch == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif ch.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise FormatError("unexpected end of header", start)
    return data[start:pos], pos, start


def decode_pnm(data):
    """Parse P5/P6 bytes into a float array in [0, 1]."""
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise FormatError(f"unsupported magic {magic!r}", 0)
    channels = 1 if magic == b"P5" else 3
    pos = 2
    values = []
    for _ in range(3):
        tok, pos, start = _read_token(data, pos)
        if not tok.isdigit():
            raise FormatError(f"expected integer, got {tok!r}", start)
        values.append(int(tok))
    width, height, maxval = values
    if width < 1 or height < 1:
        raise FormatError("image dimensions must be positive", start)
    if maxval != 255:
        raise FormatError(f"only 8-bit files are supported (maxval {maxval})", start)
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise FormatError("missing whitespace after header", pos)
    pos += 1
    count = width * height * channels
    if len(data) - pos < count:
        raise FormatError(f"truncated pixel data: need {count} bytes, have {len(data) - pos}", len(data))
    px = np.frombuffer(data, dtype=np.uint8, count=count, offset=pos).astype(np.float64) / 255.0
    if channels == 1:
        return px.reshape(height, width)
    return px.reshape(height, width, 3).transpose(2, 0, 1).copy()


def quantize(img):
    """Clamp to [0, 1] and round half-up to 8-bit levels."""
    return np.floor(np.clip(np.asarray(img, dtype=np.float64), 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def encode_pnm(img):
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        h, w = img.shape
        return b"P5\n%d %d\n255\n" % (w, h) + quantize(img).tobytes()
    if img.ndim == 3 and img.shape[0] == 3:
        _, h, w = img.shape
        return b"P6\n%d %d\n255\n" % (w, h) + quantize(img.transpose(1, 2, 0)).tobytes()
    if img.ndim == 3 and img.shape[0] == 1:
        return encode_pnm(img[0])
    raise ValueError(f"PGM/PPM hold 1 or 3 channels, got shape {img.shape}")


def encode_float(img):
    img = np.asarray(img, dtype=np.float64)
    planar = img[None] if img.ndim == 2 else img
    c, h, w = planar.shape
    return MAGIC + struct.pack("<III", h, w, c) + planar.astype("<f8").tobytes()


def decode_float(data):
    if data[:8] != MAGIC:
        raise FormatError("bad magic for float container", 0)
    if len(data) < 20:
        raise FormatError("truncated header", len(data))
    h, w, c = struct.unpack_from("<III", data, 8)
    need = 20 + 8 * h * w * c
    if len(data) != need:
        raise FormatError(f"expected {need} bytes, found {len(data)}", min(len(data), need))
    arr = np.frombuffer(data, dtype="<f8", offset=20).astype(np.float64).reshape(c, h, w)
    return arr[0].copy() if c == 1 else arr.copy()


def is_float_path(path):
    return os.fspath(path).lower().endswith(FLOAT_SUFFIXES)


def read_image(path):
    """Read a ``.pgm``/``.ppm`` or ``.rlf`` file (chosen by content)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:8] == MAGIC:
        return decode_float(data)
    return decode_pnm(data)


def write_image(img, path):
    """Write `img`; ``.rlf`` paths get the float container, others PGM/PPM."""
    data = encode_float(img) if is_float_path(path) else encode_pnm(img)
    with open(path, "wb") as fh:
        fh.write(data)
