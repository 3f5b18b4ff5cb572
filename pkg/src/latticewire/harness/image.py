"""Bilevel image I/O (PBM P1/P4, PGM P2/P5) and the bundled test pattern.

Black pixels are 1 bits; bits are row-major.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from ..exceptions import ImageFormatError
from .io import atomic_write_bytes


@dataclass(frozen=True, eq=False)
class BitImage:
    width: int
    height: int
    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits, dtype=np.uint8).ravel()
        if b.size != self.width * self.height:
            raise ValueError(f"{b.size} bits for a {self.width}x{self.height} image")
        object.__setattr__(self, "bits", b)

    @property
    def pixels(self) -> np.ndarray:
        return self.bits.reshape(self.height, self.width)


_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _header(data: bytes, count: int):
    pos, out = 0, []
    for _ in range(count):
        m = _TOKEN.match(data, pos)
        if not m:
            raise ImageFormatError("truncated header")
        out.append(m.group(1))
        pos = m.end()
    return out, pos + 1  # one whitespace byte before raster data


def decode_image(data: bytes) -> BitImage:
    magic = data[:2]
    if magic in (b"P1", b"P4"):
        (_, w, h), pos = _header(data, 3)
        w, h = int(w), int(h)
        if magic == b"P4":
            row = (w + 7) // 8
            raw = np.frombuffer(data[pos : pos + row * h], dtype=np.uint8)
            if raw.size != row * h:
                raise ImageFormatError("truncated P4 raster")
            bits = np.unpackbits(raw.reshape(h, row), axis=1)[:, :w]
        else:
            body = re.sub(rb"#[^\n]*", b"", data[pos - 1 :])
            vals = [c - 48 for c in body if c in (48, 49)]
            if len(vals) < w * h:
                raise ImageFormatError("truncated P1 raster")
            bits = np.array(vals[: w * h], dtype=np.uint8)
        return BitImage(w, h, bits)
    if magic in (b"P2", b"P5"):
        (_, w, h, maxval), pos = _header(data, 4)
        w, h, maxval = int(w), int(h), int(maxval)
        if magic == b"P5":
            dtype = np.uint8 if maxval < 256 else ">u2"
            raw = np.frombuffer(data[pos:], dtype=dtype)[: w * h]
        else:
            raw = np.array(data[pos - 1 :].split(), dtype=np.int64)[: w * h]
        if raw.size != w * h:
            raise ImageFormatError("truncated PGM raster")
        scaled = raw.astype(float) * 255.0 / maxval
        return BitImage(w, h, (scaled < 128).astype(np.uint8))
    raise ImageFormatError(f"unsupported image format {magic!r}; expected PBM or PGM")


def encode_pbm(img: BitImage) -> bytes:
    packed = np.packbits(img.pixels, axis=1)
    return f"P4\n{img.width} {img.height}\n".encode() + packed.tobytes()


def image_to_bits(path) -> BitImage:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ImageFormatError(f"cannot read image {path}: {exc}") from exc
    return decode_image(data)


def bits_to_image(img: BitImage, path) -> None:
    atomic_write_bytes(path, encode_pbm(img))


# 5x7 glyphs for the banner text
_GLYPHS = {
    "L": ["10000"] * 6 + ["11111"],
    "A": ["01110", "10001", "10001", "11111", "10001", "10001", "10001"],
    "T": ["11111"] + ["00100"] * 6,
    "I": ["01110"] + ["00100"] * 5 + ["01110"],
    "C": ["01110", "10001", "10000", "10000", "10000", "10001", "01110"],
    "E": ["11111", "10000", "10000", "11110", "10000", "10000", "11111"],
    "W": ["10001", "10001", "10001", "10101", "10101", "10101", "01010"],
    "R": ["11110", "10001", "10001", "11110", "10100", "10010", "10001"],
    "P": ["11110", "10001", "10001", "11110", "10000", "10000", "10000"],
    " ": ["00000"] * 7,
}


def _banner(text: str, scale: int) -> np.ndarray:
    cols = []
    for ch in text:
        g = np.array([[int(c) for c in row] for row in _GLYPHS[ch]], dtype=np.uint8)
        cols.append(g)
        cols.append(np.zeros((7, 1), dtype=np.uint8))
    glyphs = np.hstack(cols)
    return np.kron(glyphs, np.ones((scale, scale), dtype=np.uint8))


def make_test_pattern(size: int = 256) -> BitImage:
    """Checkerboard with a text band across the middle, ``size`` x ``size``."""
    yy, xx = np.mgrid[0:size, 0:size]
    img = (((yy // 16) + (xx // 16)) % 2).astype(np.uint8)
    band_top, band_h = size // 2 - 32, 64
    img[band_top : band_top + band_h] = 0
    for text, row in (("LATTICE", band_top + 4), ("WIRETAP", band_top + 34)):
        b = _banner(text, 3)
        h, w = b.shape
        x0 = (size - w) // 2
        img[row : row + h, x0 : x0 + w] = b
    return BitImage(size, size, img)


def bundled_test_image() -> BitImage:
    data = resources.files("latticewire.data").joinpath("test_pattern.pbm").read_bytes()
    return decode_image(data)
