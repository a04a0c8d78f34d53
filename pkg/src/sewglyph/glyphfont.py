"""Embedded monospaced bitmap font and nearest-neighbour glyph scaling.

The font is font8x8 (public domain) pixel-doubled to a 16x16 base grid, so
rendering never depends on fonts installed on the host.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._font8x8 import FONT8X8_BASIC
from .errors import UnsupportedGlyph

BASE_RESOLUTION = 16
SUPPORTED_CHARS = frozenset(FONT8X8_BASIC)

_SOURCE_RESOLUTION = 8


@dataclass(frozen=True, eq=False)
class GlyphBitmap:
    codepoint: str
    pixels: np.ndarray  # (BASE_RESOLUTION, BASE_RESOLUTION) uint8, 1 = ink

    def __eq__(self, other):
        if not isinstance(other, GlyphBitmap):
            return NotImplemented
        return self.codepoint == other.codepoint and np.array_equal(self.pixels, other.pixels)

    def __hash__(self):
        return hash((self.codepoint, self.pixels.tobytes()))


def _frozen(a):
    a.setflags(write=False)
    return a


def _decode_rows(rows):
    bits = np.array([[(row >> col) & 1 for col in range(_SOURCE_RESOLUTION)] for row in rows], dtype=np.uint8)
    factor = BASE_RESOLUTION // _SOURCE_RESOLUTION
    return np.kron(bits, np.ones((factor, factor), dtype=np.uint8))


@lru_cache(maxsize=None)
def glyph_bitmap(ch):
    """Return the base-resolution bitmap for a printable ASCII character.

    Raises UnsupportedGlyph for anything outside U+0020..U+007E.
    """
    if not isinstance(ch, str) or ch not in SUPPORTED_CHARS:
        raise UnsupportedGlyph(ch)
    return GlyphBitmap(ch, _frozen(_decode_rows(FONT8X8_BASIC[ch])))


def _fallback_pixels():
    px = np.zeros((BASE_RESOLUTION, BASE_RESOLUTION), dtype=np.uint8)
    px[2:-2, 2:-2] = 1
    return _frozen(px)


FALLBACK_GLYPH = GlyphBitmap("�", _fallback_pixels())


def glyph_or_fallback(ch):
    try:
        return glyph_bitmap(ch)
    except UnsupportedGlyph:
        return FALLBACK_GLYPH


def nearest_indices(cell_px, base=BASE_RESOLUTION):
    """Source row/column for each output pixel, sampling at pixel centres.

    Output pixel i covers [i, i+1) in output space; its centre maps to
    (i + 0.5) * base / cell_px in source space.
    """
    if cell_px < 1:
        raise ValueError(f"cell_px must be >= 1, got {cell_px}")
    i = np.arange(cell_px)
    return ((2 * i + 1) * base) // (2 * cell_px)


def scale_bitmap(pixels, cell_px):
    idx = nearest_indices(cell_px, pixels.shape[0])
    return pixels[np.ix_(idx, idx)]


@lru_cache(maxsize=4096)
def _scaled(ch, cell_px, fallback):
    glyph = glyph_or_fallback(ch) if fallback else glyph_bitmap(ch)
    return _frozen(np.ascontiguousarray(scale_bitmap(glyph.pixels, cell_px)))


def rasterize_scaled(ch, cell_px, *, fallback=False):
    """Scale a glyph to a cell_px x cell_px binary block (nearest neighbour).

    With ``fallback=True`` unsupported characters render as a filled box
    instead of raising.
    """
    if int(cell_px) != cell_px or cell_px < 1:
        raise ValueError(f"cell_px must be a positive integer, got {cell_px!r}")
    return _scaled(ch, int(cell_px), bool(fallback))
