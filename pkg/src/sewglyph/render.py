"""Rasterise layout plans onto 8-bit grayscale buffers and encode them."""

import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .glyphfont import rasterize_scaled

INK = 0
BACKGROUND = 255


@dataclass(frozen=True, eq=False)
class ImageBuffer:
    width: int
    height: int
    pixels: np.ndarray  # (height, width) uint8

    def __eq__(self, other):
        if not isinstance(other, ImageBuffer):
            return NotImplemented
        return (self.width, self.height) == (other.width, other.height) and np.array_equal(self.pixels, other.pixels)

    @classmethod
    def blank(cls, width, height=None):
        height = width if height is None else height
        return cls(width, height, np.full((height, width), BACKGROUND, dtype=np.uint8))

    @classmethod
    def from_array(cls, a):
        a = np.asarray(a, dtype=np.uint8)
        if a.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {a.shape}")
        return cls(a.shape[1], a.shape[0], a)

    def ink_count(self):
        return int(np.count_nonzero(self.pixels == INK))


def render(plan, config, *, fallback=True):
    """Draw every command of ``plan`` on a fresh background image.

    Unsupported characters become a filled box unless ``fallback`` is False,
    in which case UnsupportedGlyph propagates.
    """
    image = ImageBuffer.blank(config.image_px)
    px = image.pixels
    for cmd in plan.commands:
        block = rasterize_scaled(cmd.character, cmd.cell_px, fallback=fallback)
        target = px[cmd.y : cmd.y + cmd.cell_px, cmd.x : cmd.x + cmd.cell_px]
        if target.shape != block.shape:
            raise ValueError(f"command {cmd} falls outside the {config.image_px}px image")
        target[block == 1] = INK
    return image


def encode_pgm(image):
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(image.pixels, dtype=np.uint8).tobytes()


def decode_pgm(data):
    """Read a binary P5 PGM with maxval 255 (comments allowed in the header)."""
    fields, pos = [], 0
    while len(fields) < 4:
        while data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    if fields[0] != b"P5":
        raise ValueError("not a binary PGM (P5) file")
    width, height, maxval = (int(f) for f in fields[1:])
    if maxval != 255:
        raise ValueError(f"only maxval 255 is supported, got {maxval}")
    pos += 1
    body = data[pos : pos + width * height]
    if len(body) != width * height:
        raise ValueError("truncated PGM pixel data")
    return ImageBuffer(width, height, np.frombuffer(body, dtype=np.uint8).reshape(height, width).copy())


def _png_chunk(tag, payload):
    return struct.pack(">I", len(payload)) + tag + payload + struct.pack(">I", zlib.crc32(tag + payload) & 0xFFFFFFFF)


def encode_png(image):
    """8-bit grayscale, non-interlaced PNG with filter type 0 on every row."""
    raw = np.ascontiguousarray(image.pixels, dtype=np.uint8)
    scanlines = b"".join(b"\x00" + raw[y].tobytes() for y in range(image.height))
    ihdr = struct.pack(">IIBBBBB", image.width, image.height, 8, 0, 0, 0, 0)
    return (
        b"\x89PNG\r\n\x1a\n"
        + _png_chunk(b"IHDR", ihdr)
        + _png_chunk(b"IDAT", zlib.compress(scanlines, 9))
        + _png_chunk(b"IEND", b"")
    )


def encode(image, image_format):
    if image_format == "pgm":
        return encode_pgm(image)
    if image_format == "png":
        return encode_png(image)
    raise ValueError(f"unknown image format {image_format!r}")


def read_image(path):
    """Load a PGM or PNG file as an ImageBuffer."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] == b"P5":
        return decode_pgm(data)
    from PIL import Image
    import io

    with Image.open(io.BytesIO(data)) as im:
        return ImageBuffer.from_array(np.array(im.convert("L")))
