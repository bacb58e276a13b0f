"""Binary files for coordinate maps (CMAP) and correspondence sets (CSET).

CMAP v1, little-endian::

    b"CMAP" | u32 version=1 | u32 width | u32 height
    u8   mask[height][width]            (row-major, 0 or 1)
    f32  front[height][width][3]        (quiet NaN outside the mask)
    f32  back[height][width][3]

CSET v1, little-endian::

    b"CSET" | u32 version=1 | u64 count | f64 d_bar (NaN if unused)
    f64  pixels[count][2]
    f64  points[count][3]
    u8   source[count]                  (0 front, 1 back, 2 mid)
    i64  group[count]                   (row-major pixel index)
"""

import struct

import numpy as np

from ..coordmap import CoordinateMap
from ..correspondence import CorrespondenceSet
from ..errors import FormatError, TruncationError

CMAP_MAGIC = b"CMAP"
CSET_MAGIC = b"CSET"
VERSION = 1


def cmap_to_bytes(cmap):
    h, w = cmap.mask.shape
    parts = [
        CMAP_MAGIC,
        struct.pack("<III", VERSION, w, h),
        cmap.mask.astype(np.uint8).tobytes(),
        cmap.front.astype("<f4").tobytes(),
        cmap.back.astype("<f4").tobytes(),
    ]
    return b"".join(parts)


class _Reader:
    def __init__(self, data):
        self.data = memoryview(data)
        self.pos = 0

    def take(self, n, section):
        if self.pos + n > len(self.data):
            raise TruncationError(section)
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def magic(self, expected):
        got = bytes(self.take(4, "magic"))
        if got != expected:
            raise FormatError(f"bad magic {got!r}, expected {expected!r}")

    def version(self, kind):
        (v,) = struct.unpack("<I", self.take(4, "version"))
        if v != VERSION:
            raise FormatError(f"unsupported {kind} version {v} (this reader handles version {VERSION})")

    def finish(self, kind):
        if self.pos != len(self.data):
            raise FormatError(f"{len(self.data) - self.pos} trailing bytes after {kind} payload")


def cmap_from_bytes(data):
    rd = _Reader(data)
    rd.magic(CMAP_MAGIC)
    rd.version("CMAP")
    w, h = struct.unpack("<II", rd.take(8, "header"))
    mask = np.frombuffer(rd.take(h * w, "mask"), dtype=np.uint8).reshape(h, w)
    if np.any(mask > 1):
        raise FormatError("mask bytes must be 0 or 1")
    front = np.frombuffer(rd.take(h * w * 12, "front coordinates"), dtype="<f4").reshape(h, w, 3)
    back = np.frombuffer(rd.take(h * w * 12, "back coordinates"), dtype="<f4").reshape(h, w, 3)
    rd.finish("CMAP")
    return CoordinateMap(mask.astype(bool), front.astype(np.float64), back.astype(np.float64))


def save_cmap(cmap, path):
    with open(path, "wb") as fh:
        fh.write(cmap_to_bytes(cmap))


def load_cmap(path):
    with open(path, "rb") as fh:
        return cmap_from_bytes(fh.read())


def cset_to_bytes(cset):
    return b"".join([
        CSET_MAGIC,
        struct.pack("<IQd", VERSION, len(cset), cset.d_bar),
        cset.pixels.astype("<f8").tobytes(),
        cset.points.astype("<f8").tobytes(),
        cset.source.astype(np.uint8).tobytes(),
        cset.group.astype("<i8").tobytes(),
    ])


def cset_from_bytes(data):
    rd = _Reader(data)
    rd.magic(CSET_MAGIC)
    rd.version("CSET")
    n, d_bar = struct.unpack("<Qd", rd.take(16, "header"))
    pixels = np.frombuffer(rd.take(n * 16, "pixels"), dtype="<f8").reshape(n, 2)
    points = np.frombuffer(rd.take(n * 24, "points"), dtype="<f8").reshape(n, 3)
    source = np.frombuffer(rd.take(n, "source tags"), dtype=np.uint8)
    if np.any(source > 2):
        raise FormatError("source tags must be 0, 1 or 2")
    group = np.frombuffer(rd.take(n * 8, "groups"), dtype="<i8")
    rd.finish("CSET")
    return CorrespondenceSet(pixels.copy(), points.copy(), source.copy(), group.astype(np.int64), d_bar)


def save_cset(cset, path):
    with open(path, "wb") as fh:
        fh.write(cset_to_bytes(cset))


def load_cset(path):
    with open(path, "rb") as fh:
        return cset_from_bytes(fh.read())
