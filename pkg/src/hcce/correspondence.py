"""2D-3D correspondence sets built from front/back coordinate maps.

Modes:

``f``    front-surface points only
``b``    back-surface points only
``bf``   both surfaces
``bfu``  both surfaces plus points sampled uniformly on the segment
         between them, ``floor(|front - back| / d_bar)`` per pixel

Records sharing a pixel share a ``group`` id (the row-major pixel index),
which is what lets RANSAC draw at most one 3D point per pixel.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .coordmap import CoordinateMap
from .geometry.neighbors import avg_nn_distance

__all__ = [
    "BACK",
    "FRONT",
    "MID",
    "MODES",
    "CoordinateMap",
    "CorrespondenceSet",
    "build_correspondences",
    "interp_count",
    "sample_between",
]

FRONT, BACK, MID = 0, 1, 2
SOURCE_NAMES = ("front", "back", "mid")
MODES = ("f", "b", "bf", "bfu")

MAX_NN_POINTS = 20_000
MAX_INTERP = 1000


@dataclass(frozen=True, eq=False)
class CorrespondenceSet:
    pixels: np.ndarray  # (N, 2) pixel centers (u, v)
    points: np.ndarray  # (N, 3) model-space points
    source: np.ndarray  # (N,) uint8, FRONT / BACK / MID
    group: np.ndarray   # (N,) int64 pixel index, non-decreasing
    d_bar: float = math.nan
    _offsets: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pixels = np.asarray(self.pixels, dtype=np.float64).reshape(-1, 2)
        points = np.asarray(self.points, dtype=np.float64).reshape(-1, 3)
        source = np.asarray(self.source, dtype=np.uint8).reshape(-1)
        group = np.asarray(self.group, dtype=np.int64).reshape(-1)
        n = len(pixels)
        if not (len(points) == len(source) == len(group) == n):
            raise ValueError("record arrays differ in length")
        if n and np.any(np.diff(group) < 0):
            raise ValueError("records must be ordered by group")
        starts = np.flatnonzero(np.r_[True, group[1:] != group[:-1]]) if n else np.zeros(0, np.int64)
        for name, val in (("pixels", pixels), ("points", points), ("source", source), ("group", group)):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "_offsets", np.r_[starts, n].astype(np.int64))

    def __len__(self):
        return len(self.pixels)

    @property
    def n_groups(self):
        return len(self._offsets) - 1

    @property
    def group_starts(self):
        return self._offsets[:-1]

    @property
    def group_sizes(self):
        return np.diff(self._offsets)

    def select(self, keep):
        keep = np.asarray(keep)
        return CorrespondenceSet(self.pixels[keep], self.points[keep], self.source[keep], self.group[keep], self.d_bar)

    def records(self):
        """Iterate (pixel, point, source name, group) tuples."""
        for px, pt, s, g in zip(self.pixels, self.points, self.source, self.group):
            yield tuple(px), tuple(pt), SOURCE_NAMES[s], int(g)

    def equals(self, other):
        return (len(self) == len(other)
                and np.array_equal(self.pixels, other.pixels)
                and np.array_equal(self.points, other.points)
                and np.array_equal(self.source, other.source)
                and np.array_equal(self.group, other.group)
                and (self.d_bar == other.d_bar or (math.isnan(self.d_bar) and math.isnan(other.d_bar))))


def interp_count(q1, q2, d_bar):
    """Number of intermediate samples: floor(|q1 - q2| / d_bar)."""
    if not d_bar > 0:
        raise ValueError(f"d_bar must be positive, got {d_bar}")
    dist = np.linalg.norm(np.asarray(q1, dtype=np.float64) - np.asarray(q2, dtype=np.float64), axis=-1)
    n = np.floor(dist / d_bar).astype(np.int64)
    return int(n) if n.ndim == 0 else n


def sample_between(q1, q2, n):
    """a*q1 + (1-a)*q2 for a = t/(n+1), t = 1..n (endpoints excluded)."""
    q1 = np.asarray(q1, dtype=np.float64)
    q2 = np.asarray(q2, dtype=np.float64)
    a = (np.arange(1, n + 1) / (n + 1))[:, None]
    return a * q1 + (1 - a) * q2


def _dbar_points(front, back, same, surfaces):
    if surfaces == "front":
        return front
    if surfaces == "back":
        return back
    return np.concatenate([front, back[~same]])


def build_correspondences(cmap, mode, d_bar="auto", *, dbar_surfaces="both",
                          max_nn_points=MAX_NN_POINTS, max_interp=MAX_INTERP):
    """Correspondences for one of the modes ``f``, ``b``, ``bf``, ``bfu``.

    Output order is deterministic: pixels row-major; within a pixel front,
    back, then intermediate samples with ``a`` ascending. Where front and back
    coincide (grazing rays) ``bf``/``bfu`` emit the point once, as front.

    ``d_bar="auto"`` measures the mean nearest-neighbor spacing of the
    predicted front and back points (``dbar_surfaces`` picks which), thinned
    by a uniform stride to at most ``max_nn_points`` points. ``max_interp``
    caps the samples per pixel so a wild outlier cannot explode the set.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    rows, cols = cmap.masked_pixels()
    gid = rows.astype(np.int64) * cmap.width + cols
    centers = np.stack([cols + 0.5, rows + 0.5], axis=-1).astype(np.float64)
    front = cmap.front[rows, cols]
    back = cmap.back[rows, cols]
    n_pix = len(gid)

    if mode == "f":
        return CorrespondenceSet(centers, front, np.full(n_pix, FRONT), gid)
    if mode == "b":
        return CorrespondenceSet(centers, back, np.full(n_pix, BACK), gid)

    same = np.all(front == back, axis=1)
    n_mid = np.zeros(n_pix, dtype=np.int64)
    used_dbar = math.nan
    if mode == "bfu" and n_pix:
        if d_bar == "auto":
            pts = _dbar_points(front, back, same, dbar_surfaces)
            stride = max(1, -(-len(pts) // max_nn_points))
            used_dbar = avg_nn_distance(pts[::stride]) if len(pts[::stride]) >= 2 else math.nan
        else:
            used_dbar = float(d_bar)
        if used_dbar > 0:
            n_mid = np.minimum(interp_count(front, back, used_dbar), max_interp)
        elif d_bar != "auto":
            raise ValueError(f"d_bar must be positive, got {d_bar}")
        n_mid[same] = 0

    per_pixel = 1 + (~same).astype(np.int64) + n_mid
    total = int(per_pixel.sum())
    start = np.cumsum(per_pixel) - per_pixel
    pixels = np.repeat(centers, per_pixel, axis=0)
    group = np.repeat(gid, per_pixel)
    points = np.empty((total, 3))
    source = np.full(total, MID, dtype=np.uint8)

    points[start] = front
    source[start] = FRONT
    has_back = ~same
    points[start[has_back] + 1] = back[has_back]
    source[start[has_back] + 1] = BACK

    if n_mid.any():
        owner = np.repeat(np.arange(n_pix), n_mid)
        # t = 1..n within each pixel
        t = np.arange(len(owner)) - np.repeat(np.cumsum(n_mid) - n_mid, n_mid) + 1
        a = (t / (n_mid[owner] + 1))[:, None]
        mids = a * front[owner] + (1 - a) * back[owner]
        slot = start[owner] + 1 + has_back[owner] + (t - 1)
        points[slot] = mids
    return CorrespondenceSet(pixels, points, source, group, used_dbar)
