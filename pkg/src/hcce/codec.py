"""Hierarchical binary (HBCE) and continuous (HCCE) coordinate codes.

Every coordinate component is first normalized to [0, 1] with the object's
bounding box. A component ``x`` then becomes ``levels`` codes:

* binary: bit ``i`` is the ``i``-th digit of the binary expansion of ``x``;
* continuous: level 1 is ``x`` itself and each further level folds the
  previous one with the tent map ``t -> 2t`` (``t < 0.5``) or ``2 - 2t``.

Continuous codes convert back to binary by thresholding at 0.5 and
undoing the fold whenever the previous bit was 1. Arrays are accepted
everywhere; the level axis is always last.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import CodecDomainError, InvalidNormalizerError

LEVELS = 8


@dataclass(frozen=True)
class BoundingNormalizer:
    """Per-axis affine map from model coordinates to the unit cube."""

    min_corner: np.ndarray
    extent: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.min_corner, dtype=np.float64).reshape(3)
        ext = np.asarray(self.extent, dtype=np.float64).reshape(3)
        if not np.all(ext > 0):
            raise InvalidNormalizerError(f"extent must be positive on every axis, got {ext}")
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "extent", ext)

    @classmethod
    def from_points(cls, points):
        """Tight axis-aligned box around ``points``."""
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        return cls(lo, hi - lo)

    @property
    def max_corner(self):
        return self.min_corner + self.extent


def normalize(point, normalizer):
    """Map model-space points (..., 3) into [0, 1]^3, clamping stray values."""
    p = np.asarray(point, dtype=np.float64)
    return np.clip((p - normalizer.min_corner) / normalizer.extent, 0.0, 1.0)


def denormalize(coord, normalizer):
    c = np.asarray(coord, dtype=np.float64)
    return normalizer.min_corner + c * normalizer.extent


def _checked(x):
    arr = np.asarray(x, dtype=np.float64)
    if not np.all((arr >= 0.0) & (arr <= 1.0)):
        raise CodecDomainError("coordinate components must lie in [0, 1]")
    return arr


def hbce_encode(x, levels=LEVELS):
    """Binary-expansion bits of ``x``, shape ``x.shape + (levels,)``.

    Bins are half-open ``[j 2^-L, (j+1) 2^-L)``; ``x = 1`` goes to the top bin.
    """
    arr = _checked(x)
    top = (1 << levels) - 1
    k = np.minimum(np.floor(arr * (1 << levels)).astype(np.int64), top)
    shifts = np.arange(levels - 1, -1, -1)
    return ((k[..., None] >> shifts) & 1).astype(np.uint8)


def hcce_encode(x, levels=LEVELS):
    """Continuous mirror codes of ``x``, shape ``x.shape + (levels,)``."""
    arr = _checked(x)
    out = np.empty(arr.shape + (levels,), dtype=np.float64)
    t = arr.copy()
    out[..., 0] = t
    for i in range(1, levels):
        # 2 - 2t is exact in binary floating point for t in [0.5, 1]
        t = np.where(t < 0.5, 2.0 * t, 2.0 - 2.0 * t)
        out[..., i] = t
    return out


def hcce_to_binary(codes):
    """Binarize continuous codes (..., levels), reversing the mirroring.

    ``g(t) = 1`` iff ``t >= 0.5``; bit ``i`` is ``g(C_i)`` when bit ``i-1``
    is 0 and ``1 - g(C_i)`` otherwise.
    """
    c = np.asarray(codes, dtype=np.float64)
    flat = c.reshape(-1, c.shape[-1])
    return _kernels.hcce_to_binary(flat).reshape(c.shape)


def binary_decode(bits, midpoint=False):
    """Sum of ``2^-i * bit_i``; ``midpoint`` adds half a bin (``2^-(L+1)``)."""
    b = np.asarray(bits)
    levels = b.shape[-1]
    place = 0.5 ** np.arange(1, levels + 1)
    value = b.astype(np.float64) @ place
    if midpoint:
        value = value + 0.5 ** (levels + 1)
    return float(value) if np.ndim(value) == 0 else value


def roundtrip(x, levels=LEVELS, midpoint=False):
    """decode(to_binary(hcce_encode(x))) -- the quantized component."""
    return binary_decode(hcce_to_binary(hcce_encode(x, levels)), midpoint=midpoint)


def quantize_points(points, normalizer, levels=LEVELS, midpoint=True):
    """Pass model-space points through the HCCE codec and back."""
    unit = normalize(points, normalizer)
    return denormalize(roundtrip(unit, levels, midpoint), normalizer)
