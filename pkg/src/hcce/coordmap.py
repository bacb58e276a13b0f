"""Per-pixel mask plus front and back model-space coordinates."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class CoordinateMap:
    """``front``/``back`` are (height, width, 3); NaN outside the mask."""

    mask: np.ndarray
    front: np.ndarray
    back: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.mask).astype(bool)
        front = np.asarray(self.front, dtype=np.float64)
        back = np.asarray(self.back, dtype=np.float64)
        if mask.ndim != 2 or front.shape != mask.shape + (3,) or back.shape != front.shape:
            raise ValueError(f"inconsistent shapes: mask {mask.shape}, front {front.shape}, back {back.shape}")
        if not (np.all(np.isfinite(front[mask])) and np.all(np.isfinite(back[mask]))):
            raise ValueError("front/back coordinates must be finite inside the mask")
        front = np.where(mask[..., None], front, np.nan)
        back = np.where(mask[..., None], back, np.nan)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "front", front)
        object.__setattr__(self, "back", back)

    @property
    def height(self):
        return self.mask.shape[0]

    @property
    def width(self):
        return self.mask.shape[1]

    @classmethod
    def empty(cls, width, height):
        nan = np.full((height, width, 3), np.nan)
        return cls(np.zeros((height, width), dtype=bool), nan, nan.copy())

    def masked_pixels(self):
        """(rows, cols) of masked pixels in row-major order."""
        return np.nonzero(self.mask)

    def equals(self, other):
        return (self.mask.shape == other.mask.shape
                and np.array_equal(self.mask, other.mask)
                and np.array_equal(self.front, other.front, equal_nan=True)
                and np.array_equal(self.back, other.back, equal_nan=True))
