"""Rigid poses, pinhole intrinsics and projection.

Image coordinates are continuous with the origin at the top-left corner of
the top-left pixel, so the center of pixel (col, row) is (col + 0.5, row + 0.5).
"""

from dataclasses import dataclass

import numpy as np

from ..errors import BehindCameraError
from .rotation import orthonormalize

MIN_DEPTH = 1e-9
ROTATION_TOL = 1e-9


@dataclass(frozen=True)
class Pose:
    """Model-to-camera transform: X_cam = R @ X_model + t."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rotation, dtype=np.float64).reshape(3, 3)
        t = np.asarray(self.translation, dtype=np.float64).reshape(3)
        if not (np.allclose(r.T @ r, np.eye(3), atol=ROTATION_TOL, rtol=0)
                and abs(np.linalg.det(r) - 1.0) <= ROTATION_TOL):
            raise ValueError("rotation is not a proper orthonormal matrix")
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls):
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_approx(cls, rotation, translation):
        """Build from a nearly orthonormal matrix, snapping it onto SO(3)."""
        return cls(orthonormalize(rotation), translation)

    def apply(self, points):
        return np.asarray(points, dtype=np.float64) @ self.rotation.T + self.translation

    def inverse(self):
        return Pose(self.rotation.T, -self.rotation.T @ self.translation)

    def compose(self, other):
        """self after other."""
        return Pose.from_approx(self.rotation @ other.rotation, self.rotation @ other.translation + self.translation)

    def matrix(self):
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise ValueError("focal lengths must be positive")
        if self.width < 1 or self.height < 1:
            raise ValueError("viewport must be at least 1x1")

    def matrix(self):
        return np.array([[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]])

    def pixel_centers(self):
        """(height, width, 2) array of (u, v) pixel centers."""
        u, v = np.meshgrid(np.arange(self.width) + 0.5, np.arange(self.height) + 0.5)
        return np.stack([u, v], axis=-1)

    def ray_directions(self):
        """(height, width, 3) camera-frame rays with unit z through pixel centers."""
        d = np.empty((self.height, self.width, 3))
        d[..., 0] = ((np.arange(self.width) + 0.5 - self.cx) / self.fx)[None, :]
        d[..., 1] = ((np.arange(self.height) + 0.5 - self.cy) / self.fy)[:, None]
        d[..., 2] = 1.0
        return d


def project_camera(cam_points, K):
    """Pinhole projection of camera-frame points; inf where depth <= MIN_DEPTH."""
    p = np.asarray(cam_points, dtype=np.float64)
    z = p[..., 2]
    front = z > MIN_DEPTH
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(front, K.fx * p[..., 0] / z + K.cx, np.inf)
        v = np.where(front, K.fy * p[..., 1] / z + K.cy, np.inf)
    return np.stack([u, v], axis=-1)


def project(point, pose, K):
    """Pixel coordinates of model-space point(s) under ``pose``."""
    cam = pose.apply(point)
    if np.any(cam[..., 2] <= MIN_DEPTH):
        raise BehindCameraError("point lies behind the camera")
    return project_camera(cam, K)
