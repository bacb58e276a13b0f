"""Hierarchical continuous coordinate encoding and ultra-dense correspondences for 6D pose estimation."""

from ._kernels import BACKEND
from .codec import LEVELS, BoundingNormalizer, hbce_encode, hcce_encode, hcce_to_binary, binary_decode
from .coordmap import CoordinateMap
from .correspondence import CorrespondenceSet, build_correspondences
from .geometry import CameraIntrinsics, Pose, TriangleMesh, raycast_front_back
from .pnp import RansacConfig, epnp_solve, ransac_pnp

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "LEVELS",
    "BoundingNormalizer",
    "CameraIntrinsics",
    "CoordinateMap",
    "CorrespondenceSet",
    "Pose",
    "RansacConfig",
    "TriangleMesh",
    "binary_decode",
    "build_correspondences",
    "epnp_solve",
    "hbce_encode",
    "hcce_encode",
    "hcce_to_binary",
    "raycast_front_back",
    "ransac_pnp",
]
