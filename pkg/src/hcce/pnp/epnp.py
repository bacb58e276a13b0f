"""EPnP: pose from n >= 4 2D-3D correspondences in O(n).

Points are written as barycentric combinations of control points placed on
the principal axes of the 3D data (three control points when the data is
planar). The camera-frame control points lie in the null space of a
2n x 3k projection system. Their scale comes from matching the known
inter-control-point distances: closed-form linearizations using 1, 2, 3
(and, for the minimal case, 4) null vectors, each polished by Gauss-Newton
over all null-vector weights. A rigid Procrustes fit gives the pose and the
candidate with the lowest reprojection RMS wins.

Minimal 4-point non-planar samples are ill-posed for this scheme and fail
now and then; RANSAC simply discards those hypotheses.
"""

import numpy as np

from .. import _kernels
from ..errors import DegenerateConfigurationError
from ..geometry.camera import Pose
from ..geometry.rotation import orthonormalize

GN_ITERS = 15

_STATUS = {
    1: "3D points are collinear or coincident",
    2: "rank-deficient EPnP system",
    3: "no EPnP candidate places the points in front of the camera",
}


def epnp_solve(points, pixels, K, return_error=False, backend=None):
    """Pose mapping model ``points`` (n, 3) onto image ``pixels`` (n, 2).

    The rotation is snapped onto SO(3) by polar decomposition. Raises
    :class:`DegenerateConfigurationError` for fewer than 4 points, collinear
    points, or when every candidate puts points behind the camera.
    """
    r, t, err = epnp_raw(points, pixels, K, backend)
    pose = Pose(orthonormalize(r), t)
    return (pose, err) if return_error else pose


def epnp_raw(points, pixels, K, backend=None):
    """Unwrapped solver output ``(R, t, rms)``; R is orthonormal to rounding."""
    pw = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    uv = np.asarray(pixels, dtype=np.float64).reshape(-1, 2)
    if len(pw) < 4 or len(uv) != len(pw):
        raise DegenerateConfigurationError("EPnP needs at least 4 matched points")
    status, r, t, err = _kernels.epnp(pw, uv, K.fx, K.fy, K.cx, K.cy, GN_ITERS, backend=backend)
    if status:
        raise DegenerateConfigurationError(_STATUS[status])
    return r, t, err
