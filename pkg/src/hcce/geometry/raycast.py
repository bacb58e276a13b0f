"""Front/back surface rendering by ray casting.

A ray through each pixel center is intersected with every triangle
(Moller-Trumbore, no back-face culling). The nearest hit gives the front
surface and the farthest the back surface, the same pair a rasterizer
produces with ``GL_LESS`` and ``GL_GREATER`` depth tests but without depth
buffer quantization.
"""

import numpy as np

from .. import _kernels
from ..coordmap import CoordinateMap


def raycast_depths(mesh, pose, K, backend=None):
    """Nearest and farthest camera depth per pixel (+inf / -inf if missed)."""
    cam_vertices = pose.apply(mesh.vertices)
    return _kernels.raycast_surfaces(
        cam_vertices, mesh.triangles, K.fx, K.fy, K.cx, K.cy, K.width, K.height, backend=backend
    )


def raycast_front_back(mesh, pose, K, backend=None):
    t_near, t_far = raycast_depths(mesh, pose, K, backend=backend)
    mask = np.isfinite(t_near)
    rays = K.ray_directions()
    front = np.full(rays.shape, np.nan)
    back = np.full(rays.shape, np.nan)
    d = rays[mask]
    # camera point t * d back to model space: R^T (t d - trans)
    front[mask] = (t_near[mask][:, None] * d - pose.translation) @ pose.rotation
    back[mask] = (t_far[mask][:, None] * d - pose.translation) @ pose.rotation
    return CoordinateMap(mask, front, back)
