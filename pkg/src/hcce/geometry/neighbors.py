"""Nearest-neighbor statistics backed by scipy's k-d tree."""

import numpy as np
from scipy.spatial import cKDTree

from ..errors import DegenerateInputError


def avg_nn_distance(points):
    """Mean distance from each point to its nearest other point."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if len(pts) < 2:
        raise DegenerateInputError("need at least two points")
    dist, _ = cKDTree(pts).query(pts, k=2)
    return float(dist[:, 1].mean())


def nearest_distances(query, points):
    """Distance from every query point to its nearest point in ``points``."""
    dist, _ = cKDTree(np.asarray(points, dtype=np.float64)).query(np.asarray(query, dtype=np.float64), k=1)
    return dist
