"""Pose and coordinate accuracy metrics.

ADD averages the displacement of each model vertex between the two poses;
ADD-S matches every vertex to the nearest vertex of the other pose instead
and is meant for symmetric objects (chosen per object, never detected).
"""

from dataclasses import dataclass

import numpy as np

from .errors import UndefinedMetricError
from .geometry.neighbors import nearest_distances
from .geometry.rotation import geodesic_angle

COORD_FRACTIONS = (0.02, 0.05, 0.10)


@dataclass(frozen=True)
class PoseErrorReport:
    add: float
    adds: float
    rot_geodesic: float
    trans_l2: float


def add_error(mesh, pose_gt, pose_pred):
    v = mesh.vertices
    return float(np.linalg.norm(pose_pred.apply(v) - pose_gt.apply(v), axis=1).mean())


def adds_error(mesh, pose_gt, pose_pred):
    v = mesh.vertices
    return float(nearest_distances(pose_gt.apply(v), pose_pred.apply(v)).mean())


def pose_error_report(mesh, pose_gt, pose_pred):
    return PoseErrorReport(
        add=add_error(mesh, pose_gt, pose_pred),
        adds=adds_error(mesh, pose_gt, pose_pred),
        rot_geodesic=geodesic_angle(pose_gt.rotation, pose_pred.rotation),
        trans_l2=float(np.linalg.norm(pose_pred.translation - pose_gt.translation)),
    )


def recall_at_threshold(errors, diameter, fraction=0.1):
    """Share of errors strictly below ``fraction * diameter``."""
    e = np.asarray(errors, dtype=np.float64)
    if e.size == 0:
        raise UndefinedMetricError("recall of an empty error list")
    if not fraction > 0:
        raise ValueError("fraction must be positive")
    return float(np.mean(e < fraction * diameter))


def auc(errors, max_threshold=0.10):
    """Normalized area under recall(tau) for tau in [0, max_threshold].

    recall(tau) is the share of errors below tau, a step function, so each
    error e contributes (max - min(e, max)) / max exactly.
    """
    e = np.asarray(errors, dtype=np.float64)
    if e.size == 0:
        raise UndefinedMetricError("AUC of an empty error list")
    if not max_threshold > 0:
        raise ValueError("max_threshold must be positive")
    return float(np.mean((max_threshold - np.minimum(e, max_threshold)) / max_threshold))


def coordinate_accuracy(pred_map, gt_map, diameter, fractions=COORD_FRACTIONS):
    """Share of pixels (in both masks) with coordinate error below each fraction of the diameter.

    Returns ``{"front": [...], "back": [...]}`` aligned with ``fractions``.
    """
    if pred_map.mask.shape != gt_map.mask.shape:
        raise UndefinedMetricError("coordinate maps differ in size")
    both = pred_map.mask & gt_map.mask
    if not both.any():
        raise UndefinedMetricError("masks do not overlap")
    out = {}
    for surface in ("front", "back"):
        err = np.linalg.norm(getattr(pred_map, surface)[both] - getattr(gt_map, surface)[both], axis=1)
        out[surface] = [float(np.mean(err < f * diameter)) for f in fractions]
    return out
