"""RANSAC-PnP constrained to one 3D point per pixel.

Each iteration draws ``sample_size`` distinct pixel groups and then one
record uniformly inside each group, so a minimal sample never pairs two 3D
points with the same 2D location. Hypotheses are scored on front and back
records only: most inliers under the pixel threshold wins, ties go to the
lower mean inlier error and then to the earlier iteration.

Every iteration owns an RNG stream seeded by ``(seed, iteration)``, so the
result does not depend on how iterations are spread over threads.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..correspondence import MID
from ..errors import DegenerateConfigurationError, InsufficientDataError, NoPoseError
from ..geometry.camera import MIN_DEPTH, Pose
from ..geometry.rotation import orthonormalize
from .epnp import epnp_raw, epnp_solve

SCORING = ("inliers", "mean_error")


@dataclass(frozen=True)
class RansacConfig:
    iterations: int = 150
    threshold: float = 2.0
    sample_size: int = 4
    seed: int = 0
    refine: bool = True
    scoring: str = "inliers"
    score_all_sources: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not self.threshold > 0:
            raise ValueError("threshold must be positive")
        if self.sample_size < 4:
            raise ValueError("sample_size must be >= 4")
        if self.scoring not in SCORING:
            raise ValueError(f"scoring must be one of {SCORING}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class PoseEstimate:
    pose: Pose
    inlier_count: int
    mean_inlier_error: float
    iterations_used: int
    degenerate_iterations: int = 0
    refined: bool = False


def _point_errors(pose, points, pixels, K):
    return _rt_errors(pose.rotation, pose.translation, points, pixels, K)


def _rt_errors(rot, trans, points, pixels, K):
    cam = points @ rot.T + trans
    z = cam[:, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        du = K.fx * cam[:, 0] / z + K.cx - pixels[:, 0]
        dv = K.fy * cam[:, 1] / z + K.cy - pixels[:, 1]
        err = np.sqrt(du * du + dv * dv)
    err[~(z > MIN_DEPTH)] = np.inf
    return err


def reprojection_errors(pose, cset, K, include_mid=False):
    """Pixel distance from each projected record to its pixel center.

    Mid (interpolated) records get NaN unless ``include_mid``; records behind
    the camera get +inf.
    """
    if len(cset) == 0:
        return np.zeros(0)
    err = _point_errors(pose, cset.points, cset.pixels, K)
    if not include_mid:
        err[cset.source == MID] = np.nan
    return err


def sample_records(cset, rng, sample_size):
    """Record indices: ``sample_size`` distinct groups, one record from each."""
    groups = rng.choice(cset.n_groups, size=sample_size, replace=False)
    within = rng.integers(0, cset.group_sizes[groups])
    return cset.group_starts[groups] + within


def _score(err, threshold, scoring):
    inl = err < threshold
    count = int(inl.sum())
    mean = float(err[inl].mean()) if count else np.inf
    if scoring == "inliers":
        key = (count, -mean)
    else:
        # truncated mean error over all scored records, lower is better
        key = (-float(np.minimum(err, threshold).mean()), count)
    return key, count, mean


def ransac_pnp(cset, K, cfg=RansacConfig(), on_sample=None):
    """Robust pose from a correspondence set.

    ``on_sample(iteration, record_indices)`` is called for every drawn
    sample (used to audit the one-point-per-pixel rule).
    """
    if cset.n_groups < cfg.sample_size:
        raise InsufficientDataError(
            f"{cset.n_groups} distinct pixels, need at least {cfg.sample_size}"
        )
    scored = np.ones(len(cset), bool) if cfg.score_all_sources else cset.source != MID
    s_points = cset.points[scored]
    s_pixels = cset.pixels[scored]

    def run(it):
        rng = np.random.default_rng([cfg.seed, it])
        idx = sample_records(cset, rng, cfg.sample_size)
        assert len(np.unique(cset.group[idx])) == cfg.sample_size, "duplicate pixel in sample"
        if on_sample is not None:
            on_sample(it, idx)
        try:
            rot, trans, _ = epnp_raw(cset.points[idx], cset.pixels[idx], K)
        except DegenerateConfigurationError:
            return None
        err = _rt_errors(rot, trans, s_points, s_pixels, K)
        key, count, mean = _score(err, cfg.threshold, cfg.scoring)
        return key, (rot, trans), count, mean

    if cfg.workers > 1 and on_sample is None:
        with ThreadPoolExecutor(cfg.workers) as ex:
            results = list(ex.map(run, range(cfg.iterations)))
    else:
        results = [run(it) for it in range(cfg.iterations)]

    best = None
    degenerate = 0
    for res in results:  # iteration order: earlier wins ties
        if res is None:
            degenerate += 1
        elif best is None or res[0] > best[0]:
            best = res
    if best is None:
        raise NoPoseError(f"all {cfg.iterations} RANSAC iterations were degenerate")
    _, (rot, trans), count, mean = best
    pose = Pose(orthonormalize(rot), trans)

    refined = False
    if cfg.refine:
        # refit on every record within the threshold, interpolated ones included
        all_err = _point_errors(pose, cset.points, cset.pixels, K)
        inl = all_err < cfg.threshold
        if inl.sum() >= 4:
            try:
                cand = epnp_solve(cset.points[inl], cset.pixels[inl], K)
            except DegenerateConfigurationError:
                cand = None
            if cand is not None:
                err = _point_errors(cand, s_points, s_pixels, K)
                _, c_count, c_mean = _score(err, cfg.threshold, cfg.scoring)
                if c_count >= count:
                    pose, count, mean, refined = cand, c_count, c_mean, True
    return PoseEstimate(pose, count, mean, cfg.iterations, degenerate, refined)
