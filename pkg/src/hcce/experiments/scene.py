"""Synthetic scenes and the noise model that stands in for a trained network."""

import numpy as np

from ..codec import quantize_points
from ..coordmap import CoordinateMap
from ..errors import UnrenderableConfigurationError
from ..geometry import Pose, random_rotation, raycast_front_back

MAX_POSE_ATTEMPTS = 100

# substream tags under (seed, scene_index, tag)
POSE_STREAM, NOISE_STREAM, RANSAC_STREAM = 0, 1, 2


def scene_rng(seed, scene_index, stream):
    return np.random.default_rng([seed, scene_index, stream])


def sample_pose(rng, sampler):
    rot = random_rotation(rng)
    trans = rng.uniform(sampler.translation_min, sampler.translation_max)
    return Pose(rot, trans)


def generate_scene(cfg, scene_index, mesh=None):
    """Ground-truth pose and clean coordinate map for one scene.

    Poses are redrawn until the whole mesh is in front of the camera and at
    least one pixel is covered.
    """
    mesh = cfg.load_mesh() if mesh is None else mesh
    rng = scene_rng(cfg.seed, scene_index, POSE_STREAM)
    for _ in range(MAX_POSE_ATTEMPTS):
        pose = sample_pose(rng, cfg.pose_sampler)
        if np.any(pose.apply(mesh.vertices)[:, 2] <= 0):
            continue
        cmap = raycast_front_back(mesh, pose, cfg.camera)
        if cmap.mask.any():
            return pose, cmap
    raise UnrenderableConfigurationError(
        f"scene {scene_index}: no visible pose in {MAX_POSE_ATTEMPTS} attempts; check the translation box"
    )


def _ball(rng, n, radius):
    d = rng.standard_normal((n, 3))
    d /= np.maximum(np.linalg.norm(d, axis=1, keepdims=True), 1e-300)
    return d * (radius * rng.random(n) ** (1.0 / 3.0))[:, None]


def corrupt_map(cmap, noise, seed, diameter, bounds=None):
    """Noisy copy of ``cmap``; the mask is left untouched.

    Front and back coordinates get independent isotropic Gaussian noise with
    sigma ``coord_sigma * diameter``. Then ``round(outlier_rate * n)`` masked
    pixels have both coordinates replaced by uniform draws from a ball of
    radius ``outlier_scale * diameter`` around the clean point. With
    ``codec_quantize`` the result is finally pushed through the HCCE codec
    (``bounds`` required).
    """
    if noise.is_zero:
        return cmap
    rng = np.random.default_rng(seed)
    rows, cols = cmap.masked_pixels()
    n = len(rows)
    clean_f = cmap.front[rows, cols]
    clean_b = cmap.back[rows, cols]
    sigma = noise.coord_sigma * diameter
    front = clean_f + rng.normal(0.0, sigma, clean_f.shape) if sigma > 0 else clean_f.copy()
    back = clean_b + rng.normal(0.0, sigma, clean_b.shape) if sigma > 0 else clean_b.copy()

    n_out = int(round(noise.outlier_rate * n))
    if n_out:
        idx = rng.choice(n, size=n_out, replace=False)
        radius = noise.outlier_scale * diameter
        front[idx] = clean_f[idx] + _ball(rng, n_out, radius)
        back[idx] = clean_b[idx] + _ball(rng, n_out, radius)

    if noise.codec_quantize:
        if bounds is None:
            raise ValueError("codec_quantize needs the mesh bounds")
        front = quantize_points(front, bounds)
        back = quantize_points(back, bounds)

    out_f = cmap.front.copy()
    out_b = cmap.back.copy()
    out_f[rows, cols] = front
    out_b[rows, cols] = back
    return CoordinateMap(cmap.mask, out_f, out_b)
