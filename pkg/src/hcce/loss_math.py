"""Loss terms for training a network on HCCE targets.

Only the numerics live here (no autodiff). Per-pixel codes are arrays of
shape ``(n, levels)`` for one coordinate component, or ``(n, 3, levels)``
for a whole surface. Error histograms are recomputed from each batch;
smoothing them over training steps is the caller's business.
"""

from dataclasses import dataclass, field

import numpy as np

from .codec import LEVELS, hcce_to_binary
from .errors import ShapeMismatchError, UndefinedHistogramError

SURFACES = ("front", "back")
COMPONENTS = ("x", "y", "z")


@dataclass(frozen=True)
class LossConfig:
    sigma: float = 4.0
    gamma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")


@dataclass(frozen=True)
class LevelErrorHistogram:
    error_rates: np.ndarray
    intensities: np.ndarray
    weights: np.ndarray = field(repr=False)

    @classmethod
    def from_rates(cls, error_rates, sigma):
        r = np.asarray(error_rates, dtype=np.float64)
        h = histogram_intensity(r, sigma)
        return cls(r, h, level_weights(h))


def level_error_rates(pred_codes, gt_bits):
    """Share of pixels whose binarized prediction disagrees with the label, per level."""
    pred = np.asarray(pred_codes, dtype=np.float64)
    gt = np.asarray(gt_bits)
    if pred.shape != gt.shape:
        raise ShapeMismatchError(f"prediction {pred.shape} vs labels {gt.shape}")
    if pred.ndim != 2 or pred.shape[0] == 0:
        raise UndefinedHistogramError("error rates need at least one masked pixel")
    wrong = hcce_to_binary(pred) != gt.astype(np.uint8)
    return wrong.mean(axis=0)


def histogram_intensity(r, sigma):
    """exp(sigma * min(r, 0.5 - r)); peaks at r = 0.25, drops below 1 past r = 0.5."""
    r = np.asarray(r, dtype=np.float64)
    h = np.exp(sigma * np.minimum(r, 0.5 - r))
    return float(h) if h.ndim == 0 else h


def level_weights(intensities):
    h = np.asarray(intensities, dtype=np.float64)
    if not np.all(h > 0):
        raise ValueError("intensities must be positive")
    return h / h.sum()


def hierarchical_component_loss(pred_codes, gt_codes, weights):
    """sum_i w_i * sum_j |C_ij - C~_ij| over levels i and masked pixels j."""
    pred = np.asarray(pred_codes, dtype=np.float64)
    gt = np.asarray(gt_codes, dtype=np.float64)
    if pred.shape != gt.shape:
        raise ShapeMismatchError(f"prediction {pred.shape} vs labels {gt.shape}")
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != pred.shape[-1:]:
        raise ShapeMismatchError(f"{w.shape[0]} weights for {pred.shape[-1]} levels")
    per_level = np.abs(pred - gt).sum(axis=0)
    return float(w @ per_level)


def mask_loss(pred_mask, gt_mask):
    """L1 distance summed over all pixels (not averaged)."""
    pred = np.asarray(pred_mask, dtype=np.float64)
    gt = np.asarray(gt_mask, dtype=np.float64)
    if pred.shape != gt.shape:
        raise ShapeMismatchError(f"prediction {pred.shape} vs labels {gt.shape}")
    return float(np.abs(pred - gt).sum())


def predicted_mask(mask_logits):
    """Pixels with a positive mask output count as object."""
    return np.asarray(mask_logits) > 0


def total_loss(mask_l, front_l, back_l, gamma):
    return mask_l + gamma * (front_l + back_l)


def surface_losses(pred, gt, config, single_histogram=False):
    """Weighted hierarchical losses for both surfaces.

    ``pred`` and ``gt`` map ``"front"``/``"back"`` to continuous codes of shape
    ``(n, 3, levels)`` for the pixels inside the predicted mask. One error
    histogram is kept per surface and component (six in total); with
    ``single_histogram`` the six error-rate vectors are pooled into one, the
    baseline the per-component scheme is compared against.

    Returns ``(losses, histograms)`` where ``losses`` maps each surface to
    ``L_x + L_y + L_z`` and ``histograms`` maps ``(surface, component)`` to a
    :class:`LevelErrorHistogram`.
    """
    rates = {}
    for s in SURFACES:
        p, g = np.asarray(pred[s]), np.asarray(gt[s])
        if p.shape != g.shape or p.ndim != 3 or p.shape[1] != 3:
            raise ShapeMismatchError(f"{s}: expected matching (n, 3, levels), got {p.shape} and {g.shape}")
        gt_bits = hcce_to_binary(g)
        for c, name in enumerate(COMPONENTS):
            rates[s, name] = level_error_rates(p[:, c], gt_bits[:, c])

    if single_histogram:
        pooled = np.mean(list(rates.values()), axis=0)
        rates = {key: pooled for key in rates}

    histograms = {key: LevelErrorHistogram.from_rates(r, config.sigma) for key, r in rates.items()}
    losses = {}
    for s in SURFACES:
        p, g = np.asarray(pred[s], dtype=np.float64), np.asarray(gt[s], dtype=np.float64)
        losses[s] = sum(
            hierarchical_component_loss(p[:, c], g[:, c], histograms[s, name].weights)
            for c, name in enumerate(COMPONENTS)
        )
    return losses, histograms


def weight_trajectory(error_rate_schedule, sigma, levels=LEVELS):
    """Intensities and weights for a sequence of per-level error-rate vectors."""
    rows = []
    for r in error_rate_schedule:
        r = np.asarray(r, dtype=np.float64)
        if r.shape != (levels,):
            raise ShapeMismatchError(f"expected {levels} error rates, got {r.shape}")
        rows.append(LevelErrorHistogram.from_rates(r, sigma))
    return rows


def synthetic_schedule(epochs, levels=LEVELS, spread=1.5):
    """Error rates of a network that masters levels from coarse to fine.

    Level ``i`` starts near 0.5 (chance) and decays with a logistic whose
    midpoint moves from level 1 at the first epoch to the last level at the
    final epoch.
    """
    out = []
    for e in range(epochs):
        progress = e / max(epochs - 1, 1)
        frontier = 1 + progress * levels
        lv = np.arange(1, levels + 1)
        out.append(0.5 / (1.0 + np.exp(-(lv - frontier) / (spread * 0.5))))
    return out
