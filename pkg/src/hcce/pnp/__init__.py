from .epnp import epnp_solve
from .ransac import PoseEstimate, RansacConfig, ransac_pnp, reprojection_errors, sample_records

__all__ = [
    "PoseEstimate",
    "RansacConfig",
    "epnp_solve",
    "ransac_pnp",
    "reprojection_errors",
    "sample_records",
]
