"""Hot kernels with a compiled core and a pure numpy fallback.

The Cython extension ``_ckernels`` is used when it was built; otherwise the
numpy implementation in ``_pykernels`` is used. Setting the environment
variable ``HCCE_PURE_PYTHON=1`` forces the fallback.
"""

import os

import numpy as np

from . import _pykernels

if os.environ.get("HCCE_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"


def raycast_surfaces(cam_vertices, triangles, fx, fy, cx, cy, width, height, backend=None):
    """Per-pixel nearest/farthest ray parameter, +inf/-inf where no hit."""
    impl = _select(backend)
    return impl.raycast_surfaces(
        np.ascontiguousarray(cam_vertices, dtype=np.float64),
        np.ascontiguousarray(triangles, dtype=np.int64),
        float(fx), float(fy), float(cx), float(cy), int(width), int(height),
    )


def hcce_to_binary(codes, backend=None):
    impl = _select(backend)
    return impl.hcce_to_binary(np.ascontiguousarray(codes, dtype=np.float64))


def _select(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _pykernels
    if backend == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown kernel backend {backend!r}")


def gauss_newton_betas(g, rho, betas, iters, backend=None):
    """Gauss-Newton on the EPnP scale unknowns (at most 4)."""
    impl = _select(backend)
    return impl.gauss_newton_betas(
        np.ascontiguousarray(g, dtype=np.float64),
        np.ascontiguousarray(rho, dtype=np.float64),
        np.ascontiguousarray(betas, dtype=np.float64),
        int(iters),
    )


def epnp(points, pixels, fx, fy, cx, cy, gn_iters, backend=None):
    """EPnP core: (status, R, t, rms); status 0 ok, 1 collinear, 2 rank
    deficient, 3 every candidate behind the camera."""
    impl = _select(backend)
    return impl.epnp(
        np.ascontiguousarray(points, dtype=np.float64),
        np.ascontiguousarray(pixels, dtype=np.float64),
        float(fx), float(fy), float(cx), float(cy), int(gn_iters),
    )
