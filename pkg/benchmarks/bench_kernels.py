"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat N] [--json out.json]

Each kernel runs on identical inputs under both backends; the outputs are
checked for agreement before timings are reported.
"""

import argparse
import json
import sys
import timeit

import numpy as np

from hcce import _kernels
from hcce.geometry import CameraIntrinsics, Pose, random_rotation, shapes

K = CameraIntrinsics(320.0, 320.0, 64.0, 64.0, 128, 128)


def _raycast_case():
    mesh = shapes.icosphere()
    pose = Pose(random_rotation(np.random.default_rng(1)), [0.0, 0.0, 0.6])
    cam = pose.apply(mesh.vertices)
    args = (cam, mesh.triangles, K.fx, K.fy, K.cx, K.cy, K.width, K.height)
    return lambda b: _kernels.raycast_surfaces(*args, backend=b)


def _epnp_case(n):
    rng = np.random.default_rng(2)
    pts = rng.uniform(-0.05, 0.05, (n, 3))
    pose = Pose(random_rotation(rng), [0.01, -0.01, 0.6])
    cam = pose.apply(pts)
    uv = np.stack([K.fx * cam[:, 0] / cam[:, 2] + K.cx, K.fy * cam[:, 1] / cam[:, 2] + K.cy], axis=1)
    return lambda b: _kernels.epnp(pts, uv, K.fx, K.fy, K.cx, K.cy, 15, backend=b)


def _hcce_case():
    from hcce.codec import hcce_encode
    codes = hcce_encode(np.random.default_rng(3).random(100_000))
    return lambda b: _kernels.hcce_to_binary(codes, backend=b)


def _agree(a, b):
    if isinstance(a, tuple):
        return all(_agree(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        fin = np.isfinite(a) if a.dtype.kind == "f" else np.ones(a.shape, bool)
        return a.shape == b.shape and np.array_equal(fin, np.isfinite(b) if b.dtype.kind == "f" else fin) \
            and np.allclose(a[fin], b[fin], rtol=1e-9, atol=1e-9)
    return np.isclose(a, b, rtol=1e-9, atol=1e-12) if isinstance(a, float) else a == b


CASES = {
    "raycast icosphere 128x128": _raycast_case,
    "epnp n=4": lambda: _epnp_case(4),
    "epnp n=200": lambda: _epnp_case(200),
    "hcce_to_binary 1e5": _hcce_case,
}


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", default=None)
    args = ap.parse_args(argv)
    try:
        _kernels._select("cython")
    except ImportError:
        print("compiled backend not built; nothing to compare", file=sys.stderr)
        return 1
    results = []
    print(f"{'kernel':<28} {'python (ms)':>12} {'cython (ms)':>12} {'speedup':>8}  agree")
    for name, make in CASES.items():
        fn = make()
        ok = _agree(fn("python"), fn("cython"))
        t = {}
        for b in ("python", "cython"):
            timer = timeit.Timer(lambda: fn(b))
            n, _ = timer.autorange()
            t[b] = min(timer.repeat(args.repeat, n)) / n * 1e3
        results.append({"kernel": name, "python_ms": t["python"], "cython_ms": t["cython"], "agree": bool(ok)})
        print(f"{name:<28} {t['python']:>12.4f} {t['cython']:>12.4f} {t['python'] / t['cython']:>7.1f}x  {ok}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(results, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
