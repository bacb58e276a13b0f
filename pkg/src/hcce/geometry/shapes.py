"""Procedural test meshes (meters), centered on their bounding box."""

import numpy as np

from .mesh import TriangleMesh

BUILTIN = ("cube", "icosphere", "lbracket")


def cube(size=0.1):
    h = size / 2.0
    v = np.array([[x, y, z] for x in (-h, h) for y in (-h, h) for z in (-h, h)])
    # faces as quads of vertex ids (bit 2 = x, bit 1 = y, bit 0 = z)
    quads = [(0, 1, 3, 2), (4, 6, 7, 5), (0, 4, 5, 1), (2, 3, 7, 6), (0, 2, 6, 4), (1, 5, 7, 3)]
    tris = [t for a, b, c, d in quads for t in ((a, b, c), (a, c, d))]
    return TriangleMesh.from_arrays(v, tris)


def icosphere(radius=0.06, subdivisions=2):
    p = (1 + 5 ** 0.5) / 2
    v = [(-1, p, 0), (1, p, 0), (-1, -p, 0), (1, -p, 0), (0, -1, p), (0, 1, p),
         (0, -1, -p), (0, 1, -p), (p, 0, -1), (p, 0, 1), (-p, 0, -1), (-p, 0, 1)]
    f = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11), (1, 5, 9), (5, 11, 4),
         (11, 10, 2), (10, 7, 6), (7, 1, 8), (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8),
         (3, 8, 9), (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    verts = [np.array(x, dtype=np.float64) / np.linalg.norm(x) for x in v]
    for _ in range(subdivisions):
        cache = {}

        def mid(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = verts[a] + verts[b]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        nf = []
        for a, b, c in f:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            nf += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        f = nf
    return TriangleMesh.from_arrays(np.array(verts) * radius, f)


def lbracket(width=0.12, height=0.10, thickness=0.03, depth=0.05):
    """Extruded L profile: a non-convex solid."""
    w, h, t = width, height, thickness
    poly = np.array([(0, 0), (w, 0), (w, t), (t, t), (t, h), (0, h)], dtype=np.float64)
    n = len(poly)
    v = np.vstack([np.c_[poly, np.zeros(n)], np.c_[poly, np.full(n, depth)]])
    v -= (v.min(axis=0) + v.max(axis=0)) / 2
    # every profile vertex is visible from vertex 0, so a fan is valid
    cap = [(0, k, k + 1) for k in range(1, n - 1)]
    tris = [(a, c, b) for a, b, c in cap] + [(a + n, b + n, c + n) for a, b, c in cap]
    for k in range(n):
        j = (k + 1) % n
        tris += [(k, j, j + n), (k, j + n, k + n)]
    return TriangleMesh.from_arrays(v, tris)


def builtin(name):
    try:
        return {"cube": cube, "icosphere": icosphere, "lbracket": lbracket}[name]()
    except KeyError:
        raise ValueError(f"unknown builtin mesh {name!r}; choose from {BUILTIN}") from None
