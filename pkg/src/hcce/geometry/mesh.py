"""Triangle meshes and ASCII OBJ / PLY reading and writing."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.distance import pdist

from ..codec import BoundingNormalizer
from ..errors import EmptyMeshError, MeshParseError

# Flat meshes still need a positive normalizer extent on every axis.
_MIN_EXTENT = 1e-9


@dataclass(frozen=True)
class TriangleMesh:
    vertices: np.ndarray
    triangles: np.ndarray
    diameter: float
    bounds: BoundingNormalizer

    @classmethod
    def from_arrays(cls, vertices, triangles):
        v = np.ascontiguousarray(vertices, dtype=np.float64).reshape(-1, 3)
        f = np.ascontiguousarray(triangles, dtype=np.int64).reshape(-1, 3)
        if len(v) == 0 or len(f) == 0:
            raise EmptyMeshError("mesh has no vertices or no faces")
        if f.min() < 0 or f.max() >= len(v):
            raise MeshParseError("triangle index out of range")
        diam = mesh_diameter(v)
        if not diam > 0:
            raise EmptyMeshError("mesh has zero diameter")
        lo, hi = v.min(axis=0), v.max(axis=0)
        ext = np.maximum(hi - lo, _MIN_EXTENT * max(diam, 1.0))
        return cls(v, f, diam, BoundingNormalizer(lo, ext))

    def __len__(self):
        return len(self.vertices)


def mesh_diameter(vertices):
    """Largest vertex-to-vertex distance, searched over convex hull vertices."""
    v = np.asarray(vertices, dtype=np.float64)
    if len(v) < 2:
        return 0.0
    try:
        cand = v[ConvexHull(v).vertices]
    except (QhullError, ValueError):
        cand = v
    return float(pdist(cand).max())


def load_mesh(path):
    path = Path(path)
    text = path.read_text()
    suffix = path.suffix.lower()
    if suffix == ".obj":
        v, f = parse_obj(text)
    elif suffix == ".ply":
        v, f = parse_ply(text)
    else:
        raise MeshParseError(f"unsupported mesh format {suffix!r}")
    return TriangleMesh.from_arrays(v, f)


def _fan(poly):
    return [(poly[0], poly[k], poly[k + 1]) for k in range(1, len(poly) - 1)]


def parse_obj(text):
    verts, faces = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split("#", 1)[0].split()
        if not parts:
            continue
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise MeshParseError("vertex needs three coordinates", lineno)
            try:
                verts.append([float(x) for x in parts[1:4]])
            except ValueError:
                raise MeshParseError(f"bad vertex coordinate in {raw.strip()!r}", lineno) from None
        elif tag == "f":
            if len(parts) < 4:
                raise MeshParseError("face needs at least three vertices", lineno)
            poly = []
            for tok in parts[1:]:
                try:
                    idx = int(tok.split("/")[0])
                except ValueError:
                    raise MeshParseError(f"bad face index {tok!r}", lineno) from None
                if idx == 0:
                    raise MeshParseError("OBJ indices are 1-based", lineno)
                idx = idx - 1 if idx > 0 else len(verts) + idx
                if not 0 <= idx < len(verts):
                    raise MeshParseError(f"face index {tok} out of range", lineno)
                poly.append(idx)
            faces.extend(_fan(poly))
    if not faces:
        raise EmptyMeshError("OBJ file contains no faces")
    return np.array(verts, dtype=np.float64), np.array(faces, dtype=np.int64)


def parse_ply(text):
    lines = text.splitlines()
    if not lines or lines[0].strip() != "ply":
        raise MeshParseError("missing 'ply' magic", 1)
    elements = []  # (name, count, [property names])
    lineno = 1
    while True:
        if lineno >= len(lines):
            raise MeshParseError("header has no end_header", lineno)
        parts = lines[lineno].split()
        lineno += 1
        if not parts or parts[0] in ("comment", "obj_info"):
            continue
        if parts[0] == "format":
            if len(parts) < 2 or parts[1] != "ascii":
                raise MeshParseError("only ASCII PLY is supported", lineno)
        elif parts[0] == "element":
            if len(parts) != 3:
                raise MeshParseError("malformed element line", lineno)
            try:
                elements.append((parts[1], int(parts[2]), []))
            except ValueError:
                raise MeshParseError("bad element count", lineno) from None
        elif parts[0] == "property":
            if not elements:
                raise MeshParseError("property before any element", lineno)
            elements[-1][2].append(parts[-1])
        elif parts[0] == "end_header":
            break
        else:
            raise MeshParseError(f"unknown header keyword {parts[0]!r}", lineno)

    verts, faces = [], []
    for name, count, props in elements:
        for _ in range(count):
            if lineno >= len(lines):
                raise MeshParseError(f"unexpected end of file in element {name!r}", lineno + 1)
            parts = lines[lineno].split()
            lineno += 1
            try:
                if name == "vertex":
                    row = [float(x) for x in parts]
                    verts.append([row[props.index(a)] for a in ("x", "y", "z")])
                elif name == "face":
                    n = int(parts[0])
                    poly = [int(x) for x in parts[1:1 + n]]
                    if len(poly) != n or n < 3:
                        raise MeshParseError("face list length mismatch", lineno)
                    if any(not 0 <= i < len(verts) for i in poly):
                        raise MeshParseError("face index out of range", lineno)
                    faces.extend(_fan(poly))
            except (ValueError, IndexError):
                raise MeshParseError(f"bad {name} record", lineno) from None
    if not faces:
        raise EmptyMeshError("PLY file contains no faces")
    return np.array(verts, dtype=np.float64), np.array(faces, dtype=np.int64)


def save_obj(mesh, path):
    with open(path, "w") as fh:
        for x, y, z in mesh.vertices.tolist():
            fh.write(f"v {x!r} {y!r} {z!r}\n")
        for a, b, c in (mesh.triangles + 1).tolist():
            fh.write(f"f {a} {b} {c}\n")


def save_ply(mesh, path):
    with open(path, "w") as fh:
        fh.write("ply\nformat ascii 1.0\n")
        fh.write(f"element vertex {len(mesh.vertices)}\n")
        fh.write("property float x\nproperty float y\nproperty float z\n")
        fh.write(f"element face {len(mesh.triangles)}\n")
        fh.write("property list uchar int vertex_indices\nend_header\n")
        for x, y, z in mesh.vertices.tolist():
            fh.write(f"{x!r} {y!r} {z!r}\n")
        for a, b, c in mesh.triangles.tolist():
            fh.write(f"3 {a} {b} {c}\n")
