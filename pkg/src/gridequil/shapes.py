"""Deterministic builders for the convex test bodies used throughout.

Everything here routes through make_mesh, so the returned meshes are
validated (closed, outward-oriented, convex) like any loaded file.
"""

from __future__ import annotations

import numpy as np

from .surface import ConvexMesh, make_mesh


def _icosahedron() -> tuple[np.ndarray, np.ndarray]:
    t = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
        [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
        [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
    ], dtype=float)
    verts /= np.linalg.norm(verts[0])
    faces = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=np.int64)
    return verts, faces


def _subdivide_unit(verts: np.ndarray, faces: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One 4:1 split of every face, new vertices projected to the unit sphere."""
    a, b, c = faces[:, 0], faces[:, 1], faces[:, 2]
    pairs = np.stack([np.sort(np.stack([a, b], axis=1), axis=1),
                      np.sort(np.stack([b, c], axis=1), axis=1),
                      np.sort(np.stack([c, a], axis=1), axis=1)], axis=1)  # (F, 3, 2)
    edges, slot = np.unique(pairs.reshape(-1, 2), axis=0, return_inverse=True)
    mids = verts[edges[:, 0]] + verts[edges[:, 1]]
    mids /= np.linalg.norm(mids, axis=1)[:, None]
    mid_idx = slot.reshape(-1, 3) + len(verts)                             # (F, 3)
    ab, bc, ca = mid_idx[:, 0], mid_idx[:, 1], mid_idx[:, 2]
    out = np.concatenate([
        np.stack([a, ab, ca], axis=1),
        np.stack([b, bc, ab], axis=1),
        np.stack([c, ca, bc], axis=1),
        np.stack([ab, bc, ca], axis=1),
    ])
    return np.concatenate([verts, mids]), out.astype(np.int64)


def icosphere(subdivisions: int = 3, radius: float = 1.0) -> ConvexMesh:
    """Subdivided icosahedron projected to a sphere; 20 * 4^k faces."""
    if subdivisions < 0:
        raise ValueError("subdivisions must be >= 0")
    verts, faces = _icosahedron()
    for _ in range(subdivisions):
        verts, faces = _subdivide_unit(verts, faces)
    return make_mesh(verts * radius, faces)


def ellipsoid(rx: float = 1.0, ry: float = 0.8, rz: float = 0.6,
              subdivisions: int = 4, center=(0.0, 0.0, 0.0)) -> ConvexMesh:
    """Icosphere scaled to semi-axes (rx, ry, rz) and translated to center."""
    verts, faces = _icosahedron()
    for _ in range(subdivisions):
        verts, faces = _subdivide_unit(verts, faces)
    scaled = verts * np.array([rx, ry, rz]) + np.asarray(center, dtype=float)
    return make_mesh(scaled, faces)


def cube(half: float = 0.5, center=(0.0, 0.0, 0.0)) -> ConvexMesh:
    """Axis-aligned cube [-half, half]^3, quads split into 12 triangles."""
    h = float(half)
    base = np.array([
        [-h, -h, -h], [h, -h, -h], [h, h, -h], [-h, h, -h],
        [-h, -h, h], [h, -h, h], [h, h, h], [-h, h, h],
    ]) + np.asarray(center, dtype=float)
    quads = [
        (0, 3, 2, 1), (4, 5, 6, 7),  # bottom, top
        (0, 1, 5, 4), (1, 2, 6, 5),  # front, right
        (2, 3, 7, 6), (3, 0, 4, 7),  # back, left
    ]
    tris = []
    for a, b, c, d in quads:
        tris += [(a, b, c), (a, c, d)]
    return make_mesh(base, np.array(tris, dtype=np.int64))


def tetrahedron(scale: float = 1.0) -> ConvexMesh:
    """Regular tetrahedron with unit circumradius (times ``scale``)."""
    verts = np.array([
        [1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1],
    ], dtype=float) / np.sqrt(3.0) * scale
    faces = np.array([[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]], dtype=np.int64)
    return make_mesh(verts, faces)


def pebble(rx: float = 1.0, ry: float = 0.8, rz: float = 0.6,
           subdivisions: int = 4, amplitude: float = 0.01) -> ConvexMesh:
    """Near-ellipsoidal body: radial harmonic ripple of the given amplitude.

    The ripple is a fixed low-order polynomial in the direction components,
    so the shape is deterministic; at a percent-level amplitude convexity
    survives and make_mesh certifies it.
    """
    verts, faces = _icosahedron()
    for _ in range(subdivisions):
        verts, faces = _subdivide_unit(verts, faces)
    d = verts  # unit directions
    ripple = (0.6 * d[:, 0] * d[:, 1]
              + 0.5 * d[:, 1] * d[:, 2]
              + 0.4 * (1.5 * d[:, 2] ** 2 - 0.5)
              + 0.3 * d[:, 0])
    scaled = verts * np.array([rx, ry, rz]) * (1.0 + amplitude * ripple)[:, None]
    return make_mesh(scaled, faces)
