"""Triangulated convex bodies: ingestion, centroid, radial field, census.

The radial distance from the solid centroid to the boundary, parametrized
by longitude u and colatitude v, is the scalar field whose grid-circle
extrema are the body's stable (S) and unstable (U) equilibria; saddles
follow from N = S + U - 2 on the sphere.

Ray queries never test individual triangles against epsilon thresholds.
The mesh is treated as an intersection of halfspaces and the exit
parameter is clipped against all face planes at once, which is watertight
on convex input by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .detect import (
    Census,
    MODE_CLOSED_SURFACE,
    circle_maxima,
    circle_minima,
    equilibrium_census,
    radius_bound,
    radius_sweep,
)
from .errors import (
    ConvexityError,
    DegenerateFieldError,
    DegenerateMeshError,
    MeshFormatError,
    NonClosedMeshError,
)
from .fields import ScalarField, eigens_from_hessian
from .grid import GridSampling, SPHERE_CHART, Vertex, sample
from .errors import DegenerateHessianError

CHART_A = 2 * math.pi   # longitude span
CHART_B = math.pi       # colatitude span

CONVEXITY_TOL_FRACTION = 1e-8   # of the bounding-box diagonal
DEGENERATE_SPREAD_TOL = 1e-3    # relative radial spread below which a census is refused


@dataclass(frozen=True)
class ConvexMesh:
    """Closed, outward-oriented, convexity-certified triangle mesh."""

    vertices: np.ndarray        # (V, 3)
    triangles: np.ndarray       # (F, 3) int, outward orientation
    centroid: np.ndarray        # (3,) solid centroid, uniform density
    volume: float
    convexity_tol: float
    face_normals: np.ndarray    # (F, 3) unit outward normals
    face_offsets: np.ndarray    # (F,)  n . x = offset on the face plane

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_faces(self) -> int:
        return len(self.triangles)


def direction(u: float, v: float) -> np.ndarray:
    """Unit direction for longitude u, colatitude v (v=0 points along +z)."""
    sv = np.sin(v)
    return np.array([sv * np.cos(u), sv * np.sin(u), np.cos(v)])


def _check_closed(triangles: np.ndarray, num_vertices: int) -> None:
    T = triangles.astype(np.int64)
    if np.any((T[:, 0] == T[:, 1]) | (T[:, 1] == T[:, 2]) | (T[:, 2] == T[:, 0])):
        raise NonClosedMeshError("degenerate triangle with a repeated vertex")
    heads = np.concatenate([T[:, 0], T[:, 1], T[:, 2]])
    tails = np.concatenate([T[:, 1], T[:, 2], T[:, 0]])
    keys = heads * num_vertices + tails
    if np.unique(keys).size != keys.size:
        raise NonClosedMeshError("a directed edge appears in two triangles; orientation is inconsistent")
    if not np.array_equal(np.sort(keys), np.sort(tails * num_vertices + heads)):
        raise NonClosedMeshError("an edge lacks its oppositely traversed twin; surface is not closed")


def solid_centroid(vertices: np.ndarray, triangles: np.ndarray,
                   origin=None) -> tuple[np.ndarray, float]:
    """(centroid, signed volume) of the enclosed solid by tetrahedron decomposition.

    The result is independent of the reference origin up to round-off.
    """
    P = np.asarray(vertices, dtype=float)
    T = np.asarray(triangles, dtype=int)
    o = np.zeros(3) if origin is None else np.asarray(origin, dtype=float)
    A, B, C = P[T[:, 0]] - o, P[T[:, 1]] - o, P[T[:, 2]] - o
    vols = np.einsum("ij,ij->i", A, np.cross(B, C)) / 6.0
    volume = float(vols.sum())
    if volume == 0.0:
        raise DegenerateMeshError("mesh encloses zero volume")
    moments = vols[:, None] * (A + B + C) / 4.0
    return o + moments.sum(axis=0) / volume, volume


def make_mesh(vertices, triangles, convexity_tol: Optional[float] = None) -> ConvexMesh:
    """Validate raw arrays into a ConvexMesh.

    Checks: closed orientable surface, positive enclosed volume (triangles
    flipped wholesale if the input winds inward), convexity within
    tolerance, centroid strictly interior.
    """
    P = np.ascontiguousarray(np.asarray(vertices, dtype=float))
    T = np.ascontiguousarray(np.asarray(triangles, dtype=np.int64))
    if P.ndim != 2 or P.shape[1] != 3 or len(P) < 4:
        raise MeshFormatError("need at least 4 vertices with 3 coordinates each")
    if T.ndim != 2 or T.shape[1] != 3:
        raise MeshFormatError("triangles must be index triples")
    if T.min() < 0 or T.max() >= len(P):
        raise MeshFormatError("triangle index out of range")
    _check_closed(T, len(P))

    bbox_diag = float(np.linalg.norm(P.max(axis=0) - P.min(axis=0)))
    if bbox_diag == 0.0:
        raise DegenerateMeshError("all vertices coincide")
    tol = CONVEXITY_TOL_FRACTION * bbox_diag if convexity_tol is None else float(convexity_tol)

    centroid, volume = solid_centroid(P, T)
    if volume < 0:
        T = T[:, ::-1].copy()
        centroid, volume = solid_centroid(P, T)
    if volume < 1e-12 * bbox_diag ** 3:
        raise DegenerateMeshError(f"enclosed volume {volume:g} is negligible")

    normals = np.cross(P[T[:, 1]] - P[T[:, 0]], P[T[:, 2]] - P[T[:, 0]])
    lengths = np.linalg.norm(normals, axis=1)
    if np.any(lengths < 1e-300):
        raise DegenerateMeshError("zero-area triangle")
    normals = normals / lengths[:, None]
    offsets = np.einsum("ij,ij->i", normals, P[T[:, 0]])

    # Convexity certificate: no vertex may lie outside any face plane.
    worst = (-np.inf, -1, -1)
    chunk = max(1, 2_000_000 // max(1, len(P)))
    for f0 in range(0, len(T), chunk):
        block = normals[f0:f0 + chunk] @ P.T - offsets[f0:f0 + chunk, None]
        k = int(np.argmax(block))
        fi, vi = divmod(k, len(P))
        if block[fi, vi] > worst[0]:
            worst = (float(block[fi, vi]), f0 + fi, vi)
    if worst[0] > tol:
        raise ConvexityError(
            f"vertex {worst[2]} lies {worst[0]:g} outside face {worst[1]} plane (tol {tol:g})",
            vertex=worst[2], face=worst[1], violation=worst[0],
        )

    inside = normals @ centroid - offsets
    if inside.max() >= -tol:
        raise DegenerateMeshError("solid centroid is not strictly interior")

    return ConvexMesh(vertices=P, triangles=T, centroid=centroid, volume=volume,
                      convexity_tol=tol, face_normals=normals, face_offsets=offsets)


# -- file formats -----------------------------------------------------------

def _fan(indices: list[int]) -> list[tuple[int, int, int]]:
    return [(indices[0], indices[k], indices[k + 1]) for k in range(1, len(indices) - 1)]


def _parse_off(lines: list[str]) -> tuple[list, list]:
    rows = [ln.split("#", 1)[0].strip() for ln in lines]
    rows = [r for r in rows if r]
    if not rows:
        raise MeshFormatError("empty OFF file")
    header = rows.pop(0)
    if header != "OFF":
        # Allow the counts to share the header line ("OFF 8 12 18").
        if header.startswith("OFF"):
            rows.insert(0, header[3:].strip())
        else:
            raise MeshFormatError("missing OFF header")
    counts = rows.pop(0).split()
    if len(counts) < 2:
        raise MeshFormatError("malformed OFF counts line")
    nv, nf = int(counts[0]), int(counts[1])
    if len(rows) < nv + nf:
        raise MeshFormatError(f"OFF file truncated: expected {nv} vertices + {nf} faces")
    try:
        verts = [tuple(float(t) for t in rows[k].split()[:3]) for k in range(nv)]
        tris: list[tuple[int, int, int]] = []
        for k in range(nv, nv + nf):
            tokens = rows[k].split()
            m = int(tokens[0])
            if m < 3 or len(tokens) < 1 + m:
                raise MeshFormatError(f"malformed OFF face line: {rows[k]!r}")
            tris.extend(_fan([int(t) for t in tokens[1:1 + m]]))
    except (ValueError, IndexError) as exc:
        raise MeshFormatError(f"malformed OFF data: {exc}") from exc
    return verts, tris


def _parse_obj(lines: list[str]) -> tuple[list, list]:
    verts: list[tuple[float, float, float]] = []
    tris: list[tuple[int, int, int]] = []
    try:
        for ln in lines:
            tokens = ln.split("#", 1)[0].split()
            if not tokens:
                continue
            if tokens[0] == "v":
                verts.append(tuple(float(t) for t in tokens[1:4]))
            elif tokens[0] == "f":
                idx = []
                for tok in tokens[1:]:
                    raw = int(tok.split("/", 1)[0])
                    idx.append(raw - 1 if raw > 0 else len(verts) + raw)
                if len(idx) < 3:
                    raise MeshFormatError(f"face with fewer than 3 vertices: {ln!r}")
                tris.extend(_fan(idx))
    except ValueError as exc:
        raise MeshFormatError(f"malformed OBJ data: {exc}") from exc
    if not verts or not tris:
        raise MeshFormatError("OBJ file holds no usable geometry")
    return verts, tris


def load_mesh(path, fmt: Optional[str] = None,
              convexity_tol: Optional[float] = None) -> ConvexMesh:
    """Read an OFF or OBJ file into a validated ConvexMesh.

    Polygonal faces are fan-triangulated; OBJ normals and texture records
    are ignored. The format is inferred from the extension unless given.
    """
    path = str(path)
    if fmt is None:
        lower = path.lower()
        if lower.endswith(".off"):
            fmt = "off"
        elif lower.endswith(".obj"):
            fmt = "obj"
        else:
            raise MeshFormatError(f"cannot infer mesh format from {path!r}")
    fmt = fmt.lower()
    with open(path) as fh:
        lines = fh.readlines()
    if fmt == "off":
        verts, tris = _parse_off(lines)
    elif fmt == "obj":
        verts, tris = _parse_obj(lines)
    else:
        raise MeshFormatError(f"unsupported mesh format {fmt!r}")
    return make_mesh(verts, tris, convexity_tol=convexity_tol)


def save_off(mesh: ConvexMesh, path) -> None:
    """Write a mesh as an OFF file (shortest round-trip coordinates)."""
    lines = ["OFF", f"{mesh.num_vertices} {mesh.num_faces} 0"]
    for p in mesh.vertices:
        lines.append(f"{p[0]!r} {p[1]!r} {p[2]!r}")
    for t in mesh.triangles:
        lines.append(f"3 {t[0]} {t[1]} {t[2]}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# -- radial field ------------------------------------------------------------

def _radial_batch(mesh: ConvexMesh, dirs: np.ndarray) -> np.ndarray:
    """Centroid-to-boundary distances along unit directions, shape (Q,).

    The exit parameter of a ray against an intersection of halfspaces
    {x : n.x <= d} from an interior point c is 1 / max_f (dir . n_f / (d_f
    - n_f.c)); a single matrix product and row maximum per query block.
    """
    numer = mesh.face_offsets - mesh.face_normals @ mesh.centroid  # all > 0
    scaled = mesh.face_normals / numer[:, None]                    # (F, 3)
    out = np.empty(len(dirs))
    chunk = max(16, 2_000_000 // max(1, mesh.num_faces))
    for q0 in range(0, len(dirs), chunk):
        inv = (dirs[q0:q0 + chunk] @ scaled.T).max(axis=1)
        out[q0:q0 + chunk] = inv
    if out.min() <= 0:
        raise DegenerateMeshError("a ray failed to exit the mesh; input is not a closed convex body")
    return 1.0 / out


def radial_function(mesh: ConvexMesh, u: float, v: float) -> float:
    """Distance from the solid centroid to the surface along direction (u, v)."""
    return float(_radial_batch(mesh, direction(u, v)[None, :])[0])


def radial_field(mesh: ConvexMesh) -> ScalarField:
    """The radial distance as a ScalarField on the sphere chart [0,2pi]x[0,pi]."""

    def fn(u, v):
        return radial_function(mesh, u, v)

    def grid_fn(U, V):
        U = np.asarray(U, dtype=float)
        V = np.asarray(V, dtype=float)
        sv = np.sin(V.ravel())
        dirs = np.stack([sv * np.cos(U.ravel()), sv * np.sin(U.ravel()), np.cos(V.ravel())], axis=1)
        return _radial_batch(mesh, dirs).reshape(U.shape)

    return ScalarField(a=CHART_A, b=CHART_B, fn=fn, grid_fn=grid_fn, name="radial")


# -- closed-surface census -----------------------------------------------------

@dataclass(frozen=True)
class SurfaceCensus:
    """Census of a convex body plus the 3D positions of its equilibria."""

    census: Census
    positions_minima: list[tuple[float, float, float]]
    positions_maxima: list[tuple[float, float, float]]
    mesh_stats: dict
    grid: GridSampling


def _fit_hessian_ratio(field: ScalarField, x: float, y: float, h: float) -> Optional[float]:
    """Eigenvalue ratio from a least-squares quadratic over a 5x5 patch.

    Returns None when the fitted Hessian is indefinite or singular. The
    patch may extend past the chart seams; the radial evaluator continues
    smoothly across them.
    """
    offs = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * (h / 2.0)
    DX, DY = np.meshgrid(offs, offs, indexing="ij")
    X, Y = x + DX, y + DY
    if field.grid_fn is not None:
        F = field.grid_fn(X, Y)
    else:
        F = field.eval_grid(X, Y)
    dx, dy, f = DX.ravel(), DY.ravel(), F.ravel()
    A = np.column_stack([np.ones_like(dx), dx, dy, dx * dx, dx * dy, dy * dy])
    coef, *_ = np.linalg.lstsq(A, f, rcond=None)
    try:
        eig = eigens_from_hessian(2 * coef[3], coef[4], 2 * coef[5])
    except DegenerateHessianError:
        return None
    return eig.ratio


def _resolve_radius(field: ScalarField, grid: GridSampling, mesh: ConvexMesh,
                    epsilon: float, tie_break: str, seed: int,
                    warnings: list[str]) -> int:
    """Two-pass automatic radius: start at the isotropic bound, re-run with
    the largest eigenvalue ratio fitted at detected extrema.

    Fits are skipped near the chart poles, where the longitude metric
    collapses and a chart Hessian measures distortion rather than shape;
    pole-adjacent extrema are covered by the polar-cap criterion instead.
    The result is capped at n/8 so circles stay small against the grid.
    """
    n = grid.n
    fit_h = min(2.0 * math.sqrt(4 * math.pi / mesh.num_faces), math.pi / 8)
    fit_h = max(fit_h, 2.0 * grid.min_spacing)
    r_cap = max(radius_bound(1.0, grid.a, grid.b, epsilon), n // 8)
    r = radius_bound(1.0, grid.a, grid.b, epsilon)
    for _ in range(2):
        extrema = sorted(circle_minima(grid, r, tie_break, seed)
                         | circle_maxima(grid, r, tie_break, seed))
        ratios = []
        fittable = 0
        for v in extrema:
            x, y = grid.vertex_coords(v)
            if grid.is_pole(v) or math.sin(y) < 0.25:
                continue
            fittable += 1
            ratio = _fit_hessian_ratio(field, x, y, fit_h)
            if ratio is not None:
                ratios.append(ratio)
        if not ratios:
            if fittable:
                # No usable curvature estimate: fall back to the sweep plateau.
                sweep = radius_sweep(grid, r, min(r + 6, r_cap), tie_break=tie_break, seed=seed)
                warnings.append(
                    "eigenvalue ratio could not be estimated; "
                    f"using plateau radius {sweep.plateau.r_end}"
                )
                return sweep.plateau.r_end
            return r
        r_new = radius_bound(max(ratios), grid.a, grid.b, epsilon)
        if r_new > r_cap:
            warnings.append(
                f"radius bound {r_new} for eigenvalue ratio {max(ratios):.3g} exceeds "
                f"the resolution cap {r_cap}; increase n for a guaranteed census"
            )
            r_new = r_cap
        if r_new <= r:
            return r
        r = r_new
    return r


def census_surface(mesh: ConvexMesh, n: int, r: Union[int, str] = "auto",
                   epsilon: float = 0.1, tie_break: str = "lex", seed: int = 0,
                   spread_tol: float = DEGENERATE_SPREAD_TOL) -> SurfaceCensus:
    """Closed-surface equilibrium census of a convex body.

    Samples the radial field on an n x n sphere chart and counts circle
    extrema. ``r="auto"`` derives the radius from the curvature anisotropy
    at detected extrema (two passes). Bodies whose radial spread is below
    ``spread_tol`` relative to the mean radius (spheres, up to tessellation
    error) are refused: their census would count tessellation noise.
    """
    if n < 16:
        raise ValueError("surface census needs n >= 16")
    field = radial_field(mesh)
    grid = sample(field, n, SPHERE_CHART)

    vals = grid.values
    mean = float(vals.mean())
    spread = float(vals.max() - vals.min())
    if spread <= spread_tol * mean:
        raise DegenerateFieldError(
            f"radial function is constant to within {spread / mean:.2e} of its mean; "
            "equilibria are not well defined at this tolerance"
        )

    warnings: list[str] = []
    if r == "auto":
        r_used = _resolve_radius(field, grid, mesh, epsilon, tie_break, seed, warnings)
    else:
        r_used = int(r)
        if r_used < 1:
            raise ValueError("radius must be >= 1")

    census = equilibrium_census(grid, r_used, MODE_CLOSED_SURFACE,
                                tie_break=tie_break, seed=seed)
    if warnings:
        census = Census(mode=census.mode, n=census.n, r=census.r, S=census.S,
                        U=census.U, N=census.N, minima=census.minima,
                        maxima=census.maxima, warnings=warnings + census.warnings)

    def positions(verts: list[Vertex]) -> list[tuple[float, float, float]]:
        out = []
        for v in verts:
            x, y = grid.vertex_coords(v)
            p = mesh.centroid + grid.value_at(v) * direction(x, y)
            out.append((float(p[0]), float(p[1]), float(p[2])))
        return out

    stats = {
        "vertices": mesh.num_vertices,
        "faces": mesh.num_faces,
        "volume": mesh.volume,
        "centroid": [float(c) for c in mesh.centroid],
    }
    return SurfaceCensus(census=census,
                         positions_minima=positions(census.minima),
                         positions_maxima=positions(census.maxima),
                         mesh_stats=stats, grid=grid)


# -- rotation consistency --------------------------------------------------------

@dataclass(frozen=True)
class RotationCheck:
    passed: bool
    censuses: list[SurfaceCensus]


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform random rotation matrix via a normalized quaternion."""
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def rotation_consistency(mesh: ConvexMesh, n: int, r: Union[int, str],
                         trials: int, seed: int = 0, epsilon: float = 0.1) -> RotationCheck:
    """Re-run the census under seeded random rotations of the body.

    Passes when every trial reports the same (S, U). Disagreement flags
    chart artifacts (usually at the poles) or under-resolution.
    """
    if trials < 2:
        raise ValueError("need at least 2 trials")
    rng = np.random.default_rng(seed)
    censuses = []
    for _ in range(trials):
        R = random_rotation(rng)
        rotated = make_mesh(mesh.vertices @ R.T, mesh.triangles,
                            convexity_tol=mesh.convexity_tol)
        censuses.append(census_surface(rotated, n, r, epsilon=epsilon))
    counts = {(sc.census.S, sc.census.U) for sc in censuses}
    return RotationCheck(passed=len(counts) == 1, censuses=censuses)
