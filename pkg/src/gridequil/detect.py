"""Detection of global equilibria on sampled grids.

The detectors never compare raw values directly. Each grid gets a rank
array: vertices sorted by (value, i, j), or by hash-perturbed value in the
optional perturbation mode. Ranks are distinct integers, so every
comparison downstream is strict and the results are deterministic even
when sampled values tie.

A vertex is a circle minimum of radius r when its rank is the smallest in
its Chebyshev-r index window; maxima are minima of the negated values,
which makes negation duality exact by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import InconsistentCensusError
from .grid import GridSampling, RECTANGLE, SPHERE_CHART, Vertex, nondegeneracy_check

MODE_RECTANGLE = "rectangle"
MODE_CLOSED_SURFACE = "closed_surface"

# Tolerance at which value ties are reported in census warnings.
TIE_REPORT_TOL = 1e-12


# -- tie policy ------------------------------------------------------------

def _hash01(i: np.ndarray, j: np.ndarray, seed: int) -> np.ndarray:
    """Deterministic per-vertex values in [0,1) for the perturbation tie mode."""
    h = (i.astype(np.uint64) * np.uint64(0x9E3779B97F4A7C15)
         + j.astype(np.uint64) * np.uint64(0xC2B2AE3D27D4EB4F)
         + np.uint64(seed & 0xFFFFFFFF) * np.uint64(0x165667B19E3779F9))
    h ^= h >> np.uint64(33)
    h *= np.uint64(0xFF51AFD7ED558CCD)
    h ^= h >> np.uint64(33)
    return (h >> np.uint64(11)).astype(float) / float(1 << 53)


def _rank_values(vals: np.ndarray, i_idx: np.ndarray, j_idx: np.ndarray,
                 tie_break: str, seed: int) -> np.ndarray:
    if tie_break == "hash":
        span = float(vals.max() - vals.min()) or 1.0
        keys = vals + 1e-12 * span * _hash01(i_idx, j_idx, seed)
    elif tie_break == "lex":
        keys = vals
    else:
        raise ValueError(f"unknown tie_break {tie_break!r}")
    order = np.lexsort((j_idx, i_idx, keys))
    ranks = np.empty(len(vals), dtype=np.int64)
    ranks[order] = np.arange(len(vals), dtype=np.int64)
    return ranks


def value_ranks(grid: GridSampling, tie_break: str = "lex", seed: int = 0,
                negate: bool = False) -> np.ndarray:
    """Distinct integer ranks per canonical vertex, broadcast to the full array.

    In sphere-chart mode the duplicated column and the pole rows carry the
    rank of their canonical vertex, so window reductions can treat the
    stored (n+1)x(n+1) array uniformly.
    """
    n = grid.n
    values = -grid.values if negate else grid.values
    if grid.topology == RECTANGLE:
        ii, jj = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
        ranks = _rank_values(values.ravel(), ii.ravel(), jj.ravel(), tie_break, seed)
        return ranks.reshape(n + 1, n + 1)

    core = values[:n, 1:n]
    ii, jj = np.meshgrid(np.arange(n), np.arange(1, n), indexing="ij")
    vals = np.concatenate([[values[0, 0], values[0, n]], core.ravel()])
    i_idx = np.concatenate([[0, 0], ii.ravel()])
    j_idx = np.concatenate([[0, n], jj.ravel()])
    flat = _rank_values(vals, i_idx, j_idx, tie_break, seed)
    R = np.empty((n + 1, n + 1), dtype=np.int64)
    R[:, 0] = flat[0]
    R[:, n] = flat[1]
    R[:n, 1:n] = flat[2:].reshape(n, n - 1)
    R[n, 1:n] = R[0, 1:n]
    return R


# -- window minima ----------------------------------------------------------

def _sliding_min(arr: np.ndarray, width: int, axis: int) -> np.ndarray:
    return sliding_window_view(arr, width, axis=axis).min(axis=-1)


def _window_min_vertices(grid: GridSampling, R: np.ndarray, r: int) -> list[Vertex]:
    """Vertices whose rank is strictly smallest in their Chebyshev-r window."""
    n = grid.n
    if grid.topology == RECTANGLE:
        if 2 * r > n:
            return []
        A = _sliding_min(R, 2 * r + 1, axis=0)
        W = _sliding_min(A, 2 * r + 1, axis=1)
        C = R[r:n + 1 - r, r:n + 1 - r]
        hits = np.argwhere(C == W)
        return [(int(i) + r, int(j) + r) for i, j in hits]

    Rc = R[:n, :]
    wrap = Rc[np.arange(-r, n + r) % n, :]
    A = _sliding_min(wrap, 2 * r + 1, axis=0)
    clamp = A[:, np.clip(np.arange(-r, n + 1 + r), 0, n)]
    W = _sliding_min(clamp, 2 * r + 1, axis=1)
    hits = np.argwhere(Rc[:, 1:n] == W[:, 1:n])
    out = [(int(i), int(j) + 1) for i, j in hits]
    # Pole-centered circles are full polar caps: depth r, all longitudes.
    if R[0, 0] == Rc[:, 0:min(n, r) + 1].min():
        out.append((0, 0))
    if R[0, n] == Rc[:, max(0, n - r):n + 1].min():
        out.append((0, n))
    out.sort()
    return out


def circle_minima(grid: GridSampling, r: int, tie_break: str = "lex", seed: int = 0) -> set[Vertex]:
    """Vertices strictly minimal within their grid circle of radius r.

    Rectangle mode considers only vertices whose circle is complete.
    """
    if r < 1:
        raise ValueError("radius must be >= 1")
    R = value_ranks(grid, tie_break=tie_break, seed=seed)
    return set(_window_min_vertices(grid, R, r))


def circle_maxima(grid: GridSampling, r: int, tie_break: str = "lex", seed: int = 0) -> set[Vertex]:
    """Vertices strictly maximal within their grid circle; minima of the negation."""
    if r < 1:
        raise ValueError("radius must be >= 1")
    R = value_ranks(grid, tie_break=tie_break, seed=seed, negate=True)
    return set(_window_min_vertices(grid, R, r))


# -- stationary vertices -----------------------------------------------------

def stationary_vertices(grid: GridSampling, tie_break: str = "lex", seed: int = 0) -> set[Vertex]:
    """Vertices that dominate or are dominated by both members of each opposite pair.

    For every opposite neighbor pair {q, q'} the vertex value must be above
    both or below both (strictly, after tie-breaking). Rectangle borders
    are skipped; sphere poles compare against across-pole pairs of their
    adjacent row.
    """
    n = grid.n
    R = value_ranks(grid, tie_break=tie_break, seed=seed)
    out: list[Vertex] = []
    if grid.topology == RECTANGLE:
        c = R[1:n, 1:n]
        w, e = R[0:n - 1, 1:n], R[2:n + 1, 1:n]
        s, t = R[1:n, 0:n - 1], R[1:n, 2:n + 1]
        condx = ((c > w) & (c > e)) | ((c < w) & (c < e))
        condy = ((c > s) & (c > t)) | ((c < s) & (c < t))
        hits = np.argwhere(condx & condy)
        return {(int(i) + 1, int(j) + 1) for i, j in hits}

    Rc = R[:n, :]
    c = Rc[:, 1:n]
    w = np.roll(Rc, 1, axis=0)[:, 1:n]
    e = np.roll(Rc, -1, axis=0)[:, 1:n]
    s, t = Rc[:, 0:n - 1], Rc[:, 2:n + 1]
    condx = ((c > w) & (c > e)) | ((c < w) & (c < e))
    condy = ((c > s) & (c > t)) | ((c < s) & (c < t))
    out = [(int(i), int(j) + 1) for i, j in np.argwhere(condx & condy)]
    mates = (np.arange(n) + n // 2) % n
    for pole_j, row_j in ((0, 1), (n, n - 1)):
        sign = np.sign(Rc[:, row_j] - R[0, pole_j])
        if np.all(sign == sign[mates]):
            out.append((0, pole_j))
    return set(out)


# -- radius bound ------------------------------------------------------------

def radius_bound(ratio: float, a: float, b: float, epsilon: float = 0.1) -> int:
    """Smallest circle radius guaranteeing one detection per extremum.

    ``ratio`` is the Hessian eigenvalue ratio (>= 1) at the extremum and
    ``epsilon`` the level-set sandwich margin in (0, 1). The bound is the
    larger of a purely geometric term and an anisotropy term; the result
    is rounded up, with a +1 bump when the real value sits within 1e-9 of
    an integer so the inequality stays strict under round-off.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie strictly between 0 and 1")
    if ratio < 1:
        raise ValueError("eigenvalue ratio must be >= 1")
    if a <= 0 or b <= 0:
        raise ValueError("domain lengths must be positive")
    diag_over_min = math.hypot(a, b) / min(a, b)
    geometric = 1.5 * diag_over_min
    anisotropic = ratio * diag_over_min * math.sqrt((1 + epsilon) / (1 - epsilon))
    value = max(geometric, anisotropic)
    nearest = round(value)
    if abs(value - nearest) <= 1e-9:
        return int(nearest) + 1
    return int(math.ceil(value))


# -- census -------------------------------------------------------------------

@dataclass(frozen=True)
class Census:
    """Counts and locations of grid-circle extrema.

    S and U are the numbers of circle minima (stable points) and maxima
    (unstable points). In closed-surface mode the saddle count follows
    from the sphere's index sum, N = S + U - 2; in rectangle mode N is None.
    """

    mode: str
    n: int
    r: int
    S: int
    U: int
    N: Optional[int]
    minima: list[Vertex]
    maxima: list[Vertex]
    warnings: list[str]


def _default_mode(grid: GridSampling) -> str:
    return MODE_CLOSED_SURFACE if grid.topology == SPHERE_CHART else MODE_RECTANGLE


def equilibrium_census(grid: GridSampling, r: int, mode: Optional[str] = None,
                       tie_break: str = "lex", seed: int = 0) -> Census:
    """Census of circle minima and maxima at radius r.

    Closed-surface mode (sphere-chart grids only) adds the saddle count
    N = S + U - 2 and rejects S + U < 2, which no convex body can produce
    and which therefore signals under-resolution.
    """
    if mode is None:
        mode = _default_mode(grid)
    if mode not in (MODE_RECTANGLE, MODE_CLOSED_SURFACE):
        raise ValueError(f"unknown census mode {mode!r}")
    if mode == MODE_CLOSED_SURFACE and grid.topology != SPHERE_CHART:
        raise ValueError("closed_surface census requires a sphere_chart grid")

    minima = sorted(circle_minima(grid, r, tie_break=tie_break, seed=seed))
    maxima = sorted(circle_maxima(grid, r, tie_break=tie_break, seed=seed))
    warnings = []
    ties = nondegeneracy_check(grid, tol=TIE_REPORT_TOL)
    if ties:
        warnings.append(
            f"{len(ties)} vertex value ties within {TIE_REPORT_TOL:g}; "
            f"{tie_break} tie-breaking applied"
        )
    S, U = len(minima), len(maxima)
    if mode == MODE_CLOSED_SURFACE:
        if S + U < 2:
            raise InconsistentCensusError(
                f"closed surface census found S={S}, U={U}; S+U must be at least 2"
            )
        N = S + U - 2
    else:
        N = None
    return Census(mode=mode, n=grid.n, r=r, S=S, U=U, N=N,
                  minima=minima, maxima=maxima, warnings=warnings)


# -- radius sweep --------------------------------------------------------------

@dataclass(frozen=True)
class Plateau:
    """Longest run of consecutive radii with identical counts."""

    S: int
    U: int
    r_start: int
    r_end: int

    @property
    def length(self) -> int:
        return self.r_end - self.r_start + 1


@dataclass(frozen=True)
class SweepResult:
    rows: list[tuple[int, int, int]]  # (r, S, U)
    plateau: Plateau


def radius_sweep(grid: GridSampling, r_min: int, r_max: int,
                 tie_break: str = "lex", seed: int = 0) -> SweepResult:
    """Counts (S, U) for every radius in [r_min, r_max] plus the plateau summary.

    The plateau is the longest maximal run of consecutive radii with
    identical counts; equal-length runs resolve toward larger r, where
    discretization-scale artifacts have died out.
    """
    if not 1 <= r_min <= r_max:
        raise ValueError("need 1 <= r_min <= r_max")
    if grid.topology == RECTANGLE and 2 * r_max > grid.n:
        raise ValueError(f"r_max={r_max} circles do not fit an n={grid.n} rectangle grid")
    rows = []
    for r in range(r_min, r_max + 1):
        s = len(circle_minima(grid, r, tie_break=tie_break, seed=seed))
        u = len(circle_maxima(grid, r, tie_break=tie_break, seed=seed))
        rows.append((r, s, u))

    best: Optional[Plateau] = None
    start = 0
    for k in range(1, len(rows) + 1):
        if k == len(rows) or rows[k][1:] != rows[start][1:]:
            run = Plateau(S=rows[start][1], U=rows[start][2],
                          r_start=rows[start][0], r_end=rows[k - 1][0])
            if best is None or run.length >= best.length:
                best = run
            start = k
    assert best is not None
    return SweepResult(rows=rows, plateau=best)


# -- one-dimensional counterpart ------------------------------------------------

def count_1d(values: Sequence[float], tie_break: str = "lex", seed: int = 0) -> tuple[int, int]:
    """Interior strict local minima and maxima of an equidistant 1D sample.

    Ties are broken by index, mirroring the 2D tie policy.
    """
    vals = np.asarray(values, dtype=float)
    if vals.ndim != 1 or len(vals) < 3:
        raise ValueError("need a flat sample of at least 3 values")
    idx = np.arange(len(vals))
    ranks = _rank_values(vals, idx, np.zeros_like(idx), tie_break, seed)
    c, left, right = ranks[1:-1], ranks[:-2], ranks[2:]
    k = int(np.sum((c < left) & (c < right)))
    l = int(np.sum((c > left) & (c > right)))
    return k, l


def negated(grid: GridSampling) -> GridSampling:
    """Grid with all sampled values negated (for duality checks)."""
    return replace(grid, values=-grid.values)
