"""Continuous ground truth: find and classify all stationary points of a field.

Seeds a damped Newton iteration on the gradient from every cell of a dense
scan whose corner gradient signs admit a zero, then merges and classifies
the converged roots. The module never reads grid samples, so it stays an
independent check on the grid detectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateHessianError
from .fields import DEGENERATE_HESSIAN_TOL, HessianEigens, ScalarField

G_TOL_FRACTION = 1e-10          # of the gradient scale seen on the seed grid
MERGE_RADIUS_FRACTION = 1e-6    # of min(a, b)
MAX_POLISH_ITERS = 50

MINIMUM = "minimum"
MAXIMUM = "maximum"
SADDLE = "saddle"


@dataclass(frozen=True)
class OraclePoint:
    x: float
    y: float
    kind: str
    eigens: HessianEigens


@dataclass(frozen=True)
class OracleReport:
    """Classified stationary points; s minima, u maxima, plus saddles."""

    points: list[OraclePoint]
    s: int
    u: int
    saddles: int


def _gradient_grid(field: ScalarField, xs: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gradient components at the tensor grid xs x ys, shaped (len(xs), len(ys))."""
    if field.grad_fn is not None and field.vectorized:
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        gx, gy = field.grad_fn(X, Y)
        return (np.broadcast_to(gx, X.shape).astype(float),
                np.broadcast_to(gy, X.shape).astype(float))
    gx = np.empty((len(xs), len(ys)))
    gy = np.empty_like(gx)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            gx[i, j], gy[i, j] = field.gradient(x, y)
    return gx, gy


def seed_cells(field: ScalarField, seed_grid: int) -> np.ndarray:
    """Boolean mask of scan cells whose corner gradients admit a zero.

    Cell (i, j) spans [x_i, x_{i+1}] x [y_j, y_{j+1}]; it is a candidate
    when neither gradient component keeps a strict sign on all four corners.
    """
    xs = np.arange(seed_grid + 1) * (field.a / seed_grid)
    ys = np.arange(seed_grid + 1) * (field.b / seed_grid)
    gx, gy = _gradient_grid(field, xs, ys)

    def sign_change(g: np.ndarray) -> np.ndarray:
        pos = g > 0
        neg = g < 0
        all_pos = pos[:-1, :-1] & pos[1:, :-1] & pos[:-1, 1:] & pos[1:, 1:]
        all_neg = neg[:-1, :-1] & neg[1:, :-1] & neg[:-1, 1:] & neg[1:, 1:]
        return ~(all_pos | all_neg)

    return sign_change(gx) & sign_change(gy)


def _newton_polish(field: ScalarField, x0: float, y0: float, g_tol: float,
                   max_iters: int) -> tuple[float, float, float] | None:
    """Damped Newton on the gradient; returns (x, y, |g|) or None."""
    a, b = field.a, field.b
    margin = 1e-12 * max(a, b)
    x, y = x0, y0
    gx, gy = field.gradient(x, y)
    gnorm = float(np.hypot(gx, gy))
    for _ in range(max_iters):
        if gnorm < g_tol:
            return x, y, gnorm
        fxx, fxy, fyy = field.hessian(x, y)
        det = fxx * fyy - fxy * fxy
        if abs(det) < 1e-300:
            return None
        dx = -(fyy * gx - fxy * gy) / det
        dy = -(fxx * gy - fxy * gx) / det
        lam = 1.0
        accepted = False
        while lam >= 1.0 / 1024.0:
            xn = min(max(x + lam * dx, margin), a - margin)
            yn = min(max(y + lam * dy, margin), b - margin)
            try:
                gxn, gyn = field.gradient(xn, yn)
            except Exception:
                lam *= 0.5
                continue
            gn = float(np.hypot(gxn, gyn))
            if gn < gnorm:
                x, y, gx, gy, gnorm = xn, yn, gxn, gyn, gn
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            return None
    return (x, y, gnorm) if gnorm < g_tol else None


def classify(field: ScalarField, x: float, y: float,
             g_tol: float = 1e-8,
             degenerate_tol: float = DEGENERATE_HESSIAN_TOL) -> tuple[str, HessianEigens]:
    """Kind of a stationary point from its Hessian eigenvalue signs."""
    gx, gy = field.gradient(x, y)
    if np.hypot(gx, gy) >= g_tol:
        raise ValueError(f"({x}, {y}) is not stationary: |grad| = {np.hypot(gx, gy):g}")
    eig = field.hessian_eigens(x, y, degenerate_tol=degenerate_tol)
    if eig.lambda1 > 0 and eig.lambda2 > 0:
        return MINIMUM, eig
    if eig.lambda1 < 0 and eig.lambda2 < 0:
        return MAXIMUM, eig
    return SADDLE, eig


def find_stationary(field: ScalarField, seed_grid: int = 256,
                    polish_iters: int = MAX_POLISH_ITERS,
                    degenerate_tol: float = DEGENERATE_HESSIAN_TOL) -> OracleReport:
    """Locate and classify every stationary point of an analytic field.

    Every candidate scan cell launches a damped Newton polish from its
    center; converged roots (gradient below an absolute tolerance derived
    from the field's gradient scale) are merged within a small radius,
    required to be strictly interior, and classified. Deterministic for
    fixed parameters. Raises DegenerateHessianError when a root's Hessian
    is singular, which voids the classification altogether.
    """
    if seed_grid < 128:
        raise ValueError("seed_grid must be at least 128")
    a, b = field.a, field.b
    xs = np.arange(seed_grid + 1) * (a / seed_grid)
    ys = np.arange(seed_grid + 1) * (b / seed_grid)
    gx, gy = _gradient_grid(field, xs, ys)
    g_scale = max(1.0, float(np.max(np.hypot(gx, gy))))
    g_tol = G_TOL_FRACTION * g_scale
    merge_radius = MERGE_RADIUS_FRACTION * min(a, b)

    pos_x, neg_x = gx > 0, gx < 0
    pos_y, neg_y = gy > 0, gy < 0

    def change(pos, neg):
        all_pos = pos[:-1, :-1] & pos[1:, :-1] & pos[:-1, 1:] & pos[1:, 1:]
        all_neg = neg[:-1, :-1] & neg[1:, :-1] & neg[:-1, 1:] & neg[1:, 1:]
        return ~(all_pos | all_neg)

    cells = np.argwhere(change(pos_x, neg_x) & change(pos_y, neg_y))

    roots: list[tuple[float, float, float]] = []
    for ci, cj in cells:
        x0 = (ci + 0.5) * (a / seed_grid)
        y0 = (cj + 0.5) * (b / seed_grid)
        hit = _newton_polish(field, x0, y0, g_tol, polish_iters)
        if hit is not None:
            roots.append(hit)

    # Merge within merge_radius; the representative has the smallest residual.
    roots.sort(key=lambda t: (t[0], t[1]))
    merged: list[tuple[float, float, float]] = []
    for x, y, g in roots:
        for k, (mx, my, mg) in enumerate(merged):
            if np.hypot(x - mx, y - my) <= merge_radius:
                if (g, x, y) < (mg, mx, my):
                    merged[k] = (x, y, g)
                break
        else:
            merged.append((x, y, g))

    boundary_margin = 1e-9 * max(a, b)
    points = []
    for x, y, _ in sorted(merged):
        if not (boundary_margin < x < a - boundary_margin and boundary_margin < y < b - boundary_margin):
            continue
        kind, eig = classify(field, x, y, g_tol=max(g_tol, 1e-8 * g_scale),
                             degenerate_tol=degenerate_tol)
        points.append(OraclePoint(x=x, y=y, kind=kind, eigens=eig))

    s = sum(1 for p in points if p.kind == MINIMUM)
    u = sum(1 for p in points if p.kind == MAXIMUM)
    return OracleReport(points=points, s=s, u=u, saddles=len(points) - s - u)
