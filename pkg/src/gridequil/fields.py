"""Scalar fields on a rectangle [0,a]x[0,b] with derivative access.

A field bundles an evaluator with either closed-form derivatives or a
finite-difference fallback. Fields are immutable value objects; evaluation
is pure, so instances are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateHessianError, DomainError

# Default finite-difference step, as a fraction of the shorter domain edge.
FD_STEP_FRACTION = 1e-5

# A Hessian counts as degenerate when |lambda1| <= tol * max(1, |lambda2|).
DEGENERATE_HESSIAN_TOL = 1e-8


@dataclass(frozen=True)
class HessianEigens:
    """Eigenvalues of a 2x2 Hessian, ordered by magnitude (|lambda1| <= |lambda2|).

    ``ratio`` is lambda2/lambda1 and is only defined (non-None) when both
    eigenvalues share a sign, i.e. the Hessian is definite; it is then >= 1.
    """

    lambda1: float
    lambda2: float
    ratio: Optional[float]

    @property
    def definite(self) -> bool:
        return self.ratio is not None


@dataclass(frozen=True)
class ScalarField:
    """A twice-differentiable scalar field on [0,a]x[0,b].

    ``fn`` maps (x, y) to a float. When ``grad_fn``/``hess_fn`` are given the
    field reports closed-form derivatives; otherwise central differences of
    step ``fd_step`` are used (one-sided at the boundary). ``vectorized``
    marks evaluators written with numpy ufuncs that broadcast over arrays;
    ``grid_fn``, when present, is a dedicated batch evaluator taking
    coordinate arrays (used by mesh-backed fields).
    """

    a: float
    b: float
    fn: Callable
    grad_fn: Optional[Callable] = None
    hess_fn: Optional[Callable] = None
    fd_step: Optional[float] = None
    name: str = "field"
    vectorized: bool = False
    grid_fn: Optional[Callable] = None

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("domain lengths must be positive")
        if self.fd_step is not None:
            if not (0 < self.fd_step < min(self.a, self.b) / 1000.0):
                raise ValueError("fd_step must lie in (0, min(a,b)/1000)")

    @property
    def closed_form(self) -> bool:
        return self.grad_fn is not None

    @property
    def step(self) -> float:
        return self.fd_step if self.fd_step is not None else FD_STEP_FRACTION * min(self.a, self.b)

    # -- evaluation -------------------------------------------------------

    def _check_domain(self, x: float, y: float) -> None:
        tol = 1e-12 * max(self.a, self.b)
        if not (-tol <= x <= self.a + tol) or not (-tol <= y <= self.b + tol):
            raise DomainError(
                f"point ({x}, {y}) outside [0,{self.a}]x[0,{self.b}]"
            )

    def eval(self, x: float, y: float) -> float:
        """Field value at (x, y); raises DomainError outside the rectangle."""
        self._check_domain(x, y)
        return float(self.fn(x, y))

    def eval_grid(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """Field values over coordinate arrays (same shape in and out)."""
        if self.grid_fn is not None:
            return np.asarray(self.grid_fn(X, Y), dtype=float)
        if self.vectorized:
            return np.asarray(self.fn(X, Y), dtype=float)
        out = np.empty(np.shape(X), dtype=float)
        flat = out.reshape(-1)
        for k, (x, y) in enumerate(zip(np.ravel(X), np.ravel(Y))):
            flat[k] = self.fn(x, y)
        return out

    # -- derivatives ------------------------------------------------------

    def gradient(self, x: float, y: float) -> tuple[float, float]:
        """(df/dx, df/dy) at (x, y).

        Closed-form when available; otherwise central differences with a
        one-sided fallback where the stencil would leave the domain.
        """
        self._check_domain(x, y)
        if self.grad_fn is not None:
            gx, gy = self.grad_fn(x, y)
            return float(gx), float(gy)
        h = self.step
        f = self.fn
        if x - h < 0:
            fx = (f(x + h, y) - f(x, y)) / h
        elif x + h > self.a:
            fx = (f(x, y) - f(x - h, y)) / h
        else:
            fx = (f(x + h, y) - f(x - h, y)) / (2 * h)
        if y - h < 0:
            fy = (f(x, y + h) - f(x, y)) / h
        elif y + h > self.b:
            fy = (f(x, y) - f(x, y - h)) / h
        else:
            fy = (f(x, y + h) - f(x, y - h)) / (2 * h)
        return float(fx), float(fy)

    def hessian(self, x: float, y: float) -> tuple[float, float, float]:
        """(fxx, fxy, fyy) at an interior point; fxy computed once."""
        h = self.step
        tol = 1e-12 * max(self.a, self.b)
        if self.hess_fn is None:
            # FD stencil must stay inside the closed domain.
            if not (h - tol <= x <= self.a - h + tol) or not (h - tol <= y <= self.b - h + tol):
                raise DomainError(f"point ({x}, {y}) too close to the boundary for the Hessian stencil")
        else:
            self._check_domain(x, y)
        if self.hess_fn is not None:
            fxx, fxy, fyy = self.hess_fn(x, y)
            return float(fxx), float(fxy), float(fyy)
        f = self.fn
        f0 = f(x, y)
        fxx = (f(x + h, y) - 2 * f0 + f(x - h, y)) / (h * h)
        fyy = (f(x, y + h) - 2 * f0 + f(x, y - h)) / (h * h)
        fxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4 * h * h)
        return float(fxx), float(fxy), float(fyy)

    def hessian_eigens(self, x: float, y: float,
                       degenerate_tol: float = DEGENERATE_HESSIAN_TOL) -> HessianEigens:
        """Eigenvalues of the Hessian at an interior point, magnitude-ordered.

        Raises DegenerateHessianError when the smaller eigenvalue vanishes
        relative to the larger one (singular Hessian).
        """
        fxx, fxy, fyy = self.hessian(x, y)
        return eigens_from_hessian(fxx, fxy, fyy, degenerate_tol=degenerate_tol)


def eigens_from_hessian(fxx: float, fxy: float, fyy: float,
                        degenerate_tol: float = DEGENERATE_HESSIAN_TOL) -> HessianEigens:
    """Magnitude-ordered eigenvalues of the symmetric matrix [[fxx,fxy],[fxy,fyy]]."""
    half_tr = 0.5 * (fxx + fyy)
    disc = np.hypot(0.5 * (fxx - fyy), fxy)
    lo, hi = half_tr - disc, half_tr + disc
    # Magnitude order; on magnitude ties the positive eigenvalue comes first.
    lam1, lam2 = sorted((lo, hi), key=lambda t: (abs(t), -t))
    if abs(lam1) <= degenerate_tol * max(1.0, abs(lam2)):
        raise DegenerateHessianError(
            f"Hessian eigenvalues ({lam1:g}, {lam2:g}) are singular at tolerance {degenerate_tol:g}"
        )
    ratio = lam2 / lam1 if lam1 * lam2 > 0 else None
    return HessianEigens(float(lam1), float(lam2), ratio)


# -- built-in catalog -----------------------------------------------------

def paraboloid(cx: float = 0.47, cy: float = 0.53, a: float = 1.0, b: float = 1.0) -> ScalarField:
    """Offset bowl (x-cx)^2 + (y-cy)^2 with one interior minimum."""
    return ScalarField(
        a, b,
        fn=lambda x, y: (x - cx) ** 2 + (y - cy) ** 2,
        grad_fn=lambda x, y: (2 * (x - cx), 2 * (y - cy)),
        hess_fn=lambda x, y: (2.0, 0.0, 2.0),
        name="paraboloid", vectorized=True,
    )


def linear_field(cx: float = 1.0, cy: float = 2.0, a: float = 1.0, b: float = 1.0) -> ScalarField:
    """Plane cx*x + cy*y; has no stationary points."""
    return ScalarField(
        a, b,
        fn=lambda x, y: cx * x + cy * y,
        grad_fn=lambda x, y: (cx + 0.0 * x, cy + 0.0 * y),
        hess_fn=lambda x, y: (0.0, 0.0, 0.0),
        name="linear", vectorized=True,
    )


def saddle(cx: float = 0.47, cy: float = 0.53, a: float = 1.0, b: float = 1.0) -> ScalarField:
    """Pure saddle (x-cx)^2 - (y-cy)^2."""
    return ScalarField(
        a, b,
        fn=lambda x, y: (x - cx) ** 2 - (y - cy) ** 2,
        grad_fn=lambda x, y: (2 * (x - cx), -2 * (y - cy)),
        hess_fn=lambda x, y: (2.0, 0.0, -2.0),
        name="saddle", vectorized=True,
    )


def product_sines(k: int = 3, a: float = 1.0, b: float = 1.0) -> ScalarField:
    """sin(k*pi*x) * sin(k*pi*y); k=3 gives 4 minima, 5 maxima, 4 saddles on the unit square."""
    w = k * np.pi
    return ScalarField(
        a, b,
        fn=lambda x, y: np.sin(w * x) * np.sin(w * y),
        grad_fn=lambda x, y: (w * np.cos(w * x) * np.sin(w * y),
                              w * np.sin(w * x) * np.cos(w * y)),
        hess_fn=lambda x, y: (-w * w * np.sin(w * x) * np.sin(w * y),
                              w * w * np.cos(w * x) * np.cos(w * y),
                              -w * w * np.sin(w * x) * np.sin(w * y)),
        name="product", vectorized=True,
    )


def aniso_paraboloid(a: float = 1.0, b: float = 1.0) -> ScalarField:
    """Anisotropic bowl x^2 + 4y^2 (eigenvalue ratio 4 at the origin)."""
    return ScalarField(
        a, b,
        fn=lambda x, y: x ** 2 + 4 * y ** 2,
        grad_fn=lambda x, y: (2 * x, 8 * y),
        hess_fn=lambda x, y: (2.0, 0.0, 8.0),
        name="aniso", vectorized=True,
    )


def quadratic(cxx: float, cxy: float, cyy: float, cx: float, cy: float, c0: float,
              a: float = 1.0, b: float = 1.0) -> ScalarField:
    """General quadratic cxx*x^2 + cxy*x*y + cyy*y^2 + cx*x + cy*y + c0."""
    return ScalarField(
        a, b,
        fn=lambda x, y: cxx * x * x + cxy * x * y + cyy * y * y + cx * x + cy * y + c0,
        grad_fn=lambda x, y: (2 * cxx * x + cxy * y + cx, cxy * x + 2 * cyy * y + cy),
        hess_fn=lambda x, y: (2 * cxx, cxy, 2 * cyy),
        name="quadratic", vectorized=True,
    )


BUILTIN_FIELDS = {
    "paraboloid": paraboloid,
    "linear": linear_field,
    "saddle": saddle,
    "product": product_sines,
    "aniso": aniso_paraboloid,
}


def builtin_field(name: str, a: float = 1.0, b: float = 1.0) -> ScalarField:
    """Look up a catalog field by name."""
    try:
        maker = BUILTIN_FIELDS[name]
    except KeyError:
        raise KeyError(f"unknown field {name!r}; choices: {sorted(BUILTIN_FIELDS)}") from None
    return maker(a=a, b=b)
