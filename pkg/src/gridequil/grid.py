"""Equidistant sampling grids: vertex values, neighbors, Chebyshev circles.

A grid divides [0,a]x[0,b] into n x n cells and stores the field value at
every vertex p_(i,j) = (i*a/n, j*b/n). Two boundary topologies are
supported:

* ``rectangle``: plain bounded grid; vertices on the border have no full
  neighbor set and are excluded from census candidacy by the callers.
* ``sphere_chart``: longitude/colatitude chart of a closed surface. The
  column index wraps modulo n and the rows j=0 and j=n each collapse to a
  single pole vertex (canonical ids (0,0) and (0,n)).

Grids are immutable after sampling; every query below is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BoundaryVertexError, IncompleteCircleError
from .fields import ScalarField

RECTANGLE = "rectangle"
SPHERE_CHART = "sphere_chart"
TOPOLOGIES = (RECTANGLE, SPHERE_CHART)

Vertex = tuple[int, int]


@dataclass(frozen=True)
class GridSampling:
    """Sampled (n+1)x(n+1) value array plus domain geometry and topology."""

    n: int
    a: float
    b: float
    topology: str
    values: np.ndarray  # shape (n+1, n+1), values[i, j] = f(i*a/n, j*b/n)

    @property
    def min_spacing(self) -> float:
        """Smallest distance between two grid vertices, min(a,b)/n."""
        return min(self.a, self.b) / self.n

    @property
    def cell_diagonal(self) -> float:
        """Cell diagonal sqrt(a^2+b^2)/n; any disk of this diameter holds a vertex."""
        return float(np.hypot(self.a, self.b)) / self.n

    def vertex_coords(self, v: Vertex) -> tuple[float, float]:
        i, j = v
        return i * self.a / self.n, j * self.b / self.n

    def value_at(self, v: Vertex) -> float:
        i, j = v
        return float(self.values[i, j])

    def is_pole(self, v: Vertex) -> bool:
        return self.topology == SPHERE_CHART and v[1] in (0, self.n)

    def canonical(self, v: Vertex) -> Vertex:
        """Canonical id of a vertex (wraps columns, collapses pole rows)."""
        i, j = v
        if not 0 <= j <= self.n:
            raise IndexError(f"row index {j} out of range 0..{self.n}")
        if self.topology == RECTANGLE:
            if not 0 <= i <= self.n:
                raise IndexError(f"column index {i} out of range 0..{self.n}")
            return (i, j)
        if j in (0, self.n):
            return (0, j)
        return (i % self.n, j)

    def canonical_vertices(self) -> list[Vertex]:
        """All distinct vertices in (i, j) order."""
        n = self.n
        if self.topology == RECTANGLE:
            return [(i, j) for i in range(n + 1) for j in range(n + 1)]
        out: list[Vertex] = [(0, 0), (0, n)]
        out += [(i, j) for i in range(n) for j in range(1, n)]
        out.sort()
        return out


def sample(field: ScalarField, n: int, topology: str = RECTANGLE) -> GridSampling:
    """Evaluate ``field`` on the n x n division of its domain.

    The stored array is independent of evaluation order. In sphere-chart
    mode the duplicated column i=n is filled from column 0 and each pole
    row from a single evaluation, so the quotient topology is represented
    exactly.
    """
    if topology not in TOPOLOGIES:
        raise ValueError(f"unknown topology {topology!r}")
    if topology == SPHERE_CHART:
        if n < 4:
            raise ValueError("sphere_chart sampling needs n >= 4")
        if abs(field.a - 2 * field.b) > 1e-9 * field.b:
            raise ValueError("sphere_chart requires a = 2b (longitude spans twice the colatitude)")
    elif n < 1:
        raise ValueError("n must be positive")

    a, b = field.a, field.b
    xs = np.arange(n + 1) * (a / n)
    ys = np.arange(n + 1) * (b / n)
    values = np.empty((n + 1, n + 1), dtype=float)

    if topology == RECTANGLE:
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        values[:, :] = field.eval_grid(X, Y)
    else:
        Xc, Yc = np.meshgrid(xs[:n], ys[1:n], indexing="ij")
        values[:n, 1:n] = field.eval_grid(Xc, Yc)
        values[n, 1:n] = values[0, 1:n]
        values[:, 0] = field.eval(0.0, 0.0)
        values[:, n] = field.eval(0.0, b)
    return GridSampling(n=n, a=a, b=b, topology=topology, values=values)


def neighbors(grid: GridSampling, v: Vertex) -> list[tuple[Vertex, Vertex]]:
    """Opposite neighbor pairs of a vertex: {p_(i+-1,j)} and {p_(i,j+-1)}.

    Rectangle borders raise BoundaryVertexError. In sphere-chart mode the
    column index wraps and rows next to a pole pair with the pole vertex;
    a pole itself pairs the vertices of its adjacent row across the pole.
    """
    n = grid.n
    v = grid.canonical(v)
    i, j = v
    if grid.topology == RECTANGLE:
        if i == 0 or i == n or j == 0 or j == n:
            raise BoundaryVertexError(f"vertex {v} has no full neighbor set")
        return [((i - 1, j), (i + 1, j)), ((i, j - 1), (i, j + 1))]

    if grid.is_pole(v):
        row = 1 if j == 0 else n - 1
        half = n // 2
        seen = set()
        pairs: list[tuple[Vertex, Vertex]] = []
        for l in range(n):
            mate = (l + half) % n
            key = frozenset((l, mate))
            if key in seen or l == mate:
                continue
            seen.add(key)
            pairs.append(((l, row), (mate, row)))
        return pairs

    west = ((i - 1) % n, j)
    east = ((i + 1) % n, j)
    south = grid.canonical((i, j - 1))
    north = grid.canonical((i, j + 1))
    return [(west, east), (south, north)]


def grid_circle(grid: GridSampling, v: Vertex, r: int) -> set[Vertex]:
    """All vertices within Chebyshev index distance r of ``v`` (``v`` included).

    Rectangle mode raises IncompleteCircleError when the window leaves the
    index range (such vertices are ineligible census candidates). In
    sphere-chart mode columns wrap, rows clamp at the poles and the pole
    vertices are included; a circle centered at a pole is the full polar
    cap of depth r (all longitudes).
    """
    if r < 1:
        raise ValueError("radius must be >= 1")
    n = grid.n
    v = grid.canonical(v)
    i, j = v
    if grid.topology == RECTANGLE:
        if i - r < 0 or i + r > n or j - r < 0 or j + r > n:
            raise IncompleteCircleError(f"circle of radius {r} at {v} leaves the grid")
        return {(l, m) for l in range(i - r, i + r + 1) for m in range(j - r, j + r + 1)}

    out: set[Vertex] = set()
    if grid.is_pole(v):
        rows = range(0, min(n, r) + 1) if j == 0 else range(max(0, n - r), n + 1)
        cols: Iterable[int] = range(n)
    else:
        rows = range(max(0, j - r), min(n, j + r) + 1)
        cols = range(i - r, i + r + 1)
    for m in rows:
        if m in (0, n):
            out.add((0, m))
            continue
        for l in cols:
            out.add((l % n, m))
    return out


def nondegeneracy_check(grid: GridSampling, tol: float = 0.0) -> list[tuple[Vertex, Vertex, float]]:
    """Certify that no two distinct vertices share a value at tolerance ``tol``.

    Returns (u, v, |f(u)-f(v)|) triples for value-sorted adjacent pairs within
    tol; an empty list certifies the grid nondegenerate. A clique of k tied
    vertices is reported as a chain of k-1 pairs.
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    verts = grid.canonical_vertices()
    vals = np.array([grid.value_at(v) for v in verts])
    order = np.argsort(vals, kind="stable")
    report = []
    for k in range(len(order) - 1):
        u, w = verts[order[k]], verts[order[k + 1]]
        diff = abs(vals[order[k + 1]] - vals[order[k]])
        if diff <= tol:
            report.append((u, w, float(diff)))
    return report


# -- columnar text dump ----------------------------------------------------

def save_grid(grid: GridSampling, path) -> None:
    """Write the grid as text: header ``n a b topology`` then one line per row j.

    Values are printed with shortest round-trip precision, so load_grid
    reproduces the array bit for bit.
    """
    lines = [f"{grid.n} {grid.a!r} {grid.b!r} {grid.topology}"]
    for j in range(grid.n + 1):
        lines.append(" ".join(repr(float(x)) for x in grid.values[:, j]))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_grid(path) -> GridSampling:
    """Read a grid written by save_grid."""
    with open(path) as fh:
        tokens = fh.readline().split()
        if len(tokens) != 4:
            raise ValueError("grid header must be 'n a b topology'")
        n = int(tokens[0])
        a, b = float(tokens[1]), float(tokens[2])
        topology = tokens[3]
        if topology not in TOPOLOGIES:
            raise ValueError(f"unknown topology {topology!r}")
        values = np.empty((n + 1, n + 1), dtype=float)
        for j in range(n + 1):
            row = fh.readline().split()
            if len(row) != n + 1:
                raise ValueError(f"row {j} has {len(row)} values, expected {n + 1}")
            values[:, j] = [float(t) for t in row]
    return GridSampling(n=n, a=a, b=b, topology=topology, values=values)
