"""Global equilibrium counting on finely discretized fields and convex bodies."""

from .errors import (
    BoundaryVertexError,
    ConvexityError,
    DegenerateFieldError,
    DegenerateHessianError,
    DegenerateMeshError,
    DomainError,
    GridEquilError,
    IncompleteCircleError,
    InconsistentCensusError,
    MeshFormatError,
    NonClosedMeshError,
)
from .fields import (
    BUILTIN_FIELDS,
    HessianEigens,
    ScalarField,
    aniso_paraboloid,
    builtin_field,
    eigens_from_hessian,
    linear_field,
    paraboloid,
    product_sines,
    quadratic,
    saddle,
)
from .grid import (
    RECTANGLE,
    SPHERE_CHART,
    GridSampling,
    grid_circle,
    load_grid,
    neighbors,
    nondegeneracy_check,
    sample,
    save_grid,
)
from .detect import (
    Census,
    Plateau,
    SweepResult,
    circle_maxima,
    circle_minima,
    count_1d,
    equilibrium_census,
    radius_bound,
    radius_sweep,
    stationary_vertices,
)
from .oracle import OraclePoint, OracleReport, classify, find_stationary
from .surface import (
    ConvexMesh,
    census_surface,
    load_mesh,
    radial_field,
    radial_function,
    rotation_consistency,
    solid_centroid,
)
from . import shapes, reports

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
