"""Exception types shared across the package."""


class GridEquilError(Exception):
    """Base class for all package errors."""


class DomainError(GridEquilError):
    """Point lies outside the field's rectangular domain."""


class DegenerateHessianError(GridEquilError):
    """Hessian at a stationary point is singular below tolerance."""


class BoundaryVertexError(GridEquilError):
    """Grid vertex lacks a full set of four neighbors."""


class IncompleteCircleError(GridEquilError):
    """Chebyshev neighborhood extends past the rectangle's index range."""


class MeshFormatError(GridEquilError):
    """Mesh file failed to parse."""


class NonClosedMeshError(GridEquilError):
    """Mesh surface is not closed and consistently oriented."""


class ConvexityError(GridEquilError):
    """Mesh violates convexity beyond tolerance.

    Carries the worst offending (vertex index, face index, distance) triple.
    """

    def __init__(self, message, vertex=None, face=None, violation=None):
        super().__init__(message)
        self.vertex = vertex
        self.face = face
        self.violation = violation


class DegenerateMeshError(GridEquilError):
    """Mesh encloses (near) zero volume."""


class DegenerateFieldError(GridEquilError):
    """Sampled field is too flat to carry a meaningful extremum census."""


class InconsistentCensusError(GridEquilError):
    """Closed-surface census with S + U < 2; signals under-resolution."""
