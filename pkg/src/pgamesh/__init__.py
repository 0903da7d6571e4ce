"""Mesh volume, slicing, centre of mass and inertia with plane-based geometric algebra (R(3,0,1))."""
from .algebra import (
    Multivector,
    direction,
    euclidean_norm,
    geometric_product,
    hodge_dual,
    ideal_norm,
    join,
    normalize,
    origin,
    plane,
    point,
    reverse,
    sandwich,
    wedge,
)
from .errors import (
    ConvergenceError,
    DegeneratePlaneError,
    DegenerateVersorError,
    IdealElementError,
    MalformedMeshError,
    NoIntersectionError,
    NonSymmetricFrameError,
    NonUnitRotorError,
    ParseError,
    PGAError,
    UnsupportedBivectorError,
    ZeroVolumeError,
)
from .inertia import (
    EigenResult,
    InertiaFrame,
    align_to_eigenframe,
    jacobi_diagonalize,
    mesh_inertia,
    similarity,
    tet_inertia_frame,
)
from .io import load_mesh, parse_obj, parse_stl, write_obj
from .mesh import (
    TriMesh,
    center_of_mass,
    gap_magnitude,
    mesh_area,
    mesh_volume,
    polygon_area,
    validate,
)
from .simplex import Chain, Simplex, boundary, carrier, magnitude, magnitude_from_boundary
from .slicer import SlicePlane, clip_below, fill_curve, sliced_com, sliced_volume

__version__ = "0.1.0"
