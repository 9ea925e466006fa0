"""Exact lattice-polytope tools for deciding defectivity of families of point configurations."""

__version__ = "0.1.0"

from .exceptions import InputError, PreconditionError
from .intlat import (
    IntMatrix,
    Lattice,
    LatticeProjection,
    hermite_normal_form,
    integer_kernel,
    is_primitive_system,
    lattice_span,
    left_inverse,
    saturation,
    smith_normal_form,
)
from .pointconfig import (
    Family,
    PointConfiguration,
    cayley_sum,
    difference_lattice,
    dimension,
    faces,
    family_lattice,
    find_isomorphism,
    is_full_dimensional,
    is_isomorphic,
    is_spanning,
    minkowski_sum,
    minkowski_sum_all,
    standard_simplex,
)
from .polytope import (
    HPolytope,
    VPolytope,
    codegree,
    convex_hull,
    interior_lattice_points,
    lattice_points,
    lattice_width,
    normalized_volume,
    vertices_of,
)
from .mixedvol import mixed_volume, mixed_volume_ilp
from .cayley import (
    bounded_fi_search,
    detect_cayley_decomposition,
    is_join_type,
    summands,
    verify_cayley_partition,
    verify_fi_certificate,
)
from .defect import DefectReport, Rule, Verdict, analyze, check_interior_condition, is_unimodular_simplex_family

__all__ = [name for name in dir() if not name.startswith("_")]
