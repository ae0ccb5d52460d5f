"""Cyclidic nets: piecewise smooth C1 geometry from Dupin cyclide patches.

Built on the projective model of Lie sphere geometry: oriented spheres live
on the isotropic quadric of a signature-(4,2) form, a Dupin cyclide is a
pair of polar (++-) planes, and a patch is determined by four concircular
vertices plus one orthonormal vertex frame.
"""

from . import cyclide, errors, lie, mesh, nets, scene
from .cyclide import (
    CyclidicPatch,
    SphericalPatch,
    VertexFrame,
    VertexQuad,
    arc_midpoint,
    boundary_sphere,
    is_spherical,
    patch_from_data,
    spherical_patch,
    third_sphere,
    vertex_frames,
)
from .lie import (
    INF,
    Line3D,
    OrientedPlane,
    PointSphere,
    ProperCircle,
    ProperSphere,
    circle_from_tangent,
    circle_through,
    concircular,
    contact_point,
    lie_inner,
    lift,
    lift_point,
    oriented_contact,
    project,
    span_signature,
)
from .nets import (
    CircularNet,
    CyclidicNet,
    check_c1_joints,
    check_cube_orthogonality,
    complete_3d_from_coordinate_planes,
    convergence_experiment,
    cyclidic_cube,
    extract_contact_element_net,
    miquel_eighth_point,
    offset_net,
    patch_in_between,
    patches_of_net,
    propagate_frames,
    propagate_half_lines,
    validate_circular,
    verify_ribaucour,
)

__version__ = "0.1.0"
