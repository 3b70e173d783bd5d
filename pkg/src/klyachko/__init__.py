"""Exact toric combinatorics for equivariant sheaves: fans and their duals,
Chow groups, Klyachko filtrations, sigma-families, Cox-ring gradings and
Euler-type resolutions of rank-2 bundles on toric surfaces."""

from .coxring import (
    Monomial,
    MonomialMatrix,
    cox_module_window,
    fine_degree_class,
    fitting_pair_support,
    irrelevant_ideal,
    linebundle_filtrations,
    sigma_hat_monomial,
)
from .errors import (
    DimensionError,
    GenericityViolation,
    Inconclusive,
    KlyachkoError,
    MathematicalFailure,
    NotAFace,
    NotSmoothComplete,
    ParseError,
    PreconditionError,
    RankDefect,
    SplitCase,
    UnsupportedDimension,
    ValidationError,
)
from .euler import (
    EulerResolution,
    Rank2Bundle,
    build_euler_resolution,
    cokernel_filtrations,
    normalize_twist,
    verify_resolution,
)
from .families import (
    FamilyWindow,
    Filtration,
    KlyachkoData,
    Multifiltration,
    Subspace,
    check_compatibility,
    check_torsion_free,
    global_sections,
    multifiltration_from_data,
    orbit_closure_window,
    restrict_to_face,
    sigma_component,
    validate_multifiltration,
    window_from_multifiltration,
)
from .fan import (
    Cone,
    Fan,
    dual_cone,
    faces,
    is_complete,
    is_face,
    is_smooth,
    semigroup_leq,
    separating_character,
)
from .lattice import LatticePoint, chow_presentation, pairing, smith_normal_form

__version__ = "0.1.0"
