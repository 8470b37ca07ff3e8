"""Finite-codimension ideals of smooth functions in coordinates.

Simplex-integral interpolation, ideals as (weighted configuration,
subspace) pairs, membership certification, quotient algebras and limits of
colliding points.
"""

from .errors import (
    CertificationFailure,
    ClusterAmbiguity,
    ClusterOracleFail,
    CodimMismatch,
    ComplexSpectrum,
    ExtrapolationDivergence,
    IdealSpaceError,
    InjectivityWitnessFail,
    InputError,
    MergeToleranceViolation,
    NotTransverse,
    NumericalFailure,
    SingularFiber,
    TransversalityFail,
)
from .idealspace import (
    IdealPoint,
    QuotientAlgebra,
    Subspace,
    Tolerances,
    Transversal,
    change_transversal_restrict,
    change_transversal_section,
    cluster_vanishing,
    curvilinear_cluster,
    ideal_from_clusters,
    ideal_from_points,
    injectivity_probe,
    local_dimensions,
    membership_oracle,
    monomial_transversal,
    primary_decomposition,
    quotient_algebra,
    reduce_mod_ideal,
    subspace_distance,
    transversality_check,
    vanishing_subspace,
    wspec_from_algebra,
)
from .kergin import (
    InterpolationOperator,
    boundary_identity_residual,
    build_interpolator,
    g_map,
    interpolate,
    newton_expansion,
    simplex_form,
    vanishing_certificate,
)
from .limits import ConfigCurve, LimitReport, approximation_witness, collision_gallery, limit_ideal, subspace_at
from .polycalc import (
    AffineSimplex,
    Jet,
    Polynomial,
    SmoothFnOracle,
    SymmetricForm,
    derivative_tensor,
    poly_eval,
    simplex_moment,
    symform_eval,
)
from .spectrum import WeightedConfig

__version__ = "0.1.0"
