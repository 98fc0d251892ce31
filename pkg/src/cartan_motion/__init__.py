"""Numerics for spherical functions on Cartan motion groups ``K x| p``."""

__version__ = "0.1.0"

from .eigenspace import (
    BesselZeroError,
    EigenFunctionHandle,
    ResolutionError,
    SphereDensity,
    analyze,
    circle_samples,
    ktype_project,
    laplacian_residual,
    radial_average,
    synthesize,
)
from .groups import (
    ClassificationEntry,
    GroupSpec,
    NoSamplerError,
    UnknownGroupError,
    classification_json,
    haar_sample,
    is_transitive_on_spheres,
    transitive_groups,
)
from .models import MotionModel, RankOneModel, SLFlatModel, model_from_string
from .positivity import (
    GramError,
    GramReport,
    PointConfig,
    bochner_test,
    gram_matrix,
    is_positive_semidefinite,
)
from .spherical import (
    LogComplex,
    MCEstimate,
    QuadratureAccuracyWarning,
    RadialValue,
    Verdict,
    boundedness_classify,
    phi_asymptotic,
    phi_eval,
    phi_radial,
    psi_monte_carlo,
    radial_quadrature,
)
