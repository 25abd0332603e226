"""fixdelay: fixed-delay reformulation of linear DDEs with time-varying delay.

A time-varying delay tau(t) satisfying tau > 0 and tau' < 1 admits a strictly
increasing time transformation h with h(lam) - tau(h(lam)) = h(lam - tau*),
turning the system into one with a fixed delay tau* and a multiplicative
time-varying gain h'.  This package parameterises the admissible seed
functions that generate h, certifies their monotonicity exactly, evaluates
the transform and its derivative, verifies solution equivalence by
simulation, and searches seed space for transforms with small max |h'|.
"""

from ._backend import available_backends, default_backend
from .delays import DelaySpec, ValidationReport, theta_inverse, validate_delay
from .errors import (
    CoefficientOverflow,
    ConfigError,
    DelayBeyondHistory,
    DerivativeVanished,
    DomainMismatch,
    FixdelayError,
    NoAdmissiblePoint,
    NoConvergence,
    OutOfDomain,
    QuadratureFailure,
    Unsupported,
)
from .positivity import (
    CertificateResult,
    UnivariatePoly,
    phi_prime_as_poly,
    sampled_min,
    sturm_positive_on_interval,
)
from .seeds import (
    AdmissibilityReport,
    SeedConstraints,
    SeedFunction,
    SeedParameter,
    apply_T,
    apply_T_prime,
    beta,
    beta_prime,
    check_admissible,
    identity_seed,
    kernel_K,
    kernel_K_dlambda,
    quadratic_seed,
    recover_parameter,
)
from .transform import NewtonSettings, TimeTransform, TransformTrace, interval_index

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityReport",
    "CertificateResult",
    "CoefficientOverflow",
    "ConfigError",
    "DelayBeyondHistory",
    "DelaySpec",
    "DerivativeVanished",
    "DomainMismatch",
    "FixdelayError",
    "NewtonSettings",
    "NoAdmissiblePoint",
    "NoConvergence",
    "OutOfDomain",
    "QuadratureFailure",
    "SeedConstraints",
    "SeedFunction",
    "SeedParameter",
    "TimeTransform",
    "TransformTrace",
    "UnivariatePoly",
    "Unsupported",
    "ValidationReport",
    "apply_T",
    "apply_T_prime",
    "available_backends",
    "beta",
    "beta_prime",
    "check_admissible",
    "default_backend",
    "identity_seed",
    "interval_index",
    "kernel_K",
    "kernel_K_dlambda",
    "phi_prime_as_poly",
    "quadratic_seed",
    "recover_parameter",
    "sampled_min",
    "sturm_positive_on_interval",
    "theta_inverse",
    "validate_delay",
]
