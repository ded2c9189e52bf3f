"""Log-domain verification toolkit for Hermite-coefficient decay laws,
harmonic-oscillator power norms and Bargmann-side growth classes."""

from .lognum import (
    LogReal,
    NoConvergenceError,
    NonPositiveTermError,
    log_add,
    log_mul,
    log_sum_positive_series,
)
from .hermite import (
    FiniteLaw,
    GeometricLaw,
    HermiteExpansion,
    MultiIndex,
    QuadratureUnderresolvedError,
    SizeLimitError,
    SubExponentialLaw,
    enumerate_multiindices,
    expansion_from_csv,
    expansion_l2_norm,
    expansion_to_csv,
    hermite_function_eval,
    mi,
    parseval_oracle,
    realize_law,
)
from .oscillator import (
    DecayClassification,
    EmptyGridError,
    InsufficientDataError,
    NormSequence,
    TruncationInsufficientError,
    classify_decay,
    epsilon_n,
    forward_check,
    h_power_norm,
    power_norm_bound,
    reverse_check,
    reverse_coeff_bound,
)
from .asymptotics import (
    ConvexEnvelope,
    PeakCurve,
    argmax_m,
    bell_numbers,
    berend_tassa_check,
    cn_decay_sequence,
    dobinski,
    interval_check,
    m_and_derivatives,
    maximum_bound_check,
    phi_star_estimate_check,
    series_bound_check,
    series_sum,
    t_alpha,
    theta_constant,
)
from .bargmann import (
    EntireSeries,
    GrowthFit,
    InsufficientRadiiError,
    bargmann_from_expansion,
    classify_entire,
    eval_entire,
    growth_fit,
    vartheta,
    vartheta_profile,
    vartheta_sandwich_check,
    vartheta_sandwich_constants,
)
from .report import CheckReport, reports_to_csv

__version__ = "0.1.0"
