"""Numerics for the weighted biharmonic equation Δ²u = |x|^a |u|^{p-1} u.

Critical exponents, singular homogeneous solutions, radial shooting, the
monotonicity energy, Pohozaev and Hardy-Rellich checks, and sphere-reduced
stability scans.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BihenonError,
    DecayFitError,
    GridError,
    InvalidParameters,
    NoSingularSolution,
    QuadratureError,
    RootNotFound,
    StepSizeUnderflow,
)
from .params import (  # noqa: E402
    DerivedScalars,
    ProblemParams,
    Regime,
    classify,
    derive_scalars,
    jl_exponent,
    n_threshold,
    sobolev_critical,
)

__all__ = [
    "__version__",
    "BihenonError",
    "DecayFitError",
    "GridError",
    "InvalidParameters",
    "NoSingularSolution",
    "QuadratureError",
    "RootNotFound",
    "StepSizeUnderflow",
    "DerivedScalars",
    "ProblemParams",
    "Regime",
    "classify",
    "derive_scalars",
    "jl_exponent",
    "n_threshold",
    "sobolev_critical",
]
