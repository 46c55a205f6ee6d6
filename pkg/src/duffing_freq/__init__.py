"""Frequency of the periodic Duffing-oscillator solution, three ways.

Exact rational perturbation series (time rescaled by the unknown
frequency), the elliptic-integral closed form, and order-N variational
resummation of the truncated series, plus the convergence study of the
leading strong-coupling coefficient.
"""

from .exact_freq import (
    ExactFrequency,
    IntegrationError,
    StrongCoefficients,
    elliptic_K,
    envelope_data,
    leading_strong_coefficient,
    ode_period_oracle,
    ode_period_solution,
    omega_exact,
    strong_coefficients,
    strong_partial_sum,
)
from .lindstedt import (
    LindstedtError,
    RecursionState,
    WeakSeries,
    frequency_partial_sum,
    inhomogeneity,
    inhomogeneity_parts,
    solve_order,
    weak_series,
)
from .numerics import (
    PolynomialR,
    PolyRoot,
    QuadratureError,
    RootIsolationError,
    adaptive_quadrature,
    agm,
    fit_line,
    real_roots,
    to_mpf,
)
from .trig_series import Rational, TrigPoly, format_rational, parse_rational
from .variational import (
    ConvergenceFit,
    ConvergenceStudy,
    OptimizationError,
    VariationalPolynomial,
    VariationalRecord,
    b0_polynomial,
    convergence_study,
    default_study_dps,
    generalized_binomial,
    optimize_b0,
    optimize_omega,
    reexpand,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceFit",
    "ConvergenceStudy",
    "ExactFrequency",
    "IntegrationError",
    "LindstedtError",
    "OptimizationError",
    "PolyRoot",
    "PolynomialR",
    "QuadratureError",
    "Rational",
    "RecursionState",
    "RootIsolationError",
    "StrongCoefficients",
    "TrigPoly",
    "VariationalPolynomial",
    "VariationalRecord",
    "WeakSeries",
    "adaptive_quadrature",
    "agm",
    "b0_polynomial",
    "convergence_study",
    "default_study_dps",
    "elliptic_K",
    "envelope_data",
    "fit_line",
    "format_rational",
    "frequency_partial_sum",
    "generalized_binomial",
    "inhomogeneity",
    "inhomogeneity_parts",
    "leading_strong_coefficient",
    "ode_period_oracle",
    "ode_period_solution",
    "omega_exact",
    "optimize_b0",
    "optimize_omega",
    "parse_rational",
    "real_roots",
    "reexpand",
    "solve_order",
    "strong_coefficients",
    "strong_partial_sum",
    "to_mpf",
    "weak_series",
]
