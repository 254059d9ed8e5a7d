"""Sharp constants of the periodic magnetic Sobolev embedding.

mu_q(alpha) = min ||u' + i alpha u||_2 / ||u||_q over 2 pi-periodic u, q > 2.
"""

__version__ = "0.1.0"

from .errors import (
    BoundaryFluxError,
    ConvergenceError,
    DomainError,
    MagSobolevError,
    VerificationError,
)
from .oracle import OracleConfig, minimize_rayleigh, rayleigh, second_order_margin
from .period_integrals import QuadratureConfig, M, M_prime_analytic, P, partial_X
from .profile import OvalShape, ProblemParams, bracket_roots, gamma_max, oval_shape
from .reconstruct import MinimizerSample, constant_sample, sample_minimizer
from .solver import (
    OvalSolution,
    Regime,
    classify,
    normalize_flux,
    sharp_constant,
    solve_gamma,
    threshold_flux,
)

__all__ = [
    "BoundaryFluxError", "ConvergenceError", "DomainError", "MagSobolevError",
    "VerificationError", "OracleConfig", "minimize_rayleigh", "rayleigh",
    "second_order_margin", "QuadratureConfig", "M", "M_prime_analytic", "P",
    "partial_X", "OvalShape", "ProblemParams", "bracket_roots", "gamma_max",
    "oval_shape", "MinimizerSample", "constant_sample", "sample_minimizer",
    "OvalSolution", "Regime", "classify", "normalize_flux", "sharp_constant",
    "solve_gamma", "threshold_flux",
]
