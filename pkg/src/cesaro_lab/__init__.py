"""Generalized Cesaro operators on truncated Taylor series."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .core import (
    DomainError,
    NonFiniteCoefficient,
    TaylorSeries,
    cauchy_product,
    evaluate,
    geometric_kernel,
    log_kernel,
    make_series,
    monomial,
    one,
)
from .operators import (
    FiniteSection,
    Kind,
    OperatorKernel,
    apply_backshift,
    apply_c0,
    apply_c1,
    apply_ct,
    apply_mult_ht,
    apply_shift,
    apply_st,
    apply_tg,
    apply_vg,
    finite_section,
)
from .analysis import INF, h2_opnorm, hardy_norm, mp_mean, opnorm_lower, sup_norm, upper_bound_ct
from .spectral import (
    cesaro_means,
    diagonal_spectrum,
    eigen_residual,
    eigenvector,
    ergodic_certificate,
    ergodic_limit_error,
    power_norms,
)
