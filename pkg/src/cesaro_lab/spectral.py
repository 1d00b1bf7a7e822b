"""
Eigenvectors, spectra and iteration behaviour of C_t and S_t.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .analysis import hardy_norm, h2_opnorm
from .core import DEFAULT_DEGREE, DomainError, TaylorSeries, _check_t, geometric_kernel
from .operators import (
    FiniteSection,
    Kind,
    OperatorKernel,
    apply,
    apply_ct,
    apply_st,
    finite_section,
)

__all__ = [
    "RESIDUAL_BUFFER",
    "MAX_POWER_DEGREE",
    "Certificate",
    "SpectralReport",
    "eigenvector",
    "eigenvector_closed_form",
    "eigen_residual",
    "diagonal_spectrum",
    "cesaro_means",
    "ergodic_limit_error",
    "power_norms",
    "compact_tail",
    "ergodic_certificate",
    "orbit_containment_st",
]

RESIDUAL_BUFFER = 64
MAX_POWER_DEGREE = 2048


@dataclass(frozen=True)
class Certificate:
    """Hypotheses of the compact mean-ergodic theorem, checked on a section."""

    spectrum_in_disc: bool
    one_on_circle: bool
    ker_im_trivial: bool
    delta: float

    @property
    def ok(self) -> bool:
        return self.spectrum_in_disc and self.one_on_circle and self.ker_im_trivial


@dataclass
class SpectralReport:
    eigenvalues: list = field(default_factory=list)
    eigen_residuals: list = field(default_factory=list)
    power_norms: list = field(default_factory=list)
    ergodic_errors: list = field(default_factory=list)
    certificate: Certificate | None = None
    accumulates_at_zero: bool = True


def _check_m(m, N):
    if m < 0:
        raise DomainError(f"eigenvalue index must be >= 0, got {m}")
    if m > N:
        raise DomainError(f"eigenvalue index {m} exceeds degree {N}")


def eigenvector(t: float, m: int, N: int = DEFAULT_DEGREE) -> TaylorSeries:
    """Eigenvector of C_t for 1/(m+1): the series of z**m (1 - t z)**-(m+1).

    Built from (n - m) x[n] = t n x[n-1] with x[m] = 1.
    """
    _check_t(t)
    _check_m(m, N)
    return TaylorSeries(_kernels.eigen_recursion(t, m, N))


def eigenvector_closed_form(t: float, m: int, N: int = DEFAULT_DEGREE) -> TaylorSeries:
    """x[m + j] = binom(m + j, m) t**j, in exact integer binomials."""
    _check_t(t)
    _check_m(m, N)
    x = np.zeros(N + 1)
    for j in range(N - m + 1):
        x[m + j] = float(math.comb(m + j, m)) * t ** j if t or j == 0 else 0.0
    return TaylorSeries(x)


def eigen_residual(t: float, m: int, p=2, N: int = DEFAULT_DEGREE,
                   buffer: int = RESIDUAL_BUFFER) -> float:
    """||C_t g_m - g_m/(m+1)||_p / ||g_m||_p with the last ``buffer``
    coefficients of the difference set to zero."""
    g = eigenvector(t, m, N)
    diff = (apply_ct(t, g) - g / (m + 1)).coeffs.copy()
    if buffer > 0:
        diff[max(N + 1 - buffer, 0):] = 0.0
    return hardy_norm(TaylorSeries(diff), p).value / hardy_norm(g, p).value


def diagonal_spectrum(N: int) -> np.ndarray:
    """Diagonal of the (N+1)-section of C_t: 1, 1/2, ..., 1/(N+1), for every t."""
    if N < 0:
        raise ValueError("N must be >= 0")
    return 1.0 / np.arange(1, N + 2, dtype=np.float64)


def _as_callable(op):
    if isinstance(op, OperatorKernel):
        return lambda f: apply(op, f)
    return op


def cesaro_means(op, f: TaylorSeries, n: int) -> TaylorSeries:
    """(1/n) sum_{k=1..n} op**k f, accumulated as a running average."""
    if n < 1:
        raise ValueError("n must be >= 1")
    step = _as_callable(op)
    x = f
    mean = None
    for k in range(1, n + 1):
        x = step(x)
        mean = x if mean is None else mean + (x - mean) / k
    return mean


def ergodic_limit_error(t: float, f: TaylorSeries, n: int, p=2,
                        degree: int = 1024) -> float:
    """||T_[n] f - f(0) h_t||_p for T = C_t, with f padded to ``degree``.

    f(0) h_t is the mean-ergodic limit: C_t fixes h_t and maps the
    hyperplane {g(0) = 0} into itself.
    """
    _check_t(t)
    N = max(degree, f.degree)
    f = f.padded(N)
    mean = cesaro_means(OperatorKernel(Kind.CESARO_T, t), f, n)
    limit = geometric_kernel(t, N) * f[0]
    return hardy_norm(mean - limit, p).value


def _section(op, N):
    if isinstance(op, FiniteSection):
        return op
    if N > MAX_POWER_DEGREE:
        raise DomainError(f"power studies are capped at degree {MAX_POWER_DEGREE}")
    return finite_section(op, N)


def power_norms(op, nmax: int, N: int = 1024) -> list[tuple[int, float]]:
    """[(n, ||A**n||_2)] for n = 1, 2, 4, ... <= nmax by repeated squaring."""
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    A = _section(op, N).entries
    out = []
    n = 1
    P = A
    while n <= nmax:
        out.append((n, h2_opnorm(P)))
        n *= 2
        if n <= nmax:
            P = P @ P
    return out


def compact_tail(t: float, N_small: int, N_large: int) -> float:
    """H^2 norm of the N_large-section of C_t minus its leading
    (N_small+1) x (N_small+1) block."""
    _check_t(t)
    if N_small > N_large:
        raise ValueError("N_small must not exceed N_large")
    if N_small == N_large:
        return 0.0
    A = finite_section(OperatorKernel(Kind.CESARO_T, t), N_large).entries.copy()
    A[: N_small + 1, : N_small + 1] = 0.0
    return h2_opnorm(A)


def ergodic_certificate(t: float, p=2, N: int = 256, samples: int = 100,
                        seed: int = 42) -> Certificate:
    """Check the spectral and Ker/Im hypotheses for C_t on a degree-N section.

    ``p`` only labels the space; every check is on coefficients.
    """
    _check_t(t)
    A = finite_section(OperatorKernel(Kind.CESARO_T, t), N).entries
    # triangular: the spectrum is the diagonal
    diag = np.diag(A)
    in_disc = bool(np.all((diag >= 0.0) & (diag <= 1.0)))
    on_circle = diag[np.isclose(np.abs(diag), 1.0, rtol=0.0, atol=1e-14)]
    rest = diag[~np.isclose(np.abs(diag), 1.0, rtol=0.0, atol=1e-14)]
    delta = float(np.abs(rest).max()) if rest.size else 0.0
    one_on_circle = bool(on_circle.size == 1 and on_circle[0] == 1.0 and delta < 1.0)

    # Im(I - C_t) vanishes at 0 while the fixed vector h_t does not
    rng = np.random.default_rng(seed)
    vanish = True
    for _ in range(samples):
        c = rng.standard_normal(N + 1) + 1j * rng.standard_normal(N + 1)
        f = TaylorSeries(c)
        if (f - apply_ct(t, f))[0] != 0:
            vanish = False
            break
    h = geometric_kernel(t, N)
    fixed = np.max(np.abs((apply_ct(t, h) - h).coeffs)) <= 1e-13
    ker_im = bool(vanish and fixed and h[0] == 1.0)
    return Certificate(in_disc, one_on_circle, ker_im, delta)


def orbit_containment_st(t: float, f: TaylorSeries, nmax: int) -> bool:
    """True when (S_t**n f)(0) = 0 for n = 1..nmax."""
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    x = f
    for _ in range(nmax):
        x = apply_st(t, x)
        if x[0] != 0:
            return False
    return True
