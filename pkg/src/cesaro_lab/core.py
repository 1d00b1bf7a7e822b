"""
Truncated Taylor series on the unit disc.

A :class:`TaylorSeries` holds the coefficients ``c[0..N]`` of the polynomial
``f(z) = sum_n c[n] z**n``.  Instances are immutable: the coefficient array
is marked read-only and every operation returns a new series.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

__all__ = [
    "DEFAULT_DEGREE",
    "DomainError",
    "NonFiniteCoefficient",
    "TaylorSeries",
    "max_degree",
    "make_series",
    "one",
    "monomial",
    "evaluate",
    "cauchy_product",
    "derivative",
    "geometric_kernel",
    "log_kernel",
]

DEFAULT_DEGREE = 4096
_DEFAULT_MAX_DEGREE = 2 * DEFAULT_DEGREE
# |exp(i theta)| may exceed 1 by a rounding error
_UNIT_SLACK = 1e-12


class DomainError(ValueError):
    """A parameter lies outside the domain where the operation is defined."""


class NonFiniteCoefficient(ValueError):
    pass


def max_degree():
    """Degree cap for products and shifts (env ``CESARO_LAB_MAX_DEGREE``)."""
    raw = os.environ.get("CESARO_LAB_MAX_DEGREE")
    if raw is None or raw.strip() == "":
        return _DEFAULT_MAX_DEGREE
    try:
        cap = int(raw)
    except ValueError:
        raise DomainError(f"CESARO_LAB_MAX_DEGREE must be an integer, got {raw!r}")
    if cap < 0:
        raise DomainError(f"CESARO_LAB_MAX_DEGREE must be >= 0, got {cap}")
    return cap


@dataclass(frozen=True, eq=False)
class TaylorSeries:
    coeffs: np.ndarray
    truncated: bool = field(default=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128, copy=True).reshape(-1)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def __len__(self):
        return self.coeffs.shape[0]

    def __getitem__(self, n):
        return self.coeffs[n]

    def __repr__(self):
        flag = ", truncated" if self.truncated else ""
        return f"TaylorSeries(degree={self.degree}{flag})"

    def padded(self, N: int) -> "TaylorSeries":
        """Zero-pad (or cut) to degree ``N``."""
        c = np.zeros(N + 1, dtype=np.complex128)
        k = min(N + 1, len(self))
        c[:k] = self.coeffs[:k]
        return TaylorSeries(c, self.truncated or N < self.degree)

    def _binary(self, other, op):
        if not isinstance(other, TaylorSeries):
            return NotImplemented
        N = max(self.degree, other.degree)
        a, b = self.padded(N).coeffs, other.padded(N).coeffs
        return TaylorSeries(op(a, b), self.truncated or other.truncated)

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, scalar):
        if isinstance(scalar, TaylorSeries):
            return NotImplemented
        return TaylorSeries(self.coeffs * complex(scalar), self.truncated)

    __rmul__ = __mul__

    def __neg__(self):
        return TaylorSeries(-self.coeffs, self.truncated)

    def __truediv__(self, scalar):
        return TaylorSeries(self.coeffs / complex(scalar), self.truncated)


def make_series(coeffs) -> TaylorSeries:
    c = np.asarray(coeffs, dtype=np.complex128).reshape(-1)
    if c.size == 0:
        raise ValueError("a series needs at least one coefficient")
    if not np.all(np.isfinite(c)):
        bad = int(np.flatnonzero(~np.isfinite(c))[0])
        raise NonFiniteCoefficient(f"coefficient {bad} is not finite: {c[bad]}")
    return TaylorSeries(c)


def one(N: int = 0) -> TaylorSeries:
    """The constant function 1, stored at degree ``N``."""
    c = np.zeros(N + 1, dtype=np.complex128)
    c[0] = 1.0
    return TaylorSeries(c)


def monomial(n: int, N: int | None = None) -> TaylorSeries:
    """z**n, stored at degree ``max(n, N)``."""
    N = n if N is None else max(n, N)
    c = np.zeros(N + 1, dtype=np.complex128)
    c[n] = 1.0
    return TaylorSeries(c)


def evaluate(f: TaylorSeries, z):
    """Horner evaluation at a point or array of points in the closed disc."""
    za = np.asarray(z, dtype=np.complex128)
    if np.any(np.abs(za) > 1.0 + _UNIT_SLACK):
        raise DomainError("evaluation points must satisfy |z| <= 1")
    out = _kernels.horner(f.coeffs, za.reshape(-1)).reshape(za.shape)
    return complex(out) if out.ndim == 0 else out


def cauchy_product(f: TaylorSeries, g: TaylorSeries, cap: int | None = None) -> TaylorSeries:
    """Coefficients of f*g up to degree ``N_f + N_g``, cut at ``cap``.

    The cap defaults to :func:`max_degree`; a cut sets ``truncated``.
    """
    cap = max_degree() if cap is None else cap
    full = f.degree + g.degree
    keep = min(full, cap)
    # direct (not FFT) convolution keeps small trailing coefficients accurate
    c = np.convolve(f.coeffs[: keep + 1], g.coeffs[: keep + 1])[: keep + 1]
    return TaylorSeries(c, f.truncated or g.truncated or keep < full)


def derivative(g: TaylorSeries) -> TaylorSeries:
    """g' with coefficients (n+1) g[n+1]; the derivative of a constant is 0."""
    if g.degree == 0:
        return TaylorSeries(np.zeros(1), g.truncated)
    n = np.arange(1, g.degree + 1)
    return TaylorSeries(n * g.coeffs[1:], g.truncated)


def _check_t(t, allow_zero=True):
    lo_ok = t >= 0.0 if allow_zero else t > 0.0
    if not (lo_ok and t < 1.0):
        interval = "[0, 1)" if allow_zero else "(0, 1)"
        raise DomainError(f"t must lie in {interval}, got {t!r}")


def geometric_kernel(t: float, N: int = DEFAULT_DEGREE) -> TaylorSeries:
    """Truncation of 1/(1 - t z): coefficients t**n."""
    _check_t(t)
    return TaylorSeries(float(t) ** np.arange(N + 1, dtype=np.float64))


def log_kernel(t: float, N: int = DEFAULT_DEGREE) -> TaylorSeries:
    """Truncation of -log(1 - t z)/t.

    Coefficients are 0, 1, t/2, t**2/3, ..., i.e. index n + 1 holds
    t**n/(n+1), so the derivative is exactly the geometric kernel.  The
    unshifted sequence t**n/(n+1) is C_t applied to the constant 1.
    """
    _check_t(t, allow_zero=False)
    c = np.zeros(N + 1, dtype=np.float64)
    n = np.arange(N, dtype=np.float64)
    c[1:] = float(t) ** n / (n + 1.0)
    return TaylorSeries(c)
