"""
Operators acting on Taylor coefficients.

Every operator here is lower triangular on coefficient sequences (or a shift
of one), so applying it to a degree-N truncation gives the exact first N+1
output coefficients.  The Cesaro-type kernels run through the O(N) recursion

    s[n] = t * s[n-1] + c[n]

from :mod:`cesaro_lab._kernels`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import (
    TaylorSeries,
    _check_t,
    cauchy_product,
    derivative,
    log_kernel,
    max_degree,
    monomial,
)

__all__ = [
    "Kind",
    "OperatorKernel",
    "FiniteSection",
    "UnsupportedKernel",
    "apply_ct",
    "apply_c0",
    "apply_c1",
    "apply_shift",
    "apply_backshift",
    "apply_mult_ht",
    "apply_tg",
    "apply_vg",
    "apply_st",
    "invert_st",
    "cesaro_symbol",
    "apply",
    "finite_section",
]


class UnsupportedKernel(ValueError):
    pass


class Kind(enum.Enum):
    CESARO_T = "cesaro"
    HARDY_C0 = "c0"
    CESARO_C1 = "c1"
    FWD_SHIFT = "shift"
    BACK_SHIFT = "backshift"
    MULT_HT = "mult_ht"
    VOLTERRA_TG = "tg"
    VOLTERRA_VG = "vg"
    ST = "st"


_NEEDS_T = {Kind.CESARO_T, Kind.MULT_HT, Kind.ST}
_NEEDS_G = {Kind.VOLTERRA_TG, Kind.VOLTERRA_VG}


@dataclass(frozen=True, eq=False)
class OperatorKernel:
    kind: Kind
    t: float | None = None
    g: TaylorSeries | None = None

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind in _NEEDS_T:
            if self.t is None:
                raise ValueError(f"{kind.name} needs a parameter t")
            _check_t(self.t)
        if kind in _NEEDS_G and self.g is None:
            raise ValueError(f"{kind.name} needs a symbol g")

    def __call__(self, f: TaylorSeries) -> TaylorSeries:
        return apply(self, f)

    @property
    def label(self) -> str:
        if self.t is None:
            return self.kind.value
        return f"{self.kind.value}(t={self.t:g})"


@dataclass(frozen=True, eq=False)
class FiniteSection:
    entries: np.ndarray
    op: OperatorKernel
    degree: int

    def __matmul__(self, f):
        c = f.coeffs if isinstance(f, TaylorSeries) else np.asarray(f)
        return self.entries @ c


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

def _divide_by_index(s):
    return s / np.arange(1, s.shape[0] + 1, dtype=np.float64)


def apply_ct(t: float, f: TaylorSeries) -> TaylorSeries:
    _check_t(t)
    return TaylorSeries(_divide_by_index(_kernels.prefix_scan(t, f.coeffs)), f.truncated)


def apply_c0(f: TaylorSeries) -> TaylorSeries:
    return TaylorSeries(_divide_by_index(f.coeffs), f.truncated)


def apply_c1(f: TaylorSeries) -> TaylorSeries:
    return TaylorSeries(_divide_by_index(np.cumsum(f.coeffs)), f.truncated)


def apply_shift(f: TaylorSeries, cap: int | None = None) -> TaylorSeries:
    """Multiplication by z.  Degree grows by one unless ``cap`` is reached."""
    cap = max_degree() if cap is None else cap
    N = min(f.degree + 1, max(cap, 1))
    c = np.zeros(N + 1, dtype=np.complex128)
    c[1:] = f.coeffs[:N]
    return TaylorSeries(c, f.truncated or N < f.degree + 1)


def apply_backshift(f: TaylorSeries) -> TaylorSeries:
    """(f - f(0))/z."""
    if f.degree == 0:
        return TaylorSeries(np.zeros(1), f.truncated)
    return TaylorSeries(f.coeffs[1:], f.truncated)


def apply_mult_ht(t: float, f: TaylorSeries) -> TaylorSeries:
    """Multiplication by 1/(1 - t z), kept at the degree of ``f``."""
    _check_t(t)
    return TaylorSeries(_kernels.prefix_scan(t, f.coeffs), f.truncated)


def _volterra_core(g, f, degree):
    # c = f * g', needed up to index ``degree``
    gp = derivative(g)
    full = f.degree + gp.degree
    cap = max_degree() if degree is None else degree
    return cauchy_product(f, gp, cap=min(full, cap))


def apply_tg(g: TaylorSeries, f: TaylorSeries, degree: int | None = None) -> TaylorSeries:
    """Integral of f g' from 0 to z.

    The output runs to degree ``N_f + N_g`` (or ``degree`` when given).
    Coefficient n is exact only while ``g`` carries index n; pass a
    longer ``g`` when the tail matters.
    """
    c = _volterra_core(g, f, None if degree is None else max(degree - 1, 0))
    y = np.zeros(c.degree + 2, dtype=np.complex128)
    y[1:] = _divide_by_index(c.coeffs)
    out = TaylorSeries(y, c.truncated)
    if degree is not None and out.degree != degree:
        out = out.padded(degree)
    return out


def apply_vg(g: TaylorSeries, f: TaylorSeries, degree: int | None = None) -> TaylorSeries:
    """(1/z) times the integral of f g' from 0 to z.

    At z = 0 this returns the analytic limit f(0) g'(0), which is f(0)
    whenever g'(0) = 1 (as for the log kernel).
    """
    c = _volterra_core(g, f, degree)
    out = TaylorSeries(_divide_by_index(c.coeffs), c.truncated)
    if degree is not None and out.degree != degree:
        out = out.padded(degree)
    return out


def cesaro_symbol(t: float, N: int) -> TaylorSeries:
    """Symbol g with V_g = C_t and T_g = S_t: -log(1 - t z)/t, or z at t = 0."""
    _check_t(t)
    return monomial(1, N) if t == 0.0 else log_kernel(t, N)


def apply_st(t: float, f: TaylorSeries, cap: int | None = None) -> TaylorSeries:
    """z times C_t f (the integral operator with symbol -log(1 - t z)/t)."""
    return apply_shift(apply_ct(t, f), cap=cap)


def invert_st(t: float, y: TaylorSeries) -> TaylorSeries:
    """Back-substitution for S_t f = y on coefficients 1..N of ``y``.

    Recovers f of degree N-1 from s[n] = (n+1) y[n+1] and
    f[n] = s[n] - t s[n-1].  Raises if ``y`` does not vanish at 0.
    """
    _check_t(t)
    if y[0] != 0:
        raise ValueError("S_t has range in {y : y(0) = 0}")
    if y.degree == 0:
        return TaylorSeries(np.zeros(1), y.truncated)
    s = y.coeffs[1:] * np.arange(1, y.degree + 1)
    f = s.copy()
    f[1:] -= t * s[:-1]
    return TaylorSeries(f, y.truncated)


_APPLY = {
    Kind.CESARO_T: lambda op, f: apply_ct(op.t, f),
    Kind.HARDY_C0: lambda op, f: apply_c0(f),
    Kind.CESARO_C1: lambda op, f: apply_c1(f),
    Kind.FWD_SHIFT: lambda op, f: apply_shift(f),
    Kind.BACK_SHIFT: lambda op, f: apply_backshift(f),
    Kind.MULT_HT: lambda op, f: apply_mult_ht(op.t, f),
    Kind.VOLTERRA_TG: lambda op, f: apply_tg(op.g, f),
    Kind.VOLTERRA_VG: lambda op, f: apply_vg(op.g, f),
    Kind.ST: lambda op, f: apply_st(op.t, f),
}


def apply(op: OperatorKernel, f: TaylorSeries) -> TaylorSeries:
    return _APPLY[op.kind](op, f)


# ---------------------------------------------------------------------------
# finite sections
# ---------------------------------------------------------------------------

def _toeplitz_lower(col, N):
    """Lower-triangular Toeplitz matrix whose entry (n, k) is col[n - k]."""
    n = np.arange(N + 1)
    diff = n[:, None] - n[None, :]
    out = np.zeros((N + 1, N + 1), dtype=col.dtype)
    mask = diff >= 0
    out[mask] = col[diff[mask]]
    return out


def _geometric_column(t, N):
    return float(t) ** np.arange(N + 1, dtype=np.float64)


def _symbol_column(g, N):
    # j * g[j] for j = 0..N+1, zero past the stored degree
    j = np.arange(N + 2)
    gc = g.padded(N + 1).coeffs
    col = j * gc
    if not np.any(col.imag):
        col = col.real
    return col


def finite_section(op: OperatorKernel, N: int) -> FiniteSection:
    """Leading (N+1) x (N+1) block of the operator's coefficient matrix.

    Real kernels give a float64 matrix.  Entry (n, k) is the coefficient
    of z**n in the image of z**k.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    kind = op.kind
    inv = 1.0 / np.arange(1, N + 2, dtype=np.float64)
    if kind is Kind.CESARO_T:
        A = _toeplitz_lower(_geometric_column(op.t, N), N) * inv[:, None]
    elif kind is Kind.HARDY_C0:
        A = np.diag(inv)
    elif kind is Kind.CESARO_C1:
        A = np.tril(np.ones((N + 1, N + 1))) * inv[:, None]
    elif kind is Kind.FWD_SHIFT:
        A = np.eye(N + 1, k=-1)
    elif kind is Kind.BACK_SHIFT:
        A = np.eye(N + 1, k=1)
    elif kind is Kind.MULT_HT:
        A = _toeplitz_lower(_geometric_column(op.t, N), N)
    elif kind is Kind.ST:
        A = np.zeros((N + 1, N + 1))
        if N > 0:
            A[1:, :-1] = _toeplitz_lower(_geometric_column(op.t, N - 1), N - 1) * inv[:-1, None]
    elif kind is Kind.VOLTERRA_TG:
        # (T_g z^k)[n] = (n - k) g[n - k] / n for n >= 1
        col = _symbol_column(op.g, N)
        A = np.zeros((N + 1, N + 1), dtype=col.dtype)
        if N > 0:
            A[1:, :-1] = _toeplitz_lower(col[1:N + 1], N - 1)
            A[1:, :] /= np.arange(1, N + 1, dtype=np.float64)[:, None]
    elif kind is Kind.VOLTERRA_VG:
        # (V_g z^k)[n] = (n + 1 - k) g[n + 1 - k] / (n + 1)
        col = _symbol_column(op.g, N)
        A = _toeplitz_lower(col[1:], N) * inv[:, None]
    else:  # pragma: no cover - every Kind is handled above
        raise UnsupportedKernel(f"no finite section for {kind}")
    return FiniteSection(A, op, N)
