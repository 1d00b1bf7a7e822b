"""
Integral means, Hardy norms and operator-norm bounds.

Integral means over the circle of radius r use the uniform K-point rule,
evaluated in one FFT of the scaled coefficients.  For a polynomial of degree
N the rule integrates |f|**2 exactly once K > N, and |f|**(2k) once K > kN.
Sup norms start from the node maximum and are refined by a bounded scalar
search around the largest nodes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import _kernels
from .core import DEFAULT_DEGREE, DomainError, TaylorSeries, _check_t, geometric_kernel, one
from .operators import FiniteSection, apply_ct

__all__ = [
    "INF",
    "NoConvergence",
    "EmptyTestSet",
    "InequalityViolation",
    "NormReport",
    "OperatorBound",
    "BoundRow",
    "BoundTable",
    "parse_p",
    "node_count",
    "radius_schedule",
    "circle_values",
    "mp_mean",
    "mp_profile",
    "hardy_norm",
    "sup_norm",
    "upper_bound_ct",
    "opnorm_lower",
    "h2_opnorm",
    "jensen_check",
    "gamma",
    "bound_comparison",
]

INF = math.inf


class NoConvergence(RuntimeError):
    pass


class EmptyTestSet(ValueError):
    pass


class InequalityViolation(AssertionError):
    pass


@dataclass(frozen=True)
class NormReport:
    """An integral mean or Hardy norm.

    ``tail_bound`` estimates the error of the K-node rule: zero where the
    rule is exact, otherwise the change seen when K doubles (for p = inf,
    the gain of the local refinement over the node maximum).
    """

    value: float
    p: float
    r: float
    quadrature_nodes: int
    tail_bound: float

    def __float__(self):
        return self.value


def parse_p(p):
    """Accept a number >= 1, ``inf`` or the string ``"inf"``."""
    if isinstance(p, str):
        key = p.strip().lower()
        if key in ("inf", "infinity", "oo"):
            return INF
        try:
            p = float(key)
        except ValueError:
            raise DomainError(f"bad exponent {p!r}")
    p = float(p)
    if not (p >= 1.0):
        raise DomainError(f"exponent p must be >= 1 or inf, got {p}")
    return p


def node_count(N: int) -> int:
    """Default node count: the power of two >= max(4096, 4(N+1))."""
    need = max(4096, 4 * (N + 1))
    return 1 << (need - 1).bit_length()


def radius_schedule(jmax: int = 12) -> np.ndarray:
    """Radii 1 - 2**-j for j = 0..jmax."""
    return 1.0 - 2.0 ** -np.arange(jmax + 1, dtype=np.float64)


def _scaled(f, r):
    n = np.arange(len(f), dtype=np.float64)
    return f.coeffs * (r ** n) if r != 1.0 else f.coeffs


def circle_values(f: TaylorSeries, r: float, K: int) -> np.ndarray:
    """f(r exp(2 pi i j / K)) for j = 0..K-1."""
    c = _scaled(f, r)
    if c.shape[0] > K:
        # aliasing: z**n and z**(n mod K) agree on the nodes
        pad = (-c.shape[0]) % K
        c = np.concatenate([c, np.zeros(pad, dtype=c.dtype)]).reshape(-1, K).sum(axis=0)
    return np.fft.ifft(c, n=K) * K


def _rule_exact(p, N, K):
    if p == 2.0:
        return K > N
    if float(p).is_integer() and int(p) % 2 == 0:
        return K > (int(p) // 2) * N
    return False


def _mean_power(vals, p):
    a = np.abs(vals)
    if p == 1.0:
        return float(np.mean(a))
    scale = float(a.max())
    if scale == 0.0:
        return 0.0
    return scale * float(np.mean((a / scale) ** p)) ** (1.0 / p)


def _refined_max(f, r, vals, K, candidates=6):
    """Maximize |f| on the circle near the best nodes."""
    a = np.abs(vals)
    best = float(a.max())
    if K < 3 or best == 0.0:
        return best
    left, right = np.roll(a, 1), np.roll(a, -1)
    peaks = np.flatnonzero((a >= left) & (a >= right))
    peaks = peaks[np.argsort(a[peaks])[::-1][:candidates]]
    c = _scaled(f, r)
    h = 2.0 * math.pi / K
    for j in peaks:
        theta0 = h * j

        def neg(theta):
            return -abs(_kernels.horner(c, np.array([np.exp(1j * theta)]))[0])

        res = minimize_scalar(neg, bounds=(theta0 - h, theta0 + h), method="bounded",
                              options={"xatol": 1e-12})
        best = max(best, -float(res.fun))
    return best


def mp_mean(f: TaylorSeries, r: float, p, K: int | None = None,
            estimate_error: bool = True) -> NormReport:
    """Integral mean M_p(r, f); p = inf gives the maximum modulus on |z| = r."""
    if not (0.0 <= r <= 1.0):
        raise DomainError(f"radius must lie in [0, 1], got {r}")
    p = parse_p(p)
    K = node_count(f.degree) if K is None else int(K)
    if K < 1 or K & (K - 1):
        raise DomainError(f"node count must be a power of two, got {K}")
    vals = circle_values(f, r, K)
    if p == INF:
        grid = float(np.abs(vals).max())
        value = _refined_max(f, r, vals, K)
        return NormReport(value, p, r, K, value - grid)
    value = _mean_power(vals, p)
    if _rule_exact(p, f.degree, K) or not estimate_error:
        err = 0.0
    else:
        err = abs(_mean_power(circle_values(f, r, 2 * K), p) - value)
    return NormReport(value, p, r, K, err)


def mp_profile(f: TaylorSeries, p, radii=None, K: int | None = None) -> np.ndarray:
    radii = radius_schedule() if radii is None else radii
    return np.array([mp_mean(f, r, p, K, estimate_error=False).value for r in radii])


def hardy_norm(f: TaylorSeries, p, K: int | None = None,
               check_monotone: bool = False) -> NormReport:
    """||f||_p of a polynomial: its integral mean on the unit circle.

    With ``check_monotone`` the means on the radius schedule are checked
    to be nondecreasing up to the boundary value.
    """
    rep = mp_mean(f, 1.0, p, K)
    if check_monotone:
        prof = np.append(mp_profile(f, p, K=K), rep.value)
        slack = 1e-12 * max(1.0, rep.value)
        if np.any(np.diff(prof) < -slack):
            raise InequalityViolation(f"M_p(r, f) is not nondecreasing in r: {prof}")
    return rep


def sup_norm(f: TaylorSeries, K: int | None = None) -> NormReport:
    return hardy_norm(f, INF, K)


# ---------------------------------------------------------------------------
# operator-norm bounds
# ---------------------------------------------------------------------------

class OperatorBound(tuple):
    """(value, coarse, formula_id) for the norm of C_t on H^p or A(D)."""

    __slots__ = ()

    def __new__(cls, value, coarse, formula_id):
        return tuple.__new__(cls, (value, coarse, formula_id))

    value = property(lambda self: self[0])
    coarse = property(lambda self: self[1])
    formula_id = property(lambda self: self[2])


def _log_bound(t):
    return 1.0 if t == 0.0 else -math.log1p(-t) / t


def upper_bound_ct(t: float, p) -> OperatorBound:
    """Closed-form upper bound for ||C_t|| on H^p (exact on A(D) for p = inf).

    ``coarse`` is 1/(1 - t), the bound from ||C_0|| ||M_t||.
    """
    _check_t(t)
    p = parse_p(p)
    coarse = 1.0 / (1.0 - t)
    if t == 0.0:
        return OperatorBound(1.0, coarse, "c0")
    if p == INF:
        return OperatorBound(_log_bound(t), coarse, "disc_algebra_exact")
    if p == 1.0:
        return OperatorBound(_log_bound(t), coarse, "p1_log")
    # integral of (1 - t s)**-p over [0, 1], written with expm1/log1p
    integral = math.expm1((1.0 - p) * math.log1p(-t)) / (t * (p - 1.0))
    return OperatorBound(integral ** (1.0 / p), coarse, "p_integral")


def opnorm_lower(t: float, p, testset, degree: int = DEFAULT_DEGREE,
                 include_defaults: bool = True) -> float:
    """max ||C_t f||_p / ||f||_p over a test set.

    Test functions are padded to ``degree`` before C_t is applied, so the
    output keeps its first ``degree + 1`` coefficients.  ``h_t`` (ratio 1)
    and the constant 1 join the set unless ``include_defaults`` is off.
    """
    _check_t(t)
    p = parse_p(p)
    testset = list(testset)
    if not testset:
        raise EmptyTestSet("opnorm_lower needs at least one test function")
    funcs = testset + ([geometric_kernel(t, degree), one(degree)] if include_defaults else [])
    best = -INF
    for f in funcs:
        f = f.padded(max(degree, f.degree))
        den = hardy_norm(f, p).value
        if den == 0.0:
            raise ValueError("test functions must be nonzero")
        best = max(best, hardy_norm(apply_ct(t, f), p).value / den)
    return best


def h2_opnorm(section, tol: float = 1e-10, maxiter: int = 20000) -> float:
    """Largest singular value by power iteration on A^H A.

    The start vector is all ones.  Iteration stops when the estimate changes
    by at most ``tol`` relative; :class:`NoConvergence` after ``maxiter``.
    On coefficient sections this is the H^2 operator norm (Parseval).
    """
    A = section.entries if isinstance(section, FiniteSection) else np.asarray(section)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    AH = A.conj().T
    v = np.ones(A.shape[1], dtype=A.dtype)
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(maxiter):
        w = A @ v
        new = float(np.linalg.norm(w))
        if new == 0.0:
            return 0.0
        u = AH @ (w / new)
        nu = np.linalg.norm(u)
        if nu == 0.0:
            return new
        v = u / nu
        if abs(new - sigma) <= tol * new:
            return new
        sigma = new
    raise NoConvergence(f"power iteration did not reach tol={tol} in {maxiter} steps")


def jensen_check(samples, p) -> tuple[float, float]:
    """(|mean h|**p, mean |h|**p) for samples of h on a uniform grid."""
    p = parse_p(p)
    if p == INF:
        raise DomainError("Jensen check needs a finite exponent")
    h = np.asarray(samples, dtype=np.complex128)
    lhs = float(abs(h.mean()) ** p)
    rhs = float(np.mean(np.abs(h) ** p))
    if lhs > rhs + 1e-12 * max(1.0, rhs):
        raise InequalityViolation(f"|mean h|^p = {lhs} exceeds mean |h|^p = {rhs}")
    return lhs, rhs


def gamma(t, alpha):
    """[1 - (1-t)**alpha](1-t) - alpha t; negative on (0, 1) for alpha > 0."""
    t = np.asarray(t, dtype=np.float64)
    return -np.expm1(alpha * np.log1p(-t)) * (1.0 - t) - alpha * t


@dataclass(frozen=True)
class BoundRow:
    t: float
    p: float
    lower: float
    upper: float
    coarse: float
    gamma: float | None
    formula_id: str
    passed: bool


@dataclass(frozen=True)
class BoundTable:
    rows: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.rows)


def bound_comparison(t_grid, p_grid) -> BoundTable:
    """Refined bounds against 1/(1 - t) on a (t, p) grid.

    A row passes when the refined bound is strictly below 1/(1 - t) and,
    for p > 1, gamma(t) < 0 with alpha = p - 1.  At p = 1 gamma vanishes
    identically; the row reports ``gamma=None`` and relies on the log bound.
    """
    rows = []
    for t in t_grid:
        t = float(t)
        if not (0.0 < t < 1.0):
            raise DomainError(f"comparison grid needs t in (0, 1), got {t}")
        for p in p_grid:
            p = parse_p(p)
            if p == INF:
                raise DomainError("comparison grid needs finite p")
            b = upper_bound_ct(t, p)
            ok = b.value < b.coarse and 1.0 <= b.value
            g = None
            if p > 1.0:
                g = float(gamma(t, p - 1.0))
                ok = ok and g < 0.0
            rows.append(BoundRow(t, p, 1.0, b.value, b.coarse, g, b.formula_id, bool(ok)))
    return BoundTable(rows)
