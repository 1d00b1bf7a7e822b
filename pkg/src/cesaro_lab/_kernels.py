"""
Hot inner loops, each with a numba and a pure-numpy implementation.

The numba path is used when numba imports and ``CESARO_LAB_NUMBA`` is not
set to ``0``/``false``/``off``.  Both implementations stay importable under
explicit names so tests and the benchmark can compare them directly.
"""
import os

import numpy as np

__all__ = [
    "BACKEND",
    "prefix_scan",
    "horner",
    "eigen_recursion",
    "prefix_scan_numpy",
    "horner_numpy",
    "eigen_recursion_numpy",
]


def _numba_requested():
    flag = os.environ.get("CESARO_LAB_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "off", "no")


# ---------------------------------------------------------------------------
# numpy fallbacks
# ---------------------------------------------------------------------------

def prefix_scan_numpy(t, x):
    """y[n] = t*y[n-1] + x[n], y[0] = x[0], by log-step doubling.

    Each pass adds t**s times the sequence shifted by s, so after the passes
    for s = 1, 2, 4, ... every y[n] holds sum_k t**(n-k) x[k].  Since
    0 <= t <= 1 the multipliers never exceed one.
    """
    y = np.array(x, dtype=np.complex128, copy=True)
    n = y.shape[0]
    s = 1
    ts = t
    while s < n:
        if ts == 0.0:
            break
        y[s:] = y[s:] + ts * y[:-s]
        s *= 2
        ts = ts * ts
    return y


def horner_numpy(coeffs, z):
    """Polynomial values at ``z``.

    Loops over coefficients when there are more points than coefficients;
    otherwise dots each point's power vector with the coefficients.
    """
    z = np.asarray(z, dtype=np.complex128)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    if coeffs.shape[0] <= max(z.size, 64):
        acc = np.zeros_like(z)
        for c in coeffs[::-1]:
            acc = acc * z + c
        return acc
    flat = z.ravel()
    out = np.empty_like(flat)
    n = np.arange(coeffs.shape[0])
    for i in range(flat.shape[0]):
        out[i] = np.dot(np.power(flat[i], n), coeffs)
    return out.reshape(z.shape)


def eigen_recursion_numpy(t, m, N):
    x = np.zeros(N + 1, dtype=np.float64)
    x[m] = 1.0
    if N > m and t != 0.0:
        n = np.arange(m + 1, N + 1, dtype=np.float64)
        x[m + 1:] = np.cumprod(t * n / (n - m))
    return x


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None


if njit is not None:

    @njit(cache=True)
    def prefix_scan_numba(t, x):
        y = np.empty(x.shape[0], dtype=np.complex128)
        acc = 0.0 + 0.0j
        for n in range(x.shape[0]):
            acc = t * acc + x[n]
            y[n] = acc
        return y

    @njit(cache=True)
    def _horner_numba(coeffs, z):
        out = np.empty(z.shape[0], dtype=np.complex128)
        deg = coeffs.shape[0] - 1
        for j in range(z.shape[0]):
            zj = z[j]
            acc = 0.0 + 0.0j
            for k in range(deg, -1, -1):
                acc = acc * zj + coeffs[k]
            out[j] = acc
        return out

    def horner_numba(coeffs, z):
        z = np.asarray(z, dtype=np.complex128)
        flat = np.ascontiguousarray(z.ravel())
        c = np.ascontiguousarray(coeffs, dtype=np.complex128)
        return _horner_numba(c, flat).reshape(z.shape)

    @njit(cache=True)
    def eigen_recursion_numba(t, m, N):
        x = np.zeros(N + 1, dtype=np.float64)
        x[m] = 1.0
        for n in range(m + 1, N + 1):
            # (n - m) x_n = t n x_{n-1}
            x[n] = t * n * x[n - 1] / (n - m)
        return x

    HAVE_NUMBA = True
else:  # pragma: no cover
    prefix_scan_numba = horner_numba = eigen_recursion_numba = None
    HAVE_NUMBA = False


if HAVE_NUMBA and _numba_requested():
    BACKEND = "numba"

    def prefix_scan(t, x):
        return prefix_scan_numba(float(t), np.ascontiguousarray(x, dtype=np.complex128))

    horner = horner_numba

    def eigen_recursion(t, m, N):
        return eigen_recursion_numba(float(t), int(m), int(N))
else:
    BACKEND = "numpy"

    def prefix_scan(t, x):
        return prefix_scan_numpy(float(t), x)

    horner = horner_numpy
    eigen_recursion = eigen_recursion_numpy
