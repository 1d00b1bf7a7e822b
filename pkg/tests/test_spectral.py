import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cesaro_lab.analysis import hardy_norm
from cesaro_lab.core import DomainError, TaylorSeries, geometric_kernel, monomial, one
from cesaro_lab.operators import Kind, OperatorKernel, apply_ct, apply_st, finite_section
from cesaro_lab.spectral import (
    MAX_POWER_DEGREE,
    cesaro_means,
    compact_tail,
    diagonal_spectrum,
    eigen_residual,
    eigenvector,
    eigenvector_closed_form,
    ergodic_certificate,
    ergodic_limit_error,
    orbit_containment_st,
    power_norms,
)

from conftest import random_series


def test_eigenvector_example():
    x = eigenvector(0.5, 1, 10).coeffs
    assert x[0] == 0 and x[1] == 1
    assert x[2] == 1.0 and x[3] == 0.75


def test_eigenvector_at_zero_is_monomial():
    np.testing.assert_array_equal(eigenvector(0.0, 3, 8).coeffs, monomial(3, 8).coeffs)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 0.95), st.integers(0, 12))
def test_recursion_matches_closed_form(t, m):
    a = eigenvector(t, m, 200).coeffs
    b = eigenvector_closed_form(t, m, 200).coeffs
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-300)


def test_eigenvector_domain():
    with pytest.raises(DomainError):
        eigenvector(0.5, -1, 10)
    with pytest.raises(DomainError):
        eigenvector(0.5, 11, 10)
    with pytest.raises(DomainError):
        eigenvector(1.0, 1, 10)


def test_m_zero_gives_geometric_kernel():
    np.testing.assert_allclose(eigenvector(0.7, 0, 100).coeffs, geometric_kernel(0.7, 100).coeffs, rtol=1e-13)


@pytest.mark.parametrize("t", [0.0, 0.5, 0.9])
@pytest.mark.parametrize("m", [0, 1, 5])
@pytest.mark.parametrize("p", [2, "inf"])
def test_eigen_residual_small(t, m, p):
    assert eigen_residual(t, m, p, N=1024) <= 1e-10


def test_residual_without_buffer():
    # lower triangularity: truncating before applying C_t loses nothing
    assert eigen_residual(0.9, 5, 2, N=256, buffer=0) <= 1e-14
    assert eigen_residual(0.9, 5, 2, N=256, buffer=64) <= 1e-10


def test_diagonal_spectrum():
    d = diagonal_spectrum(4)
    np.testing.assert_allclose(d, [1, 1 / 2, 1 / 3, 1 / 4, 1 / 5])
    for t in (0.0, 0.5):
        np.testing.assert_allclose(np.diag(finite_section(OperatorKernel(Kind.CESARO_T, t), 50).entries),
                                   diagonal_spectrum(50))
    with pytest.raises(ValueError):
        diagonal_spectrum(-1)


def test_eigenvalues_accumulate_only_at_zero():
    d = diagonal_spectrum(10000)
    assert d[-1] < 1e-4 and np.all(np.diff(d) < 0)


def test_cesaro_means_of_c0_closed_form():
    # C_0 z^m = z^m/(m+1), so the mean of the first n powers is known exactly
    N, n = 6, 9
    mean = cesaro_means(OperatorKernel(Kind.HARDY_C0), one(N) * 1.0 + 0 * monomial(N), n)
    lam = 1 / np.arange(1, N + 2)
    expected = np.array([sum(l ** k for k in range(1, n + 1)) / n for l in lam])
    expected[1:] = 0
    np.testing.assert_allclose(mean.coeffs, expected, rtol=1e-14)


def test_cesaro_means_accepts_callable(rng):
    f = random_series(rng, 20)
    a = cesaro_means(OperatorKernel(Kind.CESARO_T, 0.3), f, 5)
    b = cesaro_means(lambda g: apply_ct(0.3, g), f, 5)
    np.testing.assert_array_equal(a.coeffs, b.coeffs)
    with pytest.raises(ValueError):
        cesaro_means(lambda g: g, f, 0)


def test_power_over_n_tends_to_zero(rng):
    t = 0.5
    f = random_series(rng, 256)
    x = f
    vals = []
    for n in range(1, 65):
        x = apply_ct(t, x)
        if n in (4, 16, 64):
            vals.append(hardy_norm(x, 2).value / n)
    assert vals[0] > vals[1] > vals[2]


def test_ergodic_limit_error_decreases():
    errs = [ergodic_limit_error(0.5, one(), n, 2, degree=1024) for n in (16, 32, 64, 128, 256)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] == pytest.approx(0.002670053037930204, rel=1e-9)


def test_ergodic_limit_is_fixed_on_kernel():
    assert ergodic_limit_error(0.5, geometric_kernel(0.5, 1024), 8, 2) < 1e-13


def test_power_norms_of_c0_are_one():
    for n, v in power_norms(OperatorKernel(Kind.HARDY_C0), 8, N=64):
        assert v == pytest.approx(1.0, abs=1e-9)


def test_power_norms_of_st_decay():
    rows = power_norms(OperatorKernel(Kind.ST, 0.5), 64, N=512)
    assert [n for n, _ in rows] == [1, 2, 4, 8, 16, 32, 64]
    roots = [v ** (1 / n) for n, v in rows]
    assert roots[-1] < roots[3] < 1


def test_power_norms_accept_section_and_cap():
    sec = finite_section(OperatorKernel(Kind.CESARO_T, 0.5), 64)
    assert power_norms(sec, 1)[0][1] == pytest.approx(np.linalg.norm(sec.entries, 2), rel=1e-8)
    with pytest.raises(DomainError):
        power_norms(OperatorKernel(Kind.CESARO_T, 0.5), 1, N=MAX_POWER_DEGREE + 1)
    with pytest.raises(ValueError):
        power_norms(sec, 0)


@pytest.mark.parametrize("N_small", [4, 20, 100])
def test_compact_tail_at_zero(N_small):
    # the top two singular values 1/(N_small+2), 1/(N_small+3) nearly tie, so
    # power iteration stops a little short of the limit
    assert compact_tail(0.0, N_small, 300) == pytest.approx(1 / (N_small + 2), rel=1e-7)


def test_compact_tail_decreases():
    tails = [compact_tail(0.5, n, 512) for n in (16, 32, 64, 128)]
    assert all(b < a for a, b in zip(tails, tails[1:]))
    assert compact_tail(0.5, 40, 40) == 0.0
    with pytest.raises(ValueError):
        compact_tail(0.5, 50, 40)


@pytest.mark.parametrize("t", [0.0, 0.5, 0.9])
def test_certificate(t):
    cert = ergodic_certificate(t, N=128, samples=20)
    assert cert.ok and cert.delta == 0.5


def test_orbit_of_st_stays_in_hyperplane(rng):
    assert orbit_containment_st(0.5, random_series(rng, 30), 20)
    with pytest.raises(ValueError):
        orbit_containment_st(0.5, one(), 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 0.95))
def test_st_is_injective(seed, t):
    f = random_series(np.random.default_rng(seed), 30)
    y = apply_st(t, f)
    assert np.abs(y.coeffs).max() > 0
    # the lowest nonzero coefficient of f reappears one index up, scaled
    k = int(np.flatnonzero(f.coeffs)[0])
    assert y[k + 1] == pytest.approx(f[k] / (k + 1), rel=1e-12)


def test_ergodic_error_against_dense_iteration():
    # independent path: powers of the dense section, averaged explicitly
    t, N, n = 0.5, 1024, 64
    A = np.tril(t ** np.subtract.outer(np.arange(N + 1), np.arange(N + 1)).clip(0)) / np.arange(1, N + 2)[:, None]
    x = np.zeros(N + 1)
    x[0] = 1.0
    acc = np.zeros(N + 1)
    for _ in range(n):
        x = A @ x
        acc += x
    oracle = np.linalg.norm(acc / n - t ** np.arange(N + 1))
    assert ergodic_limit_error(t, one(), n, 2, degree=N) == pytest.approx(oracle, rel=1e-10)
