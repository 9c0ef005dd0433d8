import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsl.errors import (BadInterval, DegenerateFit, NoBracket, NotHermitian,
                        NotPSD)
from qsl.numerics import (HermitianMatrix, RootBracket, bisect, bisect_array,
                          eigh, extrapolate_linear, fit_line, matrix_sqrt_psd,
                          random_grid)

# Root of sin y = 2y/(1+y^2) from a 10^6-point sign-change scan on [pi/2+0.1, pi].
SCAN_ROOT_Y = 2.3311221
SCAN_ROOT_A = 0.72461141


def test_bisect_linear():
    f = lambda x: x - 0.5
    assert bisect(f, RootBracket.around(f, 0.0, 1.0)) == pytest.approx(0.5, abs=1e-12)


def test_bisect_cos():
    assert bisect(math.cos, RootBracket.around(math.cos, 1.0, 2.0)) == pytest.approx(math.pi / 2, abs=1e-12)


def test_bisect_tangency_equation_matches_scan():
    f = lambda y: math.sin(y) - 2 * y / (1 + y * y)
    y = bisect(f, RootBracket.around(f, math.pi / 2 + 0.1, math.pi))
    assert y == pytest.approx(SCAN_ROOT_Y, abs=2e-6)
    assert 2 * y / (1 + y * y) == pytest.approx(SCAN_ROOT_A, abs=1e-6)


def test_bisect_is_bit_reproducible():
    f = lambda x: x ** 3 - 2
    b = RootBracket.around(f, 0.0, 2.0)
    assert bisect(f, b) == bisect(f, b)


def test_bracket_errors():
    with pytest.raises(NoBracket):
        RootBracket.around(lambda x: x * x + 1, -1.0, 1.0)
    with pytest.raises(BadInterval):
        RootBracket(1.0, 0.0, -1.0, 1.0)


def test_bisect_array_many_roots():
    c = np.linspace(0.1, 0.9, 9)
    r = bisect_array(lambda x: x - c, 0.0, 1.0)
    np.testing.assert_allclose(r, c, atol=1e-12)


def test_random_grid_determinism_and_counts():
    g1 = random_grid(0.0, 1.0, 0.1, seed=7)
    g2 = random_grid(0.0, 1.0, 0.1, seed=7)
    assert 7 <= len(g1) <= 13
    assert np.array_equal(g1.points, g2.points)
    assert np.all(np.diff(g1.points) >= 0)


def test_random_grid_mean_gap():
    g = random_grid(0.0, 2 * math.pi, 0.01, seed=1)
    assert abs(len(g) - 628) <= 1
    gap = np.mean(np.diff(g.points))
    assert 0.008 <= gap <= 0.012


def test_random_grid_containment():
    g = random_grid(0.0, 1.0, 0.5, seed=3)
    assert len(g) >= 1
    assert np.all((g.points >= 0) & (g.points < 1))


def test_extrapolate_exact_line():
    r = extrapolate_linear([(s, 1 - 2 * s) for s in (0.1, 0.05, 0.025)])
    assert r.value_at_zero == pytest.approx(1.0, abs=1e-12)
    assert r.error_bar < 1e-12 and r.chi_squared < 1e-24


def test_extrapolate_matches_normal_equations():
    r = extrapolate_linear([(0.1, 0.95), (0.05, 0.97), (0.025, 0.99)])
    # 2x2 normal-equation solve
    assert r.value_at_zero == pytest.approx(1.0, abs=1e-12)
    assert r.slope == pytest.approx(-0.51428571428571, abs=1e-12)


def test_extrapolate_constant():
    r = extrapolate_linear([(0.3, 2.5), (0.2, 2.5), (0.1, 2.5)])
    assert r.value_at_zero == pytest.approx(2.5)
    assert r.slope == pytest.approx(0.0, abs=1e-14)


def test_extrapolate_needs_distinct_spacings():
    with pytest.raises(DegenerateFit):
        extrapolate_linear([(0.1, 1.0), (0.1, 2.0), (0.05, 1.0)])


def test_fit_line_columns():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    y = np.stack([3 + 2 * x, -1 + 0.5 * x], axis=1)
    c0, c1, err, chi2 = fit_line(x, y)
    np.testing.assert_allclose(c0, [3, -1], atol=1e-12)
    np.testing.assert_allclose(c1, [2, 0.5], atol=1e-12)


@given(st.floats(-5, 5), st.floats(-5, 5),
       st.lists(st.floats(1e-3, 1.0), min_size=3, max_size=8, unique=True))
def test_extrapolate_recovers_noiseless_intercept(c0, c1, spacings):
    if np.ptp(spacings) < 1e-3:
        return
    r = extrapolate_linear([(s, c0 + c1 * s) for s in spacings])
    assert r.value_at_zero == pytest.approx(c0, abs=1e-11)


def test_eigh_simple_cases():
    w, _ = eigh(np.eye(3))
    np.testing.assert_allclose(w, [1, 1, 1])
    w, v = eigh(np.diag([0.0, 2.0]))
    np.testing.assert_allclose(w, [0, 2])
    np.testing.assert_allclose(np.abs(v), np.eye(2), atol=1e-15)
    w, _ = eigh(np.array([[0.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(w, [-1, 1], atol=1e-14)


def test_eigh_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        HermitianMatrix(np.array([[0, 1], [0, 0]]))


def _random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (a + a.conj().T)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 12))
def test_eigh_matches_numpy_and_reconstructs(seed, n):
    rng = np.random.default_rng(seed)
    h = _random_hermitian(rng, n)
    w, v = eigh(h)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(h), atol=1e-10)
    np.testing.assert_allclose((v * w) @ v.conj().T, h, atol=1e-10)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(n), atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 8))
def test_eigh_unitary_invariance(seed, n):
    rng = np.random.default_rng(seed)
    h = _random_hermitian(rng, n)
    u, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    w1, _ = eigh(h)
    w2, _ = eigh(u @ h @ u.conj().T)
    np.testing.assert_allclose(w1, w2, atol=1e-9)


def test_sqrt_simple_cases():
    np.testing.assert_allclose(matrix_sqrt_psd(np.diag([4.0, 9.0])).entries, np.diag([2, 3]), atol=1e-14)
    np.testing.assert_allclose(matrix_sqrt_psd(np.eye(3)).entries, np.eye(3), atol=1e-14)
    psi = np.array([1, 1j, -1]) / math.sqrt(3)
    proj = np.outer(psi, psi.conj())
    np.testing.assert_allclose(matrix_sqrt_psd(proj).entries, proj, atol=1e-12)


def test_sqrt_rejects_negative():
    with pytest.raises(NotPSD):
        matrix_sqrt_psd(np.diag([1.0, -0.1]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 10), st.integers(1, 10))
def test_sqrt_squares_back(seed, n, rank):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, min(rank, n))) + 1j * rng.normal(size=(n, min(rank, n)))
    m = a @ a.conj().T
    r = matrix_sqrt_psd(m).entries
    assert np.linalg.norm(r @ r - m) <= 1e-9 * max(1.0, np.linalg.norm(m))
