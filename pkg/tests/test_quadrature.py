import numpy as np
import pytest
from numpy.testing import assert_allclose

from hpfrac import quadrature


def test_gauss_legendre_midpoint():
    r = quadrature.gauss_legendre(1)
    assert_allclose(r.points, [0.0])
    assert_allclose(r.weights, [2.0])


def test_gauss_legendre_two_point():
    r = quadrature.gauss_legendre(2)
    assert_allclose(sorted(r.points), [-1.0 / np.sqrt(3.0), 1.0 / np.sqrt(3.0)])
    assert_allclose(r.weights, [1.0, 1.0])


def test_gauss_legendre_quartic():
    r = quadrature.gauss_legendre(3)
    got = np.dot(r.weights, r.points**4)
    assert_allclose(got, 2.0 / 5.0, rtol=1e-14)


def test_gauss_legendre_rejects_zero_points():
    with pytest.raises(ValueError):
        quadrature.gauss_legendre(0)


def test_gauss_jacobi_alpha0_is_legendre():
    r = quadrature.gauss_jacobi(0.0, 2)
    assert_allclose(np.dot(r.weights, r.points**3), 0.25, rtol=1e-14)


def test_gauss_jacobi_single_point_moment():
    r = quadrature.gauss_jacobi(0.5, 1)
    assert_allclose(np.dot(r.weights, np.ones(1)), 2.0 / 3.0, rtol=1e-14)


def test_gauss_jacobi_inverse_sqrt_moment():
    # int_0^1 y^{-1/2} y^6 dy = 2/13
    r = quadrature.gauss_jacobi(-0.5, 4)
    assert_allclose(np.dot(r.weights, r.points**6), 2.0 / 13.0, rtol=1e-14)


def test_gauss_jacobi_rejects_nonintegrable():
    with pytest.raises(ValueError):
        quadrature.gauss_jacobi(-1.0, 3)


@pytest.mark.parametrize("alpha", [-0.9, -0.5, 0.0, 0.5, 0.9])
@pytest.mark.parametrize("n", range(1, 11))
def test_gauss_jacobi_exactness(alpha, n):
    """Moments up to degree 2n-1 against 1/(k+1+alpha), <= 1e-12 relative."""
    r = quadrature.gauss_jacobi(alpha, n)
    for k in range(2 * n):
        got = np.dot(r.weights, r.points**k)
        assert_allclose(got, 1.0 / (k + 1.0 + alpha), rtol=1e-12)


@pytest.mark.parametrize("alpha,n", [(-0.9, 3), (0.0, 5), (0.7, 8)])
def test_rules_positive_and_interior(alpha, n):
    r = quadrature.gauss_jacobi(alpha, n)
    assert np.all(r.weights > 0)
    assert np.all((r.points > 0) & (r.points < 1))
    g = quadrature.gauss_legendre(n)
    assert np.all(g.weights > 0)
    assert np.all((g.points > -1) & (g.points < 1))


def test_integrate_touching_element_alpha1():
    r = quadrature.gauss_jacobi(1.0, 3)
    got = quadrature.integrate_on_element(r, (0.0, 2.0), lambda y: np.ones_like(y))
    assert_allclose(got, 2.0, rtol=1e-14)


def test_integrate_plain_element():
    r = quadrature.gauss_legendre(3)
    got = quadrature.integrate_on_element(r, (1.0, 3.0), lambda y: y)
    assert_allclose(got, 4.0, rtol=1e-14)


def test_integrate_touching_element_singular_weight():
    r = quadrature.gauss_jacobi(-0.5, 3)
    got = quadrature.integrate_on_element(r, (0.0, 1.0), lambda y: np.ones_like(y))
    assert_allclose(got, 2.0, rtol=1e-14)


@pytest.mark.parametrize("alpha", [-0.5, 0.5])
def test_smooth_weight_path_matches_jacobi(alpha):
    """Away from y=0 the absorbed-weight Legendre path and a shifted exact
    integral agree; compare against a high-order reference."""
    el = (0.5, 0.75)
    f = lambda y: np.cos(y)
    r = quadrature.gauss_jacobi(alpha, 12)
    got = quadrature.integrate_on_element(r, el, f)
    # dense Legendre reference for int y^alpha cos(y)
    t, w = np.polynomial.legendre.leggauss(60)
    y = 0.5 * (el[0] + el[1]) + 0.5 * (el[1] - el[0]) * t
    ref = 0.5 * (el[1] - el[0]) * np.dot(w, y**alpha * f(y))
    assert_allclose(got, ref, rtol=1e-12)
