"""Gauss-Legendre and Gauss-Jacobi rules.

Integrals against the degenerate weight y^alpha (alpha = 1-2s) appear in
every matrix of the extended problem.  On the element touching y=0 the
weight is built into a Gauss-Jacobi rule so the entries are exact for
polynomials; on all other elements the weight is smooth and gets absorbed
into the integrand under a plain Gauss-Legendre rule.
"""

import dataclasses

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

__all__ = ["QuadratureRule", "gauss_legendre", "gauss_jacobi", "integrate_on_element"]


@dataclasses.dataclass(frozen=True)
class QuadratureRule:
    """Points/weights on a reference interval, optionally with weight y^alpha.

    weight_exponent 0 means a plain rule on (-1,1); a weighted rule lives on
    the reference interval (0,1) and its weights already contain y^alpha.
    """

    points: np.ndarray
    weights: np.ndarray
    weight_exponent: float = 0.0
    reference: tuple = (-1.0, 1.0)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        wts = np.asarray(self.weights, dtype=float)
        lo, hi = self.reference
        if pts.shape != wts.shape or pts.ndim != 1:
            raise ValueError("points and weights must be matching 1D arrays")
        if np.any(wts <= 0):
            raise ValueError("quadrature weights must be positive")
        if np.any(pts <= lo) or np.any(pts >= hi):
            raise ValueError("quadrature points must lie inside the reference interval")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    def __len__(self):
        return len(self.points)


def gauss_legendre(n):
    """n-point Gauss-Legendre rule on (-1,1), exact through degree 2n-1."""
    if n < 1:
        raise ValueError("need at least one quadrature point")
    pts, wts = leggauss(n)
    return QuadratureRule(pts, wts, weight_exponent=0.0, reference=(-1.0, 1.0))


def gauss_jacobi(alpha, n):
    """n-point rule for ∫₀¹ y^alpha p(y) dy, exact through degree 2n-1.

    Built from the Jacobi weight (1+x)^alpha on (-1,1) via scipy's
    three-term-recurrence nodes, then mapped to (0,1).
    """
    if alpha <= -1:
        raise ValueError(f"weight exponent must exceed -1, got {alpha}")
    if n < 1:
        raise ValueError("need at least one quadrature point")
    t, v = roots_jacobi(n, 0.0, float(alpha))
    pts = 0.5 * (1.0 + t)
    wts = v * 2.0 ** (-(1.0 + alpha))
    return QuadratureRule(pts, wts, weight_exponent=float(alpha), reference=(0.0, 1.0))


def map_to_element(rule, element):
    """Mapped points and combined weights so that sum(w*f(x)) = ∫_el y^α f dy.

    For a weighted rule the element must either touch y=0 (Jacobi scaling,
    exact) or the weight is treated as a smooth factor under an equal-length
    Legendre rule.
    """
    a, b = element
    h = b - a
    if h <= 0:
        raise ValueError("empty element")
    alpha = rule.weight_exponent
    if alpha == 0.0:
        lo, hi = rule.reference
        x = a + (rule.points - lo) * (h / (hi - lo))
        w = rule.weights * (h / (hi - lo))
        return x, w
    if abs(a) <= 1e-13 * h:
        # element touching the singular point: ∫₀ʰ y^α f = h^{1+α} Σ wᵢ f(hξᵢ)
        x = h * rule.points
        w = h ** (1.0 + alpha) * rule.weights
        return x, w
    gl = gauss_legendre(len(rule))
    x = a + 0.5 * (gl.points + 1.0) * h
    w = 0.5 * h * gl.weights * x**alpha
    return x, w


def integrate_on_element(rule, element, f):
    """Apply the rule to f on a physical element, weight and Jacobian included."""
    x, w = map_to_element(rule, element)
    return float(np.dot(w, np.asarray(f(x), dtype=float)))
