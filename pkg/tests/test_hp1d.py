import numpy as np
import pytest
from numpy.testing import assert_allclose

from hpfrac import hp1d, mesh


def uniform_mesh(n, a=0.0, b=1.0):
    nodes = np.linspace(a, b, n + 1)
    return mesh.Mesh1D(nodes=nodes, sigma=0.5, layers=0, refined_toward="none")


def space_on(n_el, degrees, bc):
    m = uniform_mesh(n_el)
    return hp1d.build_space(m, mesh.DegreeVector(tuple(degrees)), bc=bc)


DD = (hp1d.DIRICHLET, hp1d.DIRICHLET)
FF = (hp1d.FREE, hp1d.FREE)


def test_dim_two_linear_elements_dirichlet():
    assert space_on(2, (1, 1), DD).dim == 1


@pytest.mark.parametrize("p", [2, 3, 5, 8])
def test_dim_single_element_dirichlet(p):
    assert space_on(1, (p,), DD).dim == p - 1


def test_dim_free_ends_count():
    assert space_on(3, (2, 3, 2), FF).dim == 8


def test_build_space_rejects_length_mismatch():
    m = uniform_mesh(2)
    with pytest.raises(ValueError):
        hp1d.build_space(m, mesh.DegreeVector((1,)), bc=FF)


def test_assemble_single_linear_element():
    """Hand-integrated hat matrices on one element of length 1."""
    s = space_on(1, (1,), FF)
    forms = hp1d.assemble(s, 1.0, 0.0)
    assert_allclose(forms.stiffness.toarray(), [[1.0, -1.0], [-1.0, 1.0]], atol=1e-14)
    assert_allclose(forms.mass.toarray(),
                    [[1.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 1.0 / 3.0]], atol=1e-14)


def test_mass_c_equals_mass_for_unit_c():
    s = space_on(3, (2, 3, 2), FF)
    forms = hp1d.assemble(s, 1.0, 1.0)
    assert_allclose(forms.mass_c.toarray(), forms.mass.toarray(), atol=1e-14)


def test_assemble_rejects_negative_coefficient():
    s = space_on(2, (2, 2), FF)
    with pytest.raises(ValueError):
        hp1d.assemble(s, lambda x: np.cos(8.0 * x), 0.0)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_energy_against_dense_quadrature(seed):
    """u^T S u must equal the integral of A|u'|^2 done with a dense rule.

    A is polynomial so the assembly rule is exact and the comparison is
    about correctness, not quadrature saturation.
    """
    rng = np.random.default_rng(seed)
    s = space_on(3, (2, 2, 2), FF)
    A = lambda x: 1.0 + 0.5 * x
    forms = hp1d.assemble(s, A, 0.0)
    u = rng.standard_normal(s.dim)
    quad = float(u @ forms.stiffness @ u)
    t, w = np.polynomial.legendre.leggauss(40)
    ref = 0.0
    for e in range(s.n_elements):
        a, b = s.mesh.nodes[e], s.mesh.nodes[e + 1]
        x = 0.5 * (a + b) + 0.5 * (b - a) * t
        du = hp1d.eval_deriv(s, u, x)
        ref += 0.5 * (b - a) * np.dot(w, A(x) * du**2)
    assert_allclose(quad, ref, rtol=1e-10)


def y_space(n_el=1, p=1):
    nodes = np.linspace(0.0, 1.0, n_el + 1)
    m = mesh.Mesh1D(nodes=nodes, sigma=0.5, layers=0, refined_toward="left")
    return hp1d.build_space(m, mesh.DegreeVector((p,) * n_el),
                            bc=(hp1d.FREE, hp1d.DIRICHLET))


def test_weighted_y_single_element_alpha0():
    sy = y_space()
    forms = hp1d.assemble_weighted_y(sy, 0.0)
    assert_allclose(forms.dhat.toarray(), [[1.0]], atol=1e-14)
    assert_allclose(forms.bhat.toarray(), [[1.0 / 3.0]], atol=1e-14)
    assert_allclose(forms.trace0, [1.0], atol=1e-15)


def test_weighted_y_alpha0_matches_plain_assembly():
    sy = y_space(n_el=3, p=4)
    wf = hp1d.assemble_weighted_y(sy, 0.0)
    pf = hp1d.assemble(sy, 1.0, 0.0)
    assert_allclose(wf.dhat.toarray(), pf.stiffness.toarray(), atol=1e-13)
    assert_allclose(wf.bhat.toarray(), pf.mass.toarray(), atol=1e-13)


def test_weighted_y_beta_moment():
    # int_0^1 y^{1/2} (1-y)^2 dy = 16/105
    sy = y_space()
    forms = hp1d.assemble_weighted_y(sy, 0.5)
    assert_allclose(forms.bhat.toarray(), [[16.0 / 105.0]], rtol=1e-13)


def test_weighted_y_rejects_alpha_out_of_range():
    sy = y_space()
    with pytest.raises(ValueError):
        hp1d.assemble_weighted_y(sy, 1.5)


def test_load_vector_zero():
    s = space_on(3, (2, 2, 2), DD)
    assert_allclose(hp1d.load_vector(s, lambda x: np.zeros_like(x)), 0.0, atol=1e-15)


def test_load_vector_constant_hats():
    s = space_on(4, (1, 1, 1, 1), DD)
    load = hp1d.load_vector(s, lambda x: np.ones_like(x))
    assert_allclose(load, 0.25 * np.ones(3), rtol=1e-14)


def test_load_vector_against_fine_quadrature():
    s = space_on(2, (4, 4), DD)
    f = lambda x: np.sin(2.0 * np.pi * x)
    load = hp1d.load_vector(s, f)
    ref = hp1d.load_vector(s, f, extra_order=30)
    assert_allclose(load, ref, atol=1e-10)


def test_l2_project_reproduces_space_function():
    s = space_on(2, (3, 3), FF)
    rng = np.random.default_rng(5)
    u = rng.standard_normal(s.dim)
    v = hp1d.l2_project(s, lambda x: hp1d.eval_fn(s, u, x))
    assert_allclose(v, u, atol=1e-12)


def test_l2_project_constant():
    s = space_on(3, (2, 2, 2), FF)
    u = hp1d.l2_project(s, lambda x: np.ones_like(x))
    x = np.linspace(0.0, 1.0, 17)
    assert_allclose(hp1d.eval_fn(s, u, x), 1.0, atol=1e-12)


def test_l2_project_sine_high_order():
    """Projection error of sin(2 pi x) tracks the best-approximation bound.

    The unconstrained degree-8 best L2 error is 1.566e-4 (computed with a
    dense Legendre expansion), so that is the scale the projection must hit;
    1e-6 territory only opens up around degree 11.
    """
    s8 = space_on(1, (8,), DD)
    u8 = hp1d.l2_project(s8, lambda x: np.sin(2.0 * np.pi * x))
    l2_8, _ = hp1d.error_norms(s8, u8, lambda x: np.sin(2.0 * np.pi * x))
    assert 1.566e-4 <= l2_8 <= 2.5e-4

    s12 = space_on(1, (12,), DD)
    u12 = hp1d.l2_project(s12, lambda x: np.sin(2.0 * np.pi * x))
    l2_12, _ = hp1d.error_norms(s12, u12, lambda x: np.sin(2.0 * np.pi * x))
    assert l2_12 <= 1e-6


def test_error_norms_zero_coefficients():
    s = space_on(1, (3,), DD)
    exact = lambda x: np.sin(np.pi * x)
    dexact = lambda x: np.pi * np.cos(np.pi * x)
    l2, h1 = hp1d.error_norms(s, np.zeros(s.dim), exact, dexact)
    assert_allclose(l2, np.sqrt(0.5), rtol=1e-12)
    assert_allclose(h1, np.pi * np.sqrt(0.5), rtol=1e-12)


def test_error_norms_linear_exact():
    s = space_on(1, (1,), FF)
    coeffs = np.array([0.0, 1.0])
    l2, h1 = hp1d.error_norms(s, coeffs, lambda x: x, lambda x: np.ones_like(x))
    assert l2 <= 1e-13 and h1 <= 1e-13


def test_matrix_symmetry_exact():
    s = space_on(3, (3, 4, 2), FF)
    forms = hp1d.assemble(s, lambda x: 1.0 + x, lambda x: 0.5 + x**2)
    for mat in (forms.stiffness, forms.mass_c, forms.mass):
        d = mat.toarray()
        assert np.array_equal(d, d.T)


def test_coercivity_witness():
    s = space_on(3, (3, 3, 3), FF)
    forms = hp1d.assemble(s, 1.0, 1.0)
    K = (forms.stiffness + forms.mass_c + forms.mass).toarray()
    assert np.linalg.eigvalsh(K).min() > 0


def test_p_convergence_reaction_diffusion():
    """-u'' + u = f with u = sin(pi x): p-refinement on one element."""
    f = lambda x: (np.pi**2 + 1.0) * np.sin(np.pi * x)
    exact = lambda x: np.sin(np.pi * x)
    dexact = lambda x: np.pi * np.cos(np.pi * x)
    errs = []
    for p in range(2, 11):
        s = space_on(1, (p,), DD)
        forms = hp1d.assemble(s, 1.0, 1.0)
        K = (forms.stiffness + forms.mass_c).toarray()
        u = np.linalg.solve(K, hp1d.load_vector(s, f))
        l2, h1 = hp1d.error_norms(s, u, exact, dexact)
        errs.append(np.sqrt(l2**2 + h1**2))
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] <= 1e-8
