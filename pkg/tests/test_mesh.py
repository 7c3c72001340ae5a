import numpy as np
import pytest
from numpy.testing import assert_allclose

from hpfrac import mesh


def test_geometric_left_nodes():
    m = mesh.geometric_mesh_1d(0.0, 1.0, L=2, sigma=0.5, side="left")
    assert_allclose(m.nodes, [0.0, 0.25, 0.5, 1.0])


def test_geometric_left_L0():
    m = mesh.geometric_mesh_1d(0.0, 1.0, L=0, sigma=0.5, side="left")
    assert_allclose(m.nodes, [0.0, 0.5, 1.0])


def test_geometric_both_sides():
    m = mesh.geometric_mesh_1d(-1.0, 1.0, L=2, sigma=0.5, side="both")
    assert_allclose(m.nodes, [-1.0, -0.75, -0.5, 0.5, 0.75, 1.0])


@pytest.mark.parametrize("sigma", [0.0, 1.0, -0.3, 1.7])
def test_geometric_rejects_bad_sigma(sigma):
    with pytest.raises(ValueError):
        mesh.geometric_mesh_1d(0.0, 1.0, L=2, sigma=sigma)


def test_geometric_rejects_negative_layers():
    with pytest.raises(ValueError):
        mesh.geometric_mesh_1d(0.0, 1.0, L=-1, sigma=0.5)


@pytest.mark.parametrize("L,sigma", [(1, 0.5), (3, 0.5), (5, 0.25), (8, 0.17157287525381)])
def test_geometric_ratio_and_smallest_element(L, sigma):
    """Smallest element is sigma^L wide; size ratios inside the graded zone are
    constant (1/sigma), with the first pair at (1-sigma)/sigma by the node formula."""
    m = mesh.geometric_mesh_1d(0.0, 1.0, L=L, sigma=sigma, side="left")
    h = np.diff(m.nodes)
    assert_allclose(h[0], sigma**L, rtol=1e-13)
    assert_allclose(h[1] / h[0], (1.0 - sigma) / sigma, rtol=1e-12)
    if L >= 2:
        ratios = h[2:L + 1] / h[1:L]
        assert_allclose(ratios, 1.0 / sigma, rtol=1e-12)


def test_linear_degree_vector_slope_one():
    m = mesh.geometric_mesh_1d(0.0, 1.0, L=3, sigma=0.5, side="left")
    d = mesh.linear_degree_vector(m, slope=1.0, r_min=1)
    assert tuple(d) == (1, 1, 2, 3)


def test_linear_degree_vector_small_slope_clamps():
    m = mesh.geometric_mesh_1d(0.0, 1.0, L=4, sigma=0.5, side="left")
    d = mesh.linear_degree_vector(m, slope=1e-9, r_min=2)
    assert tuple(d) == (2,) * m.n_elements


def test_linear_degree_vector_L0():
    m = mesh.geometric_mesh_1d(0.0, 1.0, L=0, sigma=0.5, side="left")
    d = mesh.linear_degree_vector(m, slope=1.0, r_min=1)
    assert tuple(d) == (1, 1)


def test_degree_vector_rejects_negative():
    with pytest.raises(ValueError):
        mesh.DegreeVector((1, -1))


def test_time_partition_uniform():
    p = mesh.time_partition("uniform", 1.0, 4)
    assert_allclose(p.breakpoints, [0.0, 0.25, 0.5, 0.75, 1.0])
    assert tuple(p.degrees) == (0, 0, 0, 0)


def test_time_partition_power_graded():
    p = mesh.time_partition("power_graded", 1.0, 2, gamma=2.0)
    assert_allclose(p.breakpoints, [0.0, 0.25, 1.0])


def test_power_graded_gamma_one_is_uniform():
    a = mesh.time_partition("power_graded", 2.0, 7, gamma=1.0)
    b = mesh.time_partition("uniform", 2.0, 7)
    assert_allclose(a.breakpoints, b.breakpoints, rtol=0, atol=1e-15)


def test_time_partition_geometric():
    p = mesh.time_partition("geometric_plus_uniform", 1.0, 3, t1=1.0, sigma=0.5)
    assert_allclose(p.breakpoints, [0.0, 0.25, 0.5, 1.0])
    # degrees grow linearly across the layers, starting at 1
    assert tuple(p.degrees) == (1, 1, 2)


def test_time_partition_geometric_with_uniform_tail():
    p = mesh.time_partition("geometric_plus_uniform", 3.0, 3, t1=1.0, sigma=0.5)
    assert p.breakpoints[-1] == 3.0
    assert_allclose(p.breakpoints[:4], [0.0, 0.25, 0.5, 1.0])
    tail = np.diff(p.breakpoints[3:])
    assert_allclose(tail, tail[0], rtol=1e-12)
    assert tail[0] <= 0.5 + 1e-12
    # constant maximum degree after the geometric part
    assert set(p.degrees[3:]) == {max(p.degrees[:3])}


@pytest.mark.parametrize(
    "kind,kwargs",
    [
        ("power_graded", {"gamma": 0.5}),
        ("geometric_plus_uniform", {"t1": 2.0}),
        ("nonsense", {}),
    ],
)
def test_time_partition_rejects(kind, kwargs):
    with pytest.raises(ValueError):
        mesh.time_partition(kind, 1.0, 3, **kwargs)


def test_time_partition_rejects_zero_steps():
    with pytest.raises(ValueError):
        mesh.time_partition("uniform", 1.0, 0)


def test_optimal_grading_value():
    assert_allclose(mesh.OPTIMAL_GRADING, (np.sqrt(2.0) - 1.0) ** 2, rtol=1e-15)
