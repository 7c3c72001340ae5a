"""1D hp finite elements: spaces, assembly, evaluation, error norms.

The element basis is hierarchic: the two vertex hat functions plus
integrated-Legendre bubbles N_j = (P_j - P_{j-2})/sqrt(2(2j-1)), j >= 2,
which keeps high-degree mass/stiffness matrices well conditioned.
Dirichlet conditions are handled by eliminating the boundary vertex dofs,
so every assembled matrix stays symmetric (positive) definite.
"""

import dataclasses

import numpy as np
import scipy.sparse as sp
from numpy.polynomial.legendre import legvander

from .mesh import DegreeVector, Mesh1D
from .quadrature import gauss_jacobi, gauss_legendre, map_to_element

__all__ = [
    "HpSpace",
    "AssembledForms",
    "WeightedYForms",
    "build_space",
    "assemble",
    "assemble_weighted_y",
    "load_vector",
    "l2_project",
    "eval_fn",
    "eval_deriv",
    "error_norms",
]

DIRICHLET = "dirichlet"
FREE = "free"


def shape_values(p, xi):
    """Reference shapes at points xi; rows = [hat_l, hat_r, bubbles 2..p]."""
    xi = np.asarray(xi, dtype=float)
    vals = np.empty((p + 1, xi.size))
    vals[0] = 0.5 * (1.0 - xi)
    vals[1] = 0.5 * (1.0 + xi)
    if p >= 2:
        V = legvander(xi, p)
        for j in range(2, p + 1):
            vals[j] = (V[:, j] - V[:, j - 2]) / np.sqrt(2.0 * (2 * j - 1))
    return vals


def shape_derivs(p, xi):
    """Reference-coordinate derivatives of shape_values."""
    xi = np.asarray(xi, dtype=float)
    ders = np.empty((p + 1, xi.size))
    ders[0] = -0.5
    ders[1] = 0.5
    if p >= 2:
        V = legvander(xi, p - 1)
        for j in range(2, p + 1):
            ders[j] = np.sqrt((2 * j - 1) / 2.0) * V[:, j - 1]
    return ders


@dataclasses.dataclass(frozen=True)
class HpSpace:
    """Continuous piecewise-polynomial space S^{r,1} with eliminated Dirichlet dofs."""

    mesh: Mesh1D
    degrees: DegreeVector
    bc: tuple
    dof_map: tuple  # per element: global index per local shape, -1 = eliminated
    dim: int

    @property
    def n_elements(self):
        return self.mesh.n_elements

    def vertex_dof(self, v):
        """Global dof of vertex v (leftmost local entry of the touching element)."""
        if v < self.n_elements:
            return int(self.dof_map[v][0])
        return int(self.dof_map[v - 1][1])


def build_space(mesh, degrees, bc=(DIRICHLET, DIRICHLET)):
    if len(degrees) != mesh.n_elements:
        raise ValueError("degree vector length does not match element count")
    if any(d < 1 for d in degrees):
        raise ValueError("continuous elements need degree >= 1")
    bc = tuple(bc)
    if len(bc) != 2 or any(side not in (DIRICHLET, FREE) for side in bc):
        raise ValueError(f"bc must be a pair of '{DIRICHLET}'/'{FREE}'")

    nv = mesh.n_elements + 1
    vertex_gid = np.full(nv, -1, dtype=int)
    nxt = 0
    for v in range(nv):
        if v == 0 and bc[0] == DIRICHLET:
            continue
        if v == nv - 1 and bc[1] == DIRICHLET:
            continue
        vertex_gid[v] = nxt
        nxt += 1
    dof_map = []
    for e, p in enumerate(degrees):
        local = [vertex_gid[e], vertex_gid[e + 1]]
        for _ in range(p - 1):
            local.append(nxt)
            nxt += 1
        dof_map.append(np.array(local, dtype=int))
    return HpSpace(mesh=mesh, degrees=degrees, bc=bc, dof_map=tuple(dof_map), dim=nxt)


@dataclasses.dataclass(frozen=True)
class AssembledForms:
    """Stiffness ∫A u'v', reaction mass ∫c u v and plain mass ∫u v (CSR)."""

    stiffness: sp.csr_matrix
    mass_c: sp.csr_matrix
    mass: sp.csr_matrix


@dataclasses.dataclass(frozen=True)
class WeightedYForms:
    """dhat = ∫y^α v'w', bhat = ∫y^α v w on (0,Y), trace0 = basis values at 0."""

    dhat: sp.csr_matrix
    bhat: sp.csr_matrix
    trace0: np.ndarray
    alpha: float


def _as_callable(coeff):
    if callable(coeff):
        return coeff
    value = float(coeff)
    return lambda x: np.full_like(np.asarray(x, dtype=float), value)


def _scatter(rows, cols, vals, gdofs, local):
    keep = gdofs >= 0
    gd = gdofs[keep]
    loc = local[np.ix_(keep, keep)]
    ri, ci = np.meshgrid(gd, gd, indexing="ij")
    rows.append(ri.ravel())
    cols.append(ci.ravel())
    vals.append(loc.ravel())


def _to_csr(rows, cols, vals, dim):
    m = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )
    return m.tocsr()


def assemble(space, A=1.0, c=0.0):
    """Assemble stiffness/mass_c/mass for the operator -div(A u') + c u."""
    Af, cf = _as_callable(A), _as_callable(c)
    rS, cS, vS = [], [], []
    rC, cC, vC = [], [], []
    rM, cM, vM = [], [], []
    for e in range(space.n_elements):
        p = space.degrees[e]
        el = space.mesh.element(e)
        h = el[1] - el[0]
        rule = gauss_legendre(p + 2)
        x, w = map_to_element(rule, el)
        Aq = np.asarray(Af(x), dtype=float)
        cq = np.asarray(cf(x), dtype=float)
        if np.any(Aq <= 0):
            raise ValueError("invalid coefficient: A must be strictly positive")
        if np.any(cq < -1e-14):
            raise ValueError("invalid coefficient: c must be nonnegative")
        xi = 2.0 * (x - el[0]) / h - 1.0
        val = shape_values(p, xi)
        der = shape_derivs(p, xi)
        S = (4.0 / h**2) * ((der * (w * Aq)) @ der.T)
        C = (val * (w * cq)) @ val.T
        M = (val * w) @ val.T
        gd = space.dof_map[e]
        for mats, sink in ((S, (rS, cS, vS)), (C, (rC, cC, vC)), (M, (rM, cM, vM))):
            loc = 0.5 * (mats + mats.T)
            _scatter(sink[0], sink[1], sink[2], gd, loc)
    return AssembledForms(
        stiffness=_to_csr(rS, cS, vS, space.dim),
        mass_c=_to_csr(rC, cC, vC, space.dim),
        mass=_to_csr(rM, cM, vM, space.dim),
    )


def assemble_weighted_y(space, alpha):
    """Weighted matrices on (0,Y); Gauss-Jacobi on the element at y=0."""
    if not -1.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (-1,1), got {alpha}")
    mesh = space.mesh
    if abs(mesh.a) > 1e-14 * (mesh.b - mesh.a):
        raise ValueError("weighted forms expect a mesh starting at y=0")
    if space.bc[1] != DIRICHLET:
        raise ValueError("the y-space must vanish at the truncation point Y")
    if space.bc[0] != FREE:
        raise ValueError("the y-space must keep its trace dof at y=0")

    rD, cD, vD = [], [], []
    rB, cB, vB = [], [], []
    for e in range(space.n_elements):
        p = space.degrees[e]
        el = space.mesh.element(e)
        h = el[1] - el[0]
        if abs(el[0]) <= 1e-13 * h:
            x, w = map_to_element(gauss_jacobi(alpha, p + 2), el)
        else:
            # smooth weight: absorb y^alpha pointwise; the extra points push
            # the analytic-weight quadrature error to machine level even on
            # the element adjacent to the graded zone
            x, w = map_to_element(gauss_legendre(max(p + 2, 10)), el)
            w = w * x**alpha
        xi = 2.0 * (x - el[0]) / h - 1.0
        val = shape_values(p, xi)
        der = shape_derivs(p, xi)
        D = (4.0 / h**2) * ((der * w) @ der.T)
        B = (val * w) @ val.T
        gd = space.dof_map[e]
        _scatter(rD, cD, vD, gd, 0.5 * (D + D.T))
        _scatter(rB, cB, vB, gd, 0.5 * (B + B.T))

    trace0 = np.zeros(space.dim)
    trace0[space.vertex_dof(0)] = 1.0
    return WeightedYForms(
        dhat=_to_csr(rD, cD, vD, space.dim),
        bhat=_to_csr(rB, cB, vB, space.dim),
        trace0=trace0,
        alpha=float(alpha),
    )


def load_vector(space, f, extra_order=4):
    """Entries ∫ f φ_k, quadrature with extra_order points beyond the degree."""
    out = np.zeros(space.dim)
    for e in range(space.n_elements):
        p = space.degrees[e]
        el = space.mesh.element(e)
        x, w = map_to_element(gauss_legendre(p + extra_order), el)
        fq = np.asarray(f(x), dtype=float)
        xi = 2.0 * (x - el[0]) / (el[1] - el[0]) - 1.0
        val = shape_values(p, xi)
        gd = space.dof_map[e]
        keep = gd >= 0
        out[gd[keep]] += (val[keep] * (w * fq)).sum(axis=1)
    return out


def l2_project(space, f):
    """Coefficients of the L2-orthogonal projection of f onto the space."""
    forms = assemble(space, 1.0, 0.0)
    M = forms.mass.toarray()
    b = load_vector(space, f)
    u = np.linalg.solve(M, b)
    res = np.linalg.norm(M @ u - b)
    if res > 1e-12 * max(1.0, np.linalg.norm(b)):
        raise RuntimeError(f"mass solve residual {res:.2e}")
    return u


def _eval(space, coeffs, points, deriv):
    coeffs = np.asarray(coeffs)
    x = np.atleast_1d(np.asarray(points, dtype=float))
    nodes = space.mesh.nodes
    tol = 1e-12 * (nodes[-1] - nodes[0])
    if np.any(x < nodes[0] - tol) or np.any(x > nodes[-1] + tol):
        raise ValueError("evaluation point outside the domain")
    eidx = np.clip(np.searchsorted(nodes, x, side="right") - 1, 0, space.n_elements - 1)
    out = np.zeros(x.shape, dtype=np.result_type(coeffs.dtype, float))
    for e in np.unique(eidx):
        mask = eidx == e
        el = space.mesh.element(e)
        h = el[1] - el[0]
        xi = 2.0 * (x[mask] - el[0]) / h - 1.0
        p = space.degrees[e]
        basis = shape_derivs(p, xi) * (2.0 / h) if deriv else shape_values(p, xi)
        gd = space.dof_map[e]
        loc = np.where(gd >= 0, coeffs[np.maximum(gd, 0)], 0.0)
        out[mask] = loc @ basis
    return out


def eval_fn(space, coeffs, points):
    """Evaluate the FE function with the given coefficients."""
    return _eval(space, coeffs, points, deriv=False)


def eval_deriv(space, coeffs, points):
    """Evaluate the first derivative of the FE function."""
    return _eval(space, coeffs, points, deriv=True)


def error_norms(space, coeffs, exact, exact_derivative=None, extra_order=6):
    """(L2 error, H1-seminorm error) against a given exact function."""
    e_l2 = 0.0
    e_h1 = 0.0
    for e in range(space.n_elements):
        p = space.degrees[e]
        el = space.mesh.element(e)
        x, w = map_to_element(gauss_legendre(p + extra_order), el)
        diff = eval_fn(space, coeffs, x) - exact(x)
        e_l2 += float(np.dot(w, np.abs(diff) ** 2))
        if exact_derivative is not None:
            ddiff = eval_deriv(space, coeffs, x) - exact_derivative(x)
            e_h1 += float(np.dot(w, np.abs(ddiff) ** 2))
    return np.sqrt(e_l2), np.sqrt(e_h1)
