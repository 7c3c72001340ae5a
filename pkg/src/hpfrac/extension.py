"""Tensor-product discretization of the extended problem and its solvers.

The extended stiffness with Robin shift lambda is S_x ⊗ bhat + M_x ⊗ ahat_l,
ahat_l = dhat + lambda*d_s*trace0*trace0^T.  Real shifts decouple through a
symmetric-definite generalized eigenproblem of the pencil (ahat_l, bhat);
complex shifts (from the DG stage solves) go through a generalized Schur
(QZ) triangularization and block backward substitution.  A dense full-tensor
solve is kept as the verification oracle.
"""

import collections
import dataclasses
import threading

import numpy as np
import scipy.linalg as sla
from scipy.special import gamma as gamma_fn

from . import hp1d, mesh

__all__ = [
    "ExtensionDiscretization",
    "DecoupledBasis",
    "QZFactors",
    "GLambdaSolution",
    "build_extension",
    "standard_extension",
    "decouple_real",
    "decouple_qz",
    "solve_g_lambda",
    "dense_oracle_solve",
    "fractional_matrix",
    "cylinder_form",
]


@dataclasses.dataclass
class ExtensionDiscretization:
    """Matrices and constants of the discretized extension on Omega x (0,Y)."""

    s: float
    alpha: float
    ds: float
    space_x: hp1d.HpSpace
    space_y: hp1d.HpSpace
    forms_x: hp1d.AssembledForms
    forms_y: hp1d.WeightedYForms
    Sx: np.ndarray = dataclasses.field(repr=False, default=None)
    Mx: np.ndarray = dataclasses.field(repr=False, default=None)
    dhat: np.ndarray = dataclasses.field(repr=False, default=None)
    bhat: np.ndarray = dataclasses.field(repr=False, default=None)
    trace0: np.ndarray = dataclasses.field(repr=False, default=None)

    def __post_init__(self):
        self._solver_cache = collections.OrderedDict()
        self._cache_lock = threading.Lock()

    @property
    def N_x(self):
        return self.space_x.dim

    @property
    def N_y(self):
        return self.space_y.dim

    def ahat(self, lam):
        """dhat + lambda*d_s*trace0 trace0^T (complex for complex lambda)."""
        shift = lam * self.ds
        rank1 = np.outer(self.trace0, self.trace0)
        if np.iscomplexobj(np.asarray(lam)) and np.imag(lam) != 0:
            return self.dhat.astype(complex) + shift * rank1
        return self.dhat + np.real(shift) * rank1


@dataclasses.dataclass(frozen=True)
class DecoupledBasis:
    """Columns of V solve bhat v = kappa ahat_l v with V^T ahat_l V = I."""

    vectors: np.ndarray
    kappas: np.ndarray
    traces: np.ndarray
    lam: float


@dataclasses.dataclass(frozen=True)
class QZFactors:
    """Unitary Q, Z and triangular T, S with Q^H ahat_l Z = T, Q^H bhat Z = S."""

    q: np.ndarray
    z: np.ndarray
    t: np.ndarray
    sfac: np.ndarray
    lam: complex


@dataclasses.dataclass(frozen=True)
class GLambdaSolution:
    """Trace coefficients of G^lambda f, optionally the full cylinder solution."""

    trace: np.ndarray
    full: np.ndarray
    lam: complex


def build_extension(space_x, space_y, s, A=1.0, c=0.0):
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie in (0,1), got {s}")
    if space_x.bc != (hp1d.DIRICHLET, hp1d.DIRICHLET):
        raise ValueError("the x-space must vanish on both endpoints")
    alpha = 1.0 - 2.0 * s
    ds = 2.0**alpha * gamma_fn(1.0 - s) / gamma_fn(s)
    forms_x = hp1d.assemble(space_x, A, c)
    forms_y = hp1d.assemble_weighted_y(space_y, alpha)
    return ExtensionDiscretization(
        s=float(s),
        alpha=alpha,
        ds=float(ds),
        space_x=space_x,
        space_y=space_y,
        forms_x=forms_x,
        forms_y=forms_y,
        Sx=(forms_x.stiffness + forms_x.mass_c).toarray(),
        Mx=forms_x.mass.toarray(),
        dhat=forms_y.dhat.toarray(),
        bhat=forms_y.bhat.toarray(),
        trace0=forms_y.trace0.copy(),
    )


def standard_extension(
    a,
    b,
    s,
    p_x,
    layers_x,
    layers_y,
    A=1.0,
    c=0.0,
    sigma_x=0.5,
    sigma_y=mesh.OPTIMAL_GRADING,
    height=None,
    slope_y=1.0,
):
    """Extension discretization with the standard mesh construction.

    x: both-sided geometric mesh on (a,b) with layers_x layers, constant
    degree p_x, zero boundary values.  y: geometric mesh on (0, height)
    refined toward 0 with layers_y layers and degrees growing linearly
    away from 0; height defaults to the layer count.  The y grading
    factor defaults to the hp-optimal value (sqrt(2)-1)^2: the trace
    error of the discrete resolvent scales like h_min^{2s}, so the
    smallest element must be far smaller than the 0.5-graded mesh with
    the same layer count would give.
    """
    if height is None:
        height = float(max(layers_y, 1))
    mesh_x = mesh.geometric_mesh_1d(a, b, L=layers_x, sigma=sigma_x, side="both")
    space_x = hp1d.build_space(
        mesh_x,
        mesh.DegreeVector((p_x,) * mesh_x.n_elements),
        bc=(hp1d.DIRICHLET, hp1d.DIRICHLET),
    )
    mesh_y = mesh.geometric_mesh_1d(0.0, height, L=layers_y, sigma=sigma_y, side="left")
    degrees_y = mesh.linear_degree_vector(mesh_y, slope=slope_y, r_min=1)
    space_y = hp1d.build_space(mesh_y, degrees_y, bc=(hp1d.FREE, hp1d.DIRICHLET))
    return build_extension(space_x, space_y, s, A=A, c=c)


def decouple_real(ext, lam):
    """Simultaneous diagonalization of (ahat_lam, bhat) for real lam >= 0."""
    lam = float(lam)
    if lam < 0:
        raise ValueError("the decoupling shift must be nonnegative")
    ahat = ext.ahat(lam)
    try:
        kappas, V = sla.eigh(ext.bhat, ahat)
    except sla.LinAlgError as exc:
        raise RuntimeError(f"shifted y-stiffness not positive definite: {exc}") from exc
    # eigh returns ascending kappa with V^T ahat V = I; report descending
    kappas = kappas[::-1].copy()
    V = V[:, ::-1].copy()
    if np.any(kappas <= 0):
        raise RuntimeError("weighted y-mass lost positive definiteness")
    traces = V.T @ ext.trace0
    return DecoupledBasis(vectors=V, kappas=kappas, traces=traces, lam=lam)


def decouple_qz(ext, lam):
    """Generalized Schur triangularization of the pencil (ahat_lam, bhat)."""
    lam = complex(lam)
    if lam == 0 or lam.real < 0:
        raise ValueError("QZ path expects a nonzero shift with Re(lam) >= 0")
    ahat = ext.ahat(lam).astype(complex)
    bhat = ext.bhat.astype(complex)
    T, S, Q, Z = sla.qz(ahat, bhat, output="complex")
    return QZFactors(q=Q, z=Z, t=T, sfac=S, lam=lam)


def _real_solver(ext, lam):
    basis = decouple_real(ext, lam)
    lus = [sla.lu_factor(k * ext.Sx + ext.Mx) for k in basis.kappas]
    return ("real", basis, lus)


def _complex_solver(ext, lam):
    fac = decouple_qz(ext, lam)
    Sx = ext.Sx.astype(complex)
    Mx = ext.Mx.astype(complex)
    lus = []
    for i in range(ext.N_y):
        sii, tii = fac.sfac[i, i], fac.t[i, i]
        try:
            lus.append(sla.lu_factor(sii * Sx + tii * Mx))
        except sla.LinAlgError as exc:
            raise RuntimeError(
                f"singular stage matrix at y-stage {i}: S_ii={sii}, T_ii={tii}"
            ) from exc
    qh_tr0 = fac.q.conj().T @ ext.trace0
    zt_tr0 = fac.z.T @ ext.trace0
    return ("qz", fac, lus, qh_tr0, zt_tr0)


_CACHE_MAX = 8


def _solver_for(ext, lam):
    key = complex(lam)
    cache = ext._solver_cache
    with ext._cache_lock:
        if key in cache:
            cache.move_to_end(key)
            return cache[key]
        entry = _real_solver(ext, key.real) if key.imag == 0 else _complex_solver(ext, key)
        cache[key] = entry
        if len(cache) > _CACHE_MAX:
            cache.popitem(last=False)
        return entry


def solve_g_lambda(ext, lam, f_load, keep_full=False):
    """Solve the extended problem with Robin shift lam and data load f_load.

    The trace coefficients realize (lam*M_x + Lhs)^{-1} f_load on the
    x-space.  lam may be complex with Re(lam) >= 0; lam = 0 needs the
    Dirichlet x-space (always the case here) so S_x stays definite.
    """
    lam = complex(lam)
    if lam.real < 0:
        raise ValueError("resolvent shift must have nonnegative real part")
    f_load = np.asarray(f_load)
    if f_load.shape != (ext.N_x,):
        raise ValueError("load vector does not match the x-space dimension")

    entry = _solver_for(ext, lam)
    if entry[0] == "real":
        _, basis, lus = entry
        complex_load = np.iscomplexobj(f_load)
        U = np.empty((ext.N_x, ext.N_y), dtype=complex if complex_load else float)
        for i in range(ext.N_y):
            rhs = (ext.ds * basis.traces[i]) * f_load
            if complex_load:
                # the factorization is real; solve the parts separately
                U[:, i] = sla.lu_solve(lus[i], rhs.real) + 1j * sla.lu_solve(lus[i], rhs.imag)
            else:
                U[:, i] = sla.lu_solve(lus[i], rhs)
        trace = U @ basis.traces
        full = U @ basis.vectors.T if keep_full else None
        return GLambdaSolution(trace=trace, full=full, lam=lam)

    _, fac, lus, qh_tr0, zt_tr0 = entry
    T, S = fac.t, fac.sfac
    W = np.zeros((ext.N_x, ext.N_y), dtype=complex)
    for i in range(ext.N_y - 1, -1, -1):
        rhs = (ext.ds * qh_tr0[i]) * f_load.astype(complex)
        if i + 1 < ext.N_y:
            tail = W[:, i + 1 :]
            rhs = rhs - ext.Sx @ (tail @ S[i, i + 1 :]) - ext.Mx @ (tail @ T[i, i + 1 :])
        W[:, i] = sla.lu_solve(lus[i], rhs)
    trace = W @ zt_tr0
    full = W @ fac.z.T if keep_full else None
    return GLambdaSolution(trace=trace, full=full, lam=lam)


def dense_oracle_solve(ext, lam, f_load, cap=5000):
    """Assemble the full Kronecker system and solve it directly (oracle)."""
    lam = complex(lam)
    n = ext.N_x * ext.N_y
    if n > cap:
        raise ValueError(f"dense oracle refused: {n} unknowns exceed cap {cap}")
    is_real = lam.imag == 0
    ahat = ext.ahat(lam if not is_real else lam.real)
    K = np.kron(ext.Sx, ext.bhat) + np.kron(ext.Mx, ahat)
    rhs = ext.ds * np.kron(np.asarray(f_load), ext.trace0)
    U = np.linalg.solve(K, rhs).reshape(ext.N_x, ext.N_y)
    return GLambdaSolution(trace=U @ ext.trace0, full=U, lam=lam)


def fractional_matrix(ext, cap=5000):
    """Dense matrix F with (Lhs u, v) = v^T F u, via the trace Schur complement.

    F is the Schur complement of the lambda=0 extended stiffness onto the
    y=0 trace block, scaled by 1/d_s.  Dense-only verification tool.
    """
    n = ext.N_x * ext.N_y
    if n > cap:
        raise ValueError(f"fractional matrix refused: {n} unknowns exceed cap {cap}")
    K = np.kron(ext.Sx, ext.bhat) + np.kron(ext.Mx, ext.dhat)
    j0 = int(np.flatnonzero(ext.trace0)[0])
    t_idx = j0 + ext.N_y * np.arange(ext.N_x)
    mask = np.ones(n, dtype=bool)
    mask[t_idx] = False
    K_tt = K[np.ix_(t_idx, t_idx)]
    K_tr = K[np.ix_(t_idx, mask)]
    K_rr = K[np.ix_(mask, mask)]
    X = np.linalg.solve(K_rr, K_tr.T)
    return (K_tt - K_tr @ X) / ext.ds


def cylinder_form(ext, W, include_c=True):
    """Quadratic form of the lambda-free extended stiffness at coefficients W.

    include_c=True gives the full bilinear form value (A- and c-terms);
    include_c=False drops the reaction term, which is the squared
    gradient seminorm weighted by y^alpha when A = 1.
    """
    P = ext.Sx if include_c else ext.forms_x.stiffness.toarray()
    a = np.sum(W * (P @ W @ ext.bhat))
    b = np.sum(W * (ext.Mx @ W @ ext.dhat))
    return float(a + b)
