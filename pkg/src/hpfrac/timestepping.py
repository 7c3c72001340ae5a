"""Time discretization: hp-DG marching and its implicit-Euler special case.

Each time interval carries a polynomial of degree r_j in an L2-orthonormal
Legendre basis, so the temporal mass matrix is the identity and the
interval system couples the temporal modes only through one matrix C
(against M_x) plus a block-diagonal (k_j/2) times the fractional operator.
A complex Schur form of C turns the interval into r_j+1 sequential
resolvent solves with shifts 2*T_ii/k_j, which is where the extension's
complex solver comes in.  Degree zero reproduces implicit Euler with the
step-averaged right-hand side.
"""

import dataclasses
import functools

import numpy as np
import scipy.linalg as sla
from numpy.polynomial import legendre as npleg

from . import hp1d
from .extension import solve_g_lambda

__all__ = [
    "TimeBlock",
    "Trajectory",
    "dg_time_block",
    "dg_step",
    "run_dg",
    "run_euler",
]

_SCHUR_TOL = 1e-10
_IMAG_TOL = 1e-7


def _scale(r):
    """Normalization c_n turning Legendre P_n into an L2(-1,1) unit vector."""
    return np.sqrt((2.0 * np.arange(r + 1) + 1.0) / 2.0)


def basis_values(r, tau):
    """Values of the orthonormal temporal basis at points tau, shape (r+1, len(tau))."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    return (npleg.legvander(tau, r) * _scale(r)).T


@dataclasses.dataclass(frozen=True)
class TimeBlock:
    """Reference-interval DG matrices for temporal degree r.

    coupling[m, n] = int p_n' p_m + p_n(-1) p_m(-1); schur_q, schur_t
    satisfy Q^H C Q = T with Re(diag T) > 0.
    """

    r: int
    coupling: np.ndarray
    schur_q: np.ndarray
    schur_t: np.ndarray
    values_left: np.ndarray
    values_right: np.ndarray


@functools.lru_cache(maxsize=None)
def dg_time_block(r):
    if r < 0:
        raise ValueError("temporal degree must be >= 0")
    c = _scale(r)
    n = np.arange(r + 1)
    # int_{-1}^{1} P_n' P_m = 2 when n > m and n+m odd, else 0
    deriv = 2.0 * ((n[None, :] > n[:, None]) & (((n[None, :] + n[:, None]) % 2) == 1))
    jump = (-1.0) ** (n[None, :] + n[:, None])
    C = np.outer(c, c) * (deriv + jump)
    T, Q = sla.schur(C.astype(complex), output="complex")
    resid = np.linalg.norm(Q @ T @ Q.conj().T - C)
    if resid > _SCHUR_TOL:
        raise RuntimeError(f"Schur factorization residual {resid:.2e} too large")
    if np.any(np.real(np.diag(T)) <= 0):
        raise RuntimeError("DG coupling matrix has a non-positive stage shift")
    return TimeBlock(
        r=r,
        coupling=C,
        schur_q=Q,
        schur_t=T,
        values_left=c * (-1.0) ** n,
        values_right=c.copy(),
    )


def dg_step(ext, interval, r, load=None, u_minus_load=None):
    """One DG interval solve; returns real block coefficients (r+1, N_x).

    load, if given, maps a time t to the x-load vector (f(t), phi_k); the
    previous-trace data u_minus_load is the dual vector (u(t_{j-1}^-), phi_k),
    which for the first interval is the load of the initial condition.
    """
    t0, t1 = interval
    k = t1 - t0
    if k <= 0:
        raise ValueError("empty time interval")
    block = dg_time_block(r)

    b = np.zeros((r + 1, ext.N_x))
    if load is not None:
        tau_q, w_q = np.polynomial.legendre.leggauss(r + 4)
        pvals = basis_values(r, tau_q)
        for q in range(tau_q.size):
            fq = np.asarray(load(t0 + 0.5 * (tau_q[q] + 1.0) * k))
            b += (0.5 * k * w_q[q]) * np.outer(pvals[:, q], fq)
    if u_minus_load is not None:
        b += np.outer(block.values_left, np.asarray(u_minus_load))

    T = block.schur_t
    bhat = block.schur_q.conj().T @ b.astype(complex)
    W = np.zeros((r + 1, ext.N_x), dtype=complex)
    for i in range(r, -1, -1):
        rhs = bhat[i]
        if i < r:
            rhs = rhs - T[i, i + 1 :] @ (W[i + 1 :] @ ext.Mx.T)
        W[i] = solve_g_lambda(ext, 2.0 * T[i, i] / k, (2.0 / k) * rhs).trace
    U = block.schur_q @ W
    imag = np.linalg.norm(U.imag)
    if imag > _IMAG_TOL * (1.0 + np.linalg.norm(U.real)):
        raise RuntimeError(f"stage recombination left imaginary residue {imag:.2e}")
    return U.real


@dataclasses.dataclass(frozen=True)
class Trajectory:
    """Piecewise-polynomial-in-time solution; right-continuous with left limits."""

    partition: object
    blocks: tuple
    initial: np.ndarray

    def __post_init__(self):
        if len(self.blocks) != self.partition.n_intervals:
            raise ValueError("one coefficient block per time interval required")
        for j, blk in enumerate(self.blocks):
            if blk.shape[0] != self.partition.degrees[j] + 1:
                raise ValueError(f"block {j} does not match its temporal degree")

    @property
    def n_x(self):
        return self.blocks[0].shape[1]

    def coefficients_at(self, t):
        """x-coefficients of u(t); at interior breakpoints the right limit, at T the left."""
        bp = self.partition.breakpoints
        if t < bp[0] or t > bp[-1]:
            raise ValueError(f"time {t} outside [0, {bp[-1]}]")
        j = min(int(np.searchsorted(bp, t, side="right")) - 1, len(bp) - 2)
        t0, t1 = bp[j], bp[j + 1]
        tau = 2.0 * (t - t0) / (t1 - t0) - 1.0
        blk = self.blocks[j]
        return basis_values(blk.shape[0] - 1, tau)[:, 0] @ blk

    def left_limit(self, j):
        """x-coefficients of u(t_j^-), j = 1..M."""
        if not 1 <= j <= len(self.blocks):
            raise ValueError("left limits exist at breakpoints 1..M")
        blk = self.blocks[j - 1]
        return dg_time_block(blk.shape[0] - 1).values_right @ blk

    def right_limit(self, j):
        """x-coefficients of u(t_j^+), j = 0..M-1."""
        if not 0 <= j < len(self.blocks):
            raise ValueError("right limits exist at breakpoints 0..M-1")
        blk = self.blocks[j]
        return dg_time_block(blk.shape[0] - 1).values_left @ blk

    def final(self):
        return self.left_limit(len(self.blocks))

    def jump(self, j):
        """[u]_j = u(t_j^+) - u(t_j^-), with u(t_0^-) the projected initial data."""
        minus = self.initial if j == 0 else self.left_limit(j)
        return self.right_limit(j) - minus


def _load_maker(ext, f, load_fn):
    if load_fn is not None:
        return load_fn
    if f is not None:
        return lambda t: hp1d.load_vector(ext.space_x, lambda x: f(x, t))
    return None


def _initial_data(ext, u0, u0_load):
    if u0_load is not None:
        load = np.asarray(u0_load, dtype=float)
    elif u0 is not None:
        load = hp1d.load_vector(ext.space_x, u0)
    else:
        load = np.zeros(ext.N_x)
    coeffs = sla.solve(ext.Mx, load, assume_a="pos")
    return load, coeffs


def run_dg(ext, partition, f=None, u0=None, load_fn=None, u0_load=None):
    """March the DG discretization over the partition; returns a Trajectory.

    f(x, t) is a scalar source; alternatively load_fn(t) supplies the
    assembled load vector directly.  The initial condition enters only
    through its load (u0, phi_k), matching the DG initial term.
    """
    load = _load_maker(ext, f, load_fn)
    u_minus_load, initial = _initial_data(ext, u0, u0_load)
    blocks = []
    for j in range(partition.n_intervals):
        U = dg_step(ext, partition.interval(j), partition.degrees[j], load, u_minus_load)
        blocks.append(U)
        r = partition.degrees[j]
        u_minus_load = ext.Mx @ (dg_time_block(r).values_right @ U)
    return Trajectory(partition=partition, blocks=tuple(blocks), initial=initial)


def run_euler(ext, partition, f=None, u0=None, load_fn=None, u0_load=None):
    """Implicit Euler on the partition's breakpoints (temporal degrees ignored).

    Each step solves (M_x + k_j Lhs) u_j = M_x u_{j-1} + k_j fbar_j with
    fbar_j the integral mean of the load over the step, evaluated with the
    same quadrature as the degree-0 DG step; the trajectories coincide.
    """
    load = _load_maker(ext, f, load_fn)
    u_minus_load, initial = _initial_data(ext, u0, u0_load)
    tau_q, w_q = np.polynomial.legendre.leggauss(4)
    blocks = []
    u_prev_load = u_minus_load
    for j in range(partition.n_intervals):
        t0, t1 = partition.interval(j)
        k = t1 - t0
        fbar = np.zeros(ext.N_x)
        if load is not None:
            for q in range(tau_q.size):
                fbar += (0.5 * w_q[q]) * np.asarray(load(t0 + 0.5 * (tau_q[q] + 1.0) * k))
        u_j = solve_g_lambda(ext, 1.0 / k, u_prev_load / k + fbar).trace
        blocks.append(np.sqrt(2.0) * u_j[None, :])
        u_prev_load = ext.Mx @ u_j
    degrees0 = dataclasses.replace(
        partition, degrees=type(partition.degrees)((0,) * partition.n_intervals)
    )
    return Trajectory(partition=degrees0, blocks=tuple(blocks), initial=initial)
