"""Geometric meshes, degree vectors and time partitions.

All spatial meshes are 1D partitions of an interval.  Geometric grading
accumulates nodes at one (or both) endpoints with ratio sigma, which is
what resolves boundary layers in x, the weight singularity in y and the
startup singularity in t.
"""

import dataclasses
import math

import numpy as np

__all__ = [
    "Mesh1D",
    "DegreeVector",
    "TimePartition",
    "OPTIMAL_GRADING",
    "geometric_mesh_1d",
    "linear_degree_vector",
    "time_partition",
]

# grading factor (sqrt(2)-1)^2 minimizing the hp error for point singularities
OPTIMAL_GRADING = float((np.sqrt(2.0) - 1.0) ** 2)


@dataclasses.dataclass(frozen=True)
class Mesh1D:
    """Partition of an interval (a,b) with grading metadata.

    nodes : strictly increasing array of coordinates
    sigma : grading factor in (0,1)
    layers : number of geometric layers L
    refined_toward : one of 'left', 'right', 'both', 'none'
    """

    nodes: np.ndarray
    sigma: float = 0.5
    layers: int = 0
    refined_toward: str = "none"

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("mesh needs at least two nodes")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("mesh nodes must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)

    @property
    def a(self):
        return float(self.nodes[0])

    @property
    def b(self):
        return float(self.nodes[-1])

    @property
    def n_elements(self):
        return len(self.nodes) - 1

    def element(self, e):
        """Endpoints (x_left, x_right) of element e."""
        return float(self.nodes[e]), float(self.nodes[e + 1])

    @property
    def element_sizes(self):
        return np.diff(self.nodes)


@dataclasses.dataclass(frozen=True)
class DegreeVector:
    """Polynomial degree per element.

    Entries are nonnegative integers; continuous FE spaces additionally
    require every entry >= 1, which build_space enforces.
    """

    degrees: tuple

    def __post_init__(self):
        degs = tuple(int(d) for d in self.degrees)
        if any(d < 0 for d in degs):
            raise ValueError("degrees must be >= 0")
        object.__setattr__(self, "degrees", degs)

    def __len__(self):
        return len(self.degrees)

    def __getitem__(self, i):
        return self.degrees[i]

    def __iter__(self):
        return iter(self.degrees)

    @property
    def max_degree(self):
        return max(self.degrees)


@dataclasses.dataclass(frozen=True)
class TimePartition:
    """Breakpoints 0 = t_0 < ... < t_M = T with a temporal degree per interval."""

    breakpoints: np.ndarray
    degrees: DegreeVector

    def __post_init__(self):
        t = np.asarray(self.breakpoints, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise ValueError("need at least one time interval")
        if abs(t[0]) > 0:
            raise ValueError("time partition must start at 0")
        if not np.all(np.diff(t) > 0):
            raise ValueError("time breakpoints must be strictly increasing")
        if len(self.degrees) != t.size - 1:
            raise ValueError("one temporal degree per interval required")
        object.__setattr__(self, "breakpoints", t)

    @property
    def T(self):
        return float(self.breakpoints[-1])

    @property
    def n_intervals(self):
        return len(self.breakpoints) - 1

    def interval(self, j):
        return float(self.breakpoints[j]), float(self.breakpoints[j + 1])

    @property
    def steps(self):
        return np.diff(self.breakpoints)


def geometric_mesh_1d(a, b, L, sigma=0.5, side="left"):
    """Geometric mesh on (a,b) with L layers and grading factor sigma.

    side='left' places nodes a + (b-a)*sigma^j for j = L..1 (L=0 degenerates
    to the single interior node at sigma); side='both' mirrors the grading
    into both endpoints; side='none' returns the single element (a,b).
    """
    if not a < b:
        raise ValueError("need a < b")
    if not 0.0 < sigma < 1.0:
        raise ValueError(f"sigma must lie in (0,1), got {sigma}")
    if L < 0:
        raise ValueError(f"layers must be >= 0, got {L}")
    if side not in ("left", "right", "both", "none"):
        raise ValueError(f"unknown refinement side {side!r}")

    width = b - a
    if side == "none":
        nodes = [a, b]
    else:
        # one-sided grading spans the full width; two-sided grading works
        # with the half width from each endpoint so the zones never meet
        scale = width if side in ("left", "right") else 0.5 * width
        exponents = list(range(max(L, 1), 0, -1))
        interior_left = [a + scale * sigma**j for j in exponents]
        interior_right = [b - scale * sigma**j for j in reversed(exponents)]
        if side == "left":
            nodes = [a] + interior_left + [b]
        elif side == "right":
            nodes = [a] + interior_right + [b]
        else:
            nodes = [a] + interior_left + interior_right + [b]
    nodes = np.array(nodes, dtype=float)
    return Mesh1D(nodes=nodes, sigma=sigma, layers=L, refined_toward=side)


def _layer_distances(mesh):
    """Element distance (in layers) from the nearest refinement point."""
    ne = mesh.n_elements
    if mesh.refined_toward == "left":
        return np.arange(ne)
    if mesh.refined_toward == "right":
        return np.arange(ne)[::-1]
    if mesh.refined_toward == "both":
        idx = np.arange(ne)
        return np.minimum(idx, ne - 1 - idx)
    raise ValueError("mesh has no refinement side; degree slope is undefined")


def linear_degree_vector(mesh, slope=1.0, r_min=1):
    """Degrees increasing linearly with the layer distance from the refinement point.

    The element at the singular point gets r_min; the element on layer l gets
    max(r_min, ceil(slope*l)), capped at the zone maximum max(r_min, ceil(slope*L)).
    """
    if slope <= 0:
        raise ValueError("slope must be positive")
    if r_min < 1:
        raise ValueError("r_min must be >= 1")
    L = mesh.layers
    dist = np.minimum(_layer_distances(mesh), L)
    degrees = [max(r_min, math.ceil(slope * int(l))) for l in dist]
    return DegreeVector(tuple(degrees))


def time_partition(kind, T, M, gamma=None, t1=None, sigma=0.5, r=0, slope=1.0):
    """Build a TimePartition of (0,T).

    kind='uniform'                t_j = jT/M, constant degree r
    kind='power_graded'           t_j = T (j/M)^gamma, constant degree r
                                  (default gamma = 2r+3)
    kind='geometric_plus_uniform' M geometric layers toward 0 up to t1,
                                  then uniform steps of comparable size to T;
                                  degrees grow linearly across the geometric
                                  part (max(1, ceil(slope*l)) on layer l) and
                                  stay constant afterward
    """
    if T <= 0:
        raise ValueError("T must be positive")
    if M < 1:
        raise ValueError("need at least one time step")
    if r < 0:
        raise ValueError("temporal degree must be >= 0")

    if kind == "uniform":
        t = T * (np.arange(M + 1) / M)
        degrees = (r,) * M
    elif kind == "power_graded":
        if gamma is None:
            gamma = 2 * r + 3
        if gamma < 1:
            raise ValueError("grading exponent must be >= 1")
        t = T * (np.arange(M + 1) / M) ** float(gamma)
        degrees = (r,) * M
    elif kind == "geometric_plus_uniform":
        if not 0.0 < sigma < 1.0:
            raise ValueError(f"sigma must lie in (0,1), got {sigma}")
        if t1 is None:
            t1 = min(1.0, T)
        if not 0.0 < t1 <= T:
            raise ValueError("transition time t1 must lie in (0, T]")
        geo = [0.0] + [t1 * sigma**j for j in range(M - 1, 0, -1)] + [t1]
        degrees = [max(1, math.ceil(slope * l)) for l in range(M)]
        if t1 < T:
            k_last = t1 * (1.0 - sigma)
            n_uni = max(1, math.ceil((T - t1) / k_last))
            tail = [t1 + (T - t1) * i / n_uni for i in range(1, n_uni + 1)]
            geo += tail
            degrees += [max(1, math.ceil(slope * (M - 1)))] * n_uni
        t = np.array(geo)
        degrees = tuple(degrees)
    else:
        raise ValueError(f"unknown time partition kind {kind!r}")

    return TimePartition(breakpoints=t, degrees=DegreeVector(degrees))
