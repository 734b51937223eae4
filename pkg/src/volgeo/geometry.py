"""Discrete model manifolds and finite-difference operators.

Geometry is restricted to the flat circle S^1_L (dim 1) and the square
torus T^2_L carrying a conformal metric g = e^{2 phi} delta (dim 2, phi a
periodic spatial field; phi = 0 gives the flat torus).  Space-time fields
live on a collocated periodic grid in space crossed with a uniform time
interval [0, 1] whose first and last layers are Dirichlet layers.

All derivative operators are second-order centered stencils; time layers
0 and nt-1 get one-sided second-order stencils so diagnostics can be
evaluated on the full grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridError


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Periodic spatial grid (nx nodes per direction) x nt time layers."""

    dim: int
    nx: int
    nt: int
    length: float

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise GridError(f"dim must be 1 or 2, got {self.dim}")
        if self.nx < 8:
            raise GridError(f"nx must be >= 8, got {self.nx}")
        if self.nt < 5:
            raise GridError(f"nt must be >= 5, got {self.nt}")
        if not self.length > 0:
            raise GridError(f"length must be positive, got {self.length}")

    @property
    def hx(self) -> float:
        return self.length / self.nx

    @property
    def ht(self) -> float:
        return 1.0 / (self.nt - 1)

    @property
    def spatial_shape(self) -> tuple:
        return (self.nx,) * self.dim

    @property
    def shape(self) -> tuple:
        return (self.nt,) + self.spatial_shape

    @property
    def spatial_axes(self) -> tuple:
        """Axes of a full space-time array that are spatial (time is axis 0)."""
        return tuple(range(1, self.dim + 1))

    def times(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.nt)

    def coords(self) -> tuple:
        """Node coordinates per spatial direction, broadcastable to spatial_shape."""
        x = np.arange(self.nx) * self.hx
        if self.dim == 1:
            return (x,)
        return (x[:, None], x[None, :])


def _check_values(grid_shape, values):
    values = np.asarray(values, dtype=float)
    if values.shape != grid_shape:
        raise GridError(f"values shape {values.shape} does not match grid shape {grid_shape}")
    if not np.all(np.isfinite(values)):
        raise GridError("field contains non-finite values")
    return values


@dataclass
class Field:
    """Scalar values on the full space-time grid, shape (nt, nx[, nx])."""

    grid: SpaceTimeGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = _check_values(self.grid.shape, self.values)

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def interior(self) -> np.ndarray:
        """View of the non-Dirichlet time layers 1..nt-2."""
        return self.values[1:-1]


@dataclass
class SpatialField:
    """Scalar values on the spatial torus only, shape (nx,[ nx])."""

    grid: SpaceTimeGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = _check_values(self.grid.spatial_shape, self.values)

    def copy(self) -> "SpatialField":
        return SpatialField(self.grid, self.values.copy())


@dataclass
class Metric:
    """Model metric: flat circle (dim 1) or conformal torus e^{2 phi} delta (dim 2)."""

    dim: int
    length: float
    phi: SpatialField | None = None

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise GridError(f"dim must be 1 or 2, got {self.dim}")
        if not self.length > 0:
            raise GridError(f"length must be positive, got {self.length}")
        if self.dim == 1 and self.phi is not None and np.any(self.phi.values != 0.0):
            raise GridError("dim-1 metrics are flat; phi must be identically zero")

    @property
    def is_flat(self) -> bool:
        return self.phi is None or not np.any(self.phi.values != 0.0)

    def conformal_factor(self) -> np.ndarray | float:
        """e^{-2 phi}, the inverse-metric weight (scalar 1.0 when flat)."""
        if self.phi is None:
            return 1.0
        return np.exp(-2.0 * self.phi.values)

    def volume_weight(self) -> np.ndarray | float:
        """sqrt(det g) = e^{dim * phi} (scalar 1.0 when flat)."""
        if self.phi is None:
            return 1.0
        return np.exp(self.dim * self.phi.values)

    def curvature(self, grid: SpaceTimeGrid) -> SpatialField:
        """Gauss curvature K = -e^{-2 phi} lap0(phi); zero in dim 1 / flat."""
        if self.dim == 1 or self.phi is None:
            return SpatialField(grid, np.zeros(grid.spatial_shape))
        k = -np.exp(-2.0 * self.phi.values) * lap0(self.phi.values, grid.hx, self.dim)
        return SpatialField(grid, k)


# ---------------------------------------------------------------------------
# raw-array stencils; spatial axes are the trailing `sdim` ones, periodic
# ---------------------------------------------------------------------------

def dx(v: np.ndarray, hx: float, axis: int) -> np.ndarray:
    """Centered first difference along a periodic axis."""
    return (np.roll(v, -1, axis=axis) - np.roll(v, 1, axis=axis)) / (2.0 * hx)


def dxx(v: np.ndarray, hx: float, axis: int) -> np.ndarray:
    """Centered second difference along a periodic axis."""
    return (np.roll(v, -1, axis=axis) - 2.0 * v + np.roll(v, 1, axis=axis)) / (hx * hx)


def lap0(v: np.ndarray, hx: float, sdim: int) -> np.ndarray:
    """Flat Laplacian over the trailing sdim spatial axes of v."""
    out = dxx(v, hx, axis=v.ndim - 1)
    if sdim == 2:
        out = out + dxx(v, hx, axis=v.ndim - 2)
    return out


def spatial_partials(v: np.ndarray, hx: float, sdim: int) -> list:
    """Coordinate partials along each of the trailing sdim spatial axes."""
    return [dx(v, hx, axis=v.ndim - sdim + i) for i in range(sdim)]


def dt_full(u: np.ndarray, ht: float) -> np.ndarray:
    """du/dt: centered on interior layers, one-sided O(ht^2) at layers 0, nt-1."""
    out = np.empty_like(u)
    out[1:-1] = (u[2:] - u[:-2]) / (2.0 * ht)
    out[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * ht)
    out[-1] = (3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * ht)
    return out


def dtt_full(u: np.ndarray, ht: float) -> np.ndarray:
    """d2u/dt2: centered interior, one-sided O(ht^2) at the Dirichlet layers."""
    out = np.empty_like(u)
    h2 = ht * ht
    out[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / h2
    out[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / h2
    out[-1] = (2.0 * u[-1] - 5.0 * u[-2] + 4.0 * u[-3] - u[-4]) / h2
    return out


# ---------------------------------------------------------------------------
# metric operators on Fields
# ---------------------------------------------------------------------------

def laplace_beltrami(u: Field, m: Metric) -> Field:
    """Metric Laplacian: e^{-2 phi} * (flat centered Laplacian)."""
    return Field(u.grid, m.conformal_factor() * lap0(u.values, u.grid.hx, u.grid.dim))


def gradient_g(u: Field, m: Metric) -> list:
    """Gradient with raised index: components e^{-2 phi} * partial_i(u)."""
    w = m.conformal_factor()
    return [Field(u.grid, w * p) for p in spatial_partials(u.values, u.grid.hx, u.grid.dim)]


def g_norm_sq_partials(m: Metric, partials: list) -> np.ndarray:
    """|v|_g^2 from coordinate partials: e^{-2 phi} * sum_i (partial_i)^2."""
    return m.conformal_factor() * sum(p * p for p in partials)


def g_inner_partials(m: Metric, pa: list, pb: list) -> np.ndarray:
    """(a, b)_g from coordinate partials: e^{-2 phi} * sum_i pa_i pb_i."""
    return m.conformal_factor() * sum(p * q for p, q in zip(pa, pb))


def grad_norm_sq(u: Field, m: Metric) -> Field:
    """|grad u|_g^2 as a Field."""
    p = spatial_partials(u.values, u.grid.hx, u.grid.dim)
    return Field(u.grid, np.broadcast_to(g_norm_sq_partials(m, p), u.grid.shape).copy())


def covariant_hessian(u: Field, m: Metric) -> np.ndarray:
    """Covariant Hessian (coordinate components), shape grid.shape + (dim, dim).

    (hess u)_ij = d_i d_j u - Gamma^k_ij d_k u with the conformal Christoffels
    Gamma^k_ij = delta_ik phi_j + delta_jk phi_i - delta_ij phi_k.
    """
    g = u.grid
    hx = g.hx
    v = u.values
    out = np.empty(g.shape + (g.dim, g.dim))
    if g.dim == 1:
        out[..., 0, 0] = dxx(v, hx, axis=v.ndim - 1)
        return out
    ax, ay = v.ndim - 2, v.ndim - 1
    uxx = dxx(v, hx, axis=ax)
    uyy = dxx(v, hx, axis=ay)
    uxy = dx(dx(v, hx, axis=ax), hx, axis=ay)
    if m.phi is None:
        out[..., 0, 0] = uxx
        out[..., 1, 1] = uyy
        out[..., 0, 1] = out[..., 1, 0] = uxy
        return out
    px, py = spatial_partials(m.phi.values, hx, 2)
    ux = dx(v, hx, axis=ax)
    uy = dx(v, hx, axis=ay)
    out[..., 0, 0] = uxx - px * ux + py * uy
    out[..., 1, 1] = uyy + px * ux - py * uy
    out[..., 0, 1] = out[..., 1, 0] = uxy - py * ux - px * uy
    return out


def hessian_g_norm(hess: np.ndarray, m: Metric) -> np.ndarray:
    """|hess|_g, the frame norm e^{-2 phi} sqrt(sum_ij hess_ij^2)."""
    frob = np.sqrt(np.sum(hess * hess, axis=(-2, -1)))
    return m.conformal_factor() * frob


def time_derivatives(u: Field) -> tuple:
    """(u_t, u_tt, grad(u_t)) with one-sided time stencils at the Dirichlet layers.

    The mixed derivative is returned as coordinate partials (contract with the
    metric via g_norm_sq_partials); u_tt at layers 0 and nt-1 is for
    diagnostics only.
    """
    g = u.grid
    ut = dt_full(u.values, g.ht)
    utt = dtt_full(u.values, g.ht)
    grad_ut = [Field(g, p) for p in spatial_partials(ut, g.hx, g.dim)]
    return Field(g, ut), Field(g, utt), grad_ut


def integrate(s, m: Metric) -> float:
    """Integral against dV_g (and dt for space-time fields, trapezoidal in t)."""
    g = s.grid
    w = m.volume_weight() * g.hx ** g.dim
    if isinstance(s, SpatialField):
        return float(np.sum(s.values * w))
    layer = np.sum(s.values * w, axis=g.spatial_axes)
    return float(np.trapezoid(layer, dx=g.ht))


def layer_integrals(values: np.ndarray, grid: SpaceTimeGrid, m: Metric) -> np.ndarray:
    """Per-time-layer spatial integrals against dV_g."""
    w = m.volume_weight() * grid.hx ** grid.dim
    return np.sum(values * w, axis=grid.spatial_axes)
