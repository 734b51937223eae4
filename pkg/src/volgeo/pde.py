"""The discrete nonlinear operator Q(u) - f and its sparse linearization.

residual(u) = u_tt * B_u - |grad u_t|_g^2 - target on the interior time
layers, with B_u = lap_g(u) - b |grad u|_g^2 + a.  assemble_dq builds the
exact Jacobian of the discrete residual (centered stencils throughout,
the 4-point mixed stencil for grad(psi_t)); unknowns are the interior
layers and updates vanish on the Dirichlet layers.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .backend import kernels
from .errors import EllipticityLossError, GridError, InadmissibleDataError, LinearSolveError
from .geometry import Field, Metric, SpaceTimeGrid, SpatialField


@dataclass
class ProblemData:
    """Coefficients, target level, and Dirichlet data of one problem instance.

    target is either a positive constant or a nonnegative Field; `delta` is
    the additive shift used when continuing a degenerate field target.
    """

    metric: Metric
    grid: SpaceTimeGrid
    a: SpatialField
    b: float
    u0: SpatialField
    u1: SpatialField
    target: float | Field
    delta: float = 0.0

    def __post_init__(self):
        if np.any(self.a.values <= 0.0):
            raise GridError("coefficient a must be positive everywhere")
        if self.b < 0.0:
            raise GridError(f"b must be nonnegative, got {self.b}")
        if isinstance(self.target, Field) and np.any(self.target.values < 0.0):
            raise GridError("field target must be nonnegative")
        if self.delta < 0.0:
            raise GridError(f"delta must be nonnegative, got {self.delta}")

    @property
    def level(self) -> float:
        """The continuation level: epsilon for constant targets, delta for fields."""
        return self.delta if isinstance(self.target, Field) else float(self.target)

    def with_level(self, level: float) -> "ProblemData":
        """Same problem at another continuation level."""
        if isinstance(self.target, Field):
            return replace(self, delta=level)
        return replace(self, target=level)

    def target_full(self) -> np.ndarray:
        """Target on all time layers, shape grid.shape."""
        if isinstance(self.target, Field):
            return self.target.values + self.delta
        return np.full(self.grid.shape, float(self.target))

    def target_interior(self) -> np.ndarray:
        """Target on the interior layers (contiguous, as the kernels expect)."""
        return np.ascontiguousarray(self.target_full()[1:-1])

    def conformal_interior(self) -> np.ndarray | None:
        """e^{-2 phi} as an array for the dim-2 kernels, None in dim 1."""
        if self.grid.dim == 1:
            return None
        w = self.metric.conformal_factor()
        if np.isscalar(w):
            return np.ones(self.grid.spatial_shape)
        return w


def _kernel_args(p: ProblemData):
    if p.grid.dim == 1:
        return (p.a.values, p.b)
    return (p.a.values, p.b, p.conformal_interior())


def b_u(u: Field, p: ProblemData) -> Field:
    """B_u = lap_g(u) - b |grad u|_g^2 + a on all time layers."""
    if p.grid.dim == 1:
        vals = kernels.bu_1d(u.values, p.a.values, p.b, p.grid.hx)
    else:
        vals = kernels.bu_2d(u.values, p.a.values, p.b, p.conformal_interior(), p.grid.hx)
    return Field(u.grid, vals)


def residual(u: Field, p: ProblemData) -> np.ndarray:
    """Q(u) - target on interior layers, shape (nt-2,) + spatial_shape."""
    g = p.grid
    tgt = p.target_interior()
    if g.dim == 1:
        return kernels.residual_1d(u.values, p.a.values, p.b, tgt, g.hx, g.ht)
    return kernels.residual_2d(u.values, p.a.values, p.b, p.conformal_interior(),
                               tgt, g.hx, g.ht)


def jet_margins(u: Field, p: ProblemData) -> tuple:
    """(min u_tt, min B_u, min Q) over the interior nodes."""
    g = p.grid
    if g.dim == 1:
        return kernels.jet_mins_1d(u.values, p.a.values, p.b, g.hx, g.ht)
    return kernels.jet_mins_2d(u.values, p.a.values, p.b, p.conformal_interior(),
                               g.hx, g.ht)


def jets(u: Field, p: ProblemData) -> np.ndarray:
    """Jet (u_tt, B_u, u_t1, ..) per interior node, shape interior + (dim+2,).

    Mixed entries carry the orthonormal-frame weight e^{-phi}, so
    q_value(jets) equals the residual plus the target.
    """
    g = p.grid
    ht2 = g.ht * g.ht
    v = u.values
    utt = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / ht2
    bu = b_u(u, p).values[1:-1]
    ut = (v[2:] - v[:-2]) / (2.0 * g.ht)
    out = np.empty(utt.shape + (g.dim + 2,))
    out[..., 0] = utt
    out[..., 1] = bu
    if g.dim == 1:
        out[..., 2] = (np.roll(ut, -1, axis=1) - np.roll(ut, 1, axis=1)) / (2.0 * g.hx)
    else:
        w = p.conformal_interior()
        ephi = np.sqrt(w)  # e^{-phi}
        out[..., 2] = ephi * (np.roll(ut, -1, axis=1) - np.roll(ut, 1, axis=1)) / (2.0 * g.hx)
        out[..., 3] = ephi * (np.roll(ut, -1, axis=2) - np.roll(ut, 1, axis=2)) / (2.0 * g.hx)
    return out


def apply_dq(u: Field, p: ProblemData, w: Field) -> np.ndarray:
    """Matrix-free dQ at u applied to w (using w's true boundary layers)."""
    g = p.grid
    if g.dim == 1:
        return kernels.dq_apply_1d(u.values, w.values, p.a.values, p.b, g.hx, g.ht)
    return kernels.dq_apply_2d(u.values, w.values, p.a.values, p.b,
                               p.conformal_interior(), g.hx, g.ht)


def check_admissible_endpoints(p: ProblemData):
    """Raise InadmissibleDataError naming the worst node if B_{u0/u1} <= 0."""
    for name, sf in (("u0", p.u0), ("u1", p.u1)):
        ext = Field(p.grid, np.broadcast_to(sf.values, p.grid.shape).copy())
        bu = b_u(ext, p).values[0]
        worst = np.unravel_index(np.argmin(bu), bu.shape)
        if bu[worst] <= 0.0:
            raise InadmissibleDataError(
                f"endpoint {name} is inadmissible: B = {bu[worst]:.6g} at node {worst}",
                node=worst)


@dataclass
class SparseSystem:
    """Assembled linearization over the interior unknowns."""

    matrix: sp.csr_matrix
    rhs: np.ndarray
    interior_shape: tuple


def _interior_coeffs(u: Field, p: ProblemData):
    """Node-wise stencil coefficients shared by both spatial dimensions."""
    g = p.grid
    ht2 = g.ht * g.ht
    v = u.values
    utt = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / ht2
    bu = b_u(u, p).values[1:-1]
    jm = jets(u, p)
    margin = np.minimum(np.minimum(jm[..., 0], jm[..., 1]),
                        jm[..., 0] * jm[..., 1] - np.sum(jm[..., 2:] ** 2, axis=-1))
    worst = np.unravel_index(np.argmin(margin), margin.shape)
    if margin[worst] <= 0.0:
        node = (worst[0] + 1,) + worst[1:]
        raise EllipticityLossError(
            f"inadmissible jet at node (t-layer, space) = {node}: "
            f"margin = {margin[worst]:.6g}",
            node=node, margin=float(margin[worst]))
    return utt, bu


def assemble_dq(u: Field, p: ProblemData) -> SparseSystem:
    """Sparse matrix of dQ on interior unknowns plus rhs = target - Q(u).

    dQ(psi) = u_tt (lap_g psi - 2 b (grad u, grad psi)_g) + B_u psi_tt
              - 2 (grad u_t, grad psi_t)_g
    with psi = 0 on the Dirichlet layers.  Raises EllipticityLossError if
    any interior jet leaves the cone.
    """
    g = p.grid
    utt, bu = _interior_coeffs(u, p)
    rhs = -residual(u, p)

    nI = g.nt - 2
    hx, ht = g.hx, g.ht
    v = u.values
    em2p = 1.0 if g.dim == 1 else p.conformal_interior()

    ut = (v[2:] - v[:-2]) / (2.0 * ht)

    if g.dim == 1:
        nx = g.nx
        n_unknown = nI * nx
        K, I = np.meshgrid(np.arange(nI), np.arange(nx), indexing="ij")
        row = (K * nx + I).ravel()
        ip = (I + 1) % nx
        im = (I - 1) % nx
        ui = v[1:-1]
        ux = (np.roll(ui, -1, axis=1) - np.roll(ui, 1, axis=1)) / (2.0 * hx)
        utx = (np.roll(ut, -1, axis=1) - np.roll(ut, 1, axis=1)) / (2.0 * hx)

        c_lap = utt * em2p / hx ** 2
        c_adv = -2.0 * p.b * utt * em2p * ux / (2.0 * hx)
        c_tt = bu / ht ** 2
        c_m = -2.0 * em2p * utx / (4.0 * hx * ht)

        rows, cols, vals = [], [], []

        def add(r, c, x, mask=None):
            if mask is None:
                rows.append(r.ravel())
                cols.append(c.ravel())
                vals.append(x.ravel())
            else:
                rows.append(r[mask])
                cols.append(c[mask])
                vals.append(x[mask])

        col_c = K * nx + I
        col_xp = K * nx + ip
        col_xm = K * nx + im
        add(col_c, col_c, -2.0 * c_lap - 2.0 * c_tt)
        add(col_c, col_xp, c_lap + c_adv)
        add(col_c, col_xm, c_lap - c_adv)
        up_ok = K < nI - 1
        dn_ok = K > 0
        add(col_c, col_c + nx, np.broadcast_to(c_tt, col_c.shape), up_ok)
        add(col_c, col_c - nx, np.broadcast_to(c_tt, col_c.shape), dn_ok)
        add(col_c, (K + 1) * nx + ip, c_m, up_ok)
        add(col_c, (K + 1) * nx + im, -c_m, up_ok)
        add(col_c, (K - 1) * nx + ip, -c_m, dn_ok)
        add(col_c, (K - 1) * nx + im, c_m, dn_ok)
        interior_shape = (nI, nx)
    else:
        nx = g.nx
        nsp = nx * nx
        n_unknown = nI * nsp
        K, I, J = np.meshgrid(np.arange(nI), np.arange(nx), np.arange(nx), indexing="ij")
        ip = (I + 1) % nx
        im = (I - 1) % nx
        jp = (J + 1) % nx
        jm = (J - 1) % nx
        ui = v[1:-1]
        ux = (np.roll(ui, -1, axis=1) - np.roll(ui, 1, axis=1)) / (2.0 * hx)
        uy = (np.roll(ui, -1, axis=2) - np.roll(ui, 1, axis=2)) / (2.0 * hx)
        utx = (np.roll(ut, -1, axis=1) - np.roll(ut, 1, axis=1)) / (2.0 * hx)
        uty = (np.roll(ut, -1, axis=2) - np.roll(ut, 1, axis=2)) / (2.0 * hx)

        c_lap = utt * em2p / hx ** 2
        c_adv_x = -2.0 * p.b * utt * em2p * ux / (2.0 * hx)
        c_adv_y = -2.0 * p.b * utt * em2p * uy / (2.0 * hx)
        c_tt = bu / ht ** 2
        c_mx = -2.0 * em2p * utx / (4.0 * hx * ht)
        c_my = -2.0 * em2p * uty / (4.0 * hx * ht)

        rows, cols, vals = [], [], []

        def add(r, c, x, mask=None):
            x = np.broadcast_to(x, r.shape)
            if mask is None:
                rows.append(r.ravel())
                cols.append(c.ravel())
                vals.append(x.ravel())
            else:
                rows.append(r[mask])
                cols.append(c[mask])
                vals.append(x[mask])

        def flat(k, i, j):
            return k * nsp + i * nx + j

        col_c = flat(K, I, J)
        add(col_c, col_c, -4.0 * c_lap - 2.0 * c_tt)
        add(col_c, flat(K, ip, J), c_lap + c_adv_x)
        add(col_c, flat(K, im, J), c_lap - c_adv_x)
        add(col_c, flat(K, I, jp), c_lap + c_adv_y)
        add(col_c, flat(K, I, jm), c_lap - c_adv_y)
        up_ok = K < nI - 1
        dn_ok = K > 0
        add(col_c, flat(K + 1, I, J), c_tt, up_ok)
        add(col_c, flat(K - 1, I, J), c_tt, dn_ok)
        add(col_c, flat(K + 1, ip, J), c_mx, up_ok)
        add(col_c, flat(K + 1, im, J), -c_mx, up_ok)
        add(col_c, flat(K - 1, ip, J), -c_mx, dn_ok)
        add(col_c, flat(K - 1, im, J), c_mx, dn_ok)
        add(col_c, flat(K + 1, I, jp), c_my, up_ok)
        add(col_c, flat(K + 1, I, jm), -c_my, up_ok)
        add(col_c, flat(K - 1, I, jp), -c_my, dn_ok)
        add(col_c, flat(K - 1, I, jm), c_my, dn_ok)
        interior_shape = (nI, nx, nx)

    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_unknown, n_unknown)).tocsr()
    return SparseSystem(mat, rhs.ravel(), interior_shape)


def solve_linear(system: SparseSystem, tol: float = 1e-12) -> np.ndarray:
    """Solve the assembled system directly; verifies the residual contract.

    Returns the interior update reshaped to system.interior_shape.  A few
    iterative-refinement sweeps absorb mild ill-conditioning; persistent
    failure raises LinearSolveError (the caller should shrink the
    continuation step).
    """
    rhs = system.rhs
    rhs_norm = np.linalg.norm(rhs)
    if rhs_norm == 0.0:
        return np.zeros(system.interior_shape)
    try:
        lu = spla.splu(system.matrix.tocsc())
        x = lu.solve(rhs)
    except RuntimeError as exc:
        raise LinearSolveError(f"sparse factorization failed: {exc}") from exc
    for _ in range(3):
        r = rhs - system.matrix @ x
        if np.linalg.norm(r) <= tol * rhs_norm:
            break
        x = x + lu.solve(r)
    else:
        r = rhs - system.matrix @ x
        if np.linalg.norm(r) > tol * rhs_norm:
            raise LinearSolveError(
                f"linear residual {np.linalg.norm(r):.3e} above {tol:.1e} * ||rhs||")
    if not np.all(np.isfinite(x)):
        raise LinearSolveError("linear solve produced non-finite values")
    return x.reshape(system.interior_shape)
