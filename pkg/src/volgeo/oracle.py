"""Numerical verification of the exact identities behind the a priori bound.

Each check turns one step of the maximum-principle argument into a
falsifiable computation: the linearized operator is validated with a
Taylor-remainder probe, the two differentiated-equation identities are
evaluated on both sides with f defined as Q(u) on the grid (so they hold
for arbitrary smooth fields, solutions or not, up to O(h^2) stencil
commutation error), concavity of G = log Q is scanned over random cone
samples, and the commutation of flat stencils is checked to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import pde
from .errors import GridError
from .geometry import (Field, covariant_hessian, dxx, g_inner_partials,
                       g_norm_sq_partials, lap0, spatial_partials)
from .pde import ProblemData
from .qalgebra import g_hess, sample_admissible


def convergence_slope(hs, errors) -> float:
    """Least-squares slope of log(error) against log(h)."""
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    return float(np.polyfit(np.log(hs), np.log(errors), 1)[0])


@dataclass
class LinearizationReport:
    slope: float
    hs: list
    errors: list


def check_linearization(u: Field, psi: Field, p: ProblemData,
                        hs=(1e-1, 1e-2, 1e-3, 1e-4)) -> LinearizationReport:
    """Taylor-remainder probe of the linearized operator.

    e(h) = sup |Q(u + h psi) - Q(u) - h dQ(psi)| is O(h^2) exactly when
    dQ is the derivative of the discrete operator, so the fitted slope
    should be 2 for every b >= 0 (for b = 0 the remainder is purely
    quadratic and the slope is exact).  psi must vanish on the Dirichlet
    layers; if u + max(h) psi leaves the cone the whole ladder is halved.
    """
    if np.any(psi.values[0] != 0.0) or np.any(psi.values[-1] != 0.0):
        raise GridError("psi must vanish on the Dirichlet layers")
    hs = sorted(hs, reverse=True)
    for _ in range(60):
        trial = Field(u.grid, u.values + hs[0] * psi.values)
        if min(pde.jet_margins(trial, p)) > 0.0:
            break
        hs = [h * 0.5 for h in hs]
    q0 = pde.residual(u, p)
    dq = pde.apply_dq(u, p, psi)
    errors = []
    for h in hs:
        qh = pde.residual(Field(u.grid, u.values + h * psi.values), p)
        errors.append(float(np.max(np.abs(qh - q0 - h * dq))))
    return LinearizationReport(convergence_slope(hs, errors), list(hs), errors)


def _interior_ingredients(u: Field, p: ProblemData):
    """Shared pieces for the identity checks, on interior layers."""
    g = p.grid
    m = p.metric
    hx, ht = g.hx, g.ht
    v = u.values
    ui = v[1:-1]
    utt = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / ht ** 2
    ut = (v[2:] - v[:-2]) / (2.0 * ht)
    du = spatial_partials(ui, hx, g.dim)
    dut = spatial_partials(ut, hx, g.dim)
    bu = pde.b_u(u, p).values[1:-1]
    grad_ut_sq = g_norm_sq_partials(m, dut)
    f = utt * bu - grad_ut_sq          # Q(u) node-wise on interior layers
    return ui, utt, ut, du, dut, bu, grad_ut_sq, f


def check_gradient_identity(u: Field, p: ProblemData) -> float:
    """Sup defect of the differentiated equation, paired with grad(u).

    With f := Q(u), 2(grad u, grad f) - 2 u_tt (grad u, grad a) equals
    2 u_tt (grad u, grad lap u) - 2 b u_tt (grad u, grad |grad u|^2)
    + 2 B_u (grad u, grad u_tt) - 2 (grad u, grad |grad u_t|^2), all
    contractions in g.  The defect is pure stencil-commutation error and
    shrinks at second order.
    """
    g = p.grid
    m = p.metric
    hx = g.hx
    ui, utt, ut, du, dut, bu, grad_ut_sq, f = _interior_ingredients(u, p)
    w = m.conformal_factor()

    df = spatial_partials(f, hx, g.dim)
    da = spatial_partials(np.broadcast_to(p.a.values, ui.shape), hx, g.dim)
    lap_u = w * lap0(ui, hx, g.dim)
    dlap = spatial_partials(lap_u, hx, g.dim)
    grad_u_sq = g_norm_sq_partials(m, du)
    dgrad_sq = spatial_partials(grad_u_sq, hx, g.dim)
    dutt = spatial_partials(utt, hx, g.dim)
    dmixed_sq = spatial_partials(grad_ut_sq, hx, g.dim)

    lhs = 2.0 * g_inner_partials(m, du, df) - 2.0 * utt * g_inner_partials(m, du, da)
    rhs = (2.0 * utt * g_inner_partials(m, du, dlap)
           - 2.0 * p.b * utt * g_inner_partials(m, du, dgrad_sq)
           + 2.0 * bu * g_inner_partials(m, du, dutt)
           - 2.0 * g_inner_partials(m, du, dmixed_sq))
    return float(np.max(np.abs(lhs - rhs)))


def check_grad_sq_identity(u: Field, p: ProblemData) -> float:
    """Sup defect of the expansion of dQ applied to |grad u|_g^2.

    With f := Q(u),
      dQ(|grad u|^2) = 2 u_tt (Ric(grad u, grad u) - (grad u, grad a))
                       + 2 (grad f, grad u) + 2 u_tt |hess u|^2
                       + 2 B_u |grad u_t|^2 - 4 sum_ij u_ti u_tj u_ij,
    frame components throughout; Ric(grad u, grad u) = K |grad u|_g^2 in
    dim 2 and vanishes in dim 1.  The left side feeds |grad u|_g^2
    through the dQ stencil with its true boundary layers.
    """
    g = p.grid
    m = p.metric
    hx = g.hx
    ui, utt, ut, du, dut, bu, grad_ut_sq, f = _interior_ingredients(u, p)
    w = m.conformal_factor()

    du_full = spatial_partials(u.values, hx, g.dim)
    w_field = Field(g, np.broadcast_to(g_norm_sq_partials(m, du_full), g.shape).copy())
    lhs = pde.apply_dq(u, p, w_field)

    hess = covariant_hessian(u, m)[1:-1]
    frame_hess_sq = (w ** 2 if not np.isscalar(w) else 1.0) * np.sum(hess * hess, axis=(-2, -1))
    grad_u_sq = g_norm_sq_partials(m, du)
    da = spatial_partials(np.broadcast_to(p.a.values, ui.shape), hx, g.dim)
    df = spatial_partials(f, hx, g.dim)
    kappa = m.curvature(g).values
    ric = kappa * grad_u_sq if g.dim == 2 else 0.0

    # sum_ij u_ti u_tj u_ij in the orthonormal frame: e^{-4 phi} times the
    # coordinate contraction of the mixed partials with the Hessian
    w2 = w ** 2 if not np.isscalar(w) else 1.0
    contraction = np.zeros_like(utt)
    for i in range(g.dim):
        for j in range(g.dim):
            contraction += dut[i] * dut[j] * hess[..., i, j]
    contraction = w2 * contraction

    rhs = (2.0 * utt * (ric - g_inner_partials(m, du, da))
           + 2.0 * g_inner_partials(m, df, du)
           + 2.0 * utt * frame_hess_sq
           + 2.0 * bu * grad_ut_sq
           - 4.0 * contraction)
    return float(np.max(np.abs(lhs - rhs)))


@dataclass
class ConcavityReport:
    n: int
    samples: int
    seed: int
    max_eig: float              # largest Hessian eigenvalue found
    max_scaled_eig: float       # max of lambda_max / (1 + ||hess||)
    max_quadform: float         # max of v^T hess v / |v|^2 over random v


def check_concavity(samples: int = 100_000, seed: int = 1234, n: int = 1) -> ConcavityReport:
    """Scan random admissible jets for a positive eigenvalue of hess(G).

    Also probes the quadratic form directly with one random direction per
    jet (the step of the argument that discards -G^{ij} v_i v_j needs the
    form to be nonpositive).  Deterministic under a fixed seed.
    """
    r = sample_admissible(n, samples, seed=seed)
    hess = g_hess(r)
    eigs = np.linalg.eigvalsh(hess)
    lam_max = eigs[:, -1]
    spec_norm = np.max(np.abs(eigs), axis=1)
    scaled = lam_max / (1.0 + spec_norm)
    rng = np.random.default_rng(seed + 1)
    v = rng.standard_normal((samples, n + 2))
    quad = np.einsum("si,sij,sj->s", v, hess, v) / np.sum(v * v, axis=1)
    return ConcavityReport(
        n=n, samples=samples, seed=seed,
        max_eig=float(np.max(lam_max)),
        max_scaled_eig=float(np.max(scaled)),
        max_quadform=float(np.max(quad)),
    )


def check_flat_commutation(u: Field) -> float:
    """Sup of |lap(u_dd) - (lap u)_dd| over spatial directions, flat metric.

    Periodic shift stencils commute exactly, so this is rounding-level;
    conformal metrics are excluded (curvature terms enter there).
    """
    g = u.grid
    hx = g.hx
    v = u.values
    lap_u = lap0(v, hx, g.dim)
    worst = 0.0
    for ax in range(v.ndim - g.dim, v.ndim):
        a = lap0(dxx(v, hx, axis=ax), hx, g.dim)
        b = dxx(lap_u, hx, axis=ax)
        worst = max(worst, float(np.max(np.abs(a - b))))
    return worst
