"""Solution diagnostics: sup norms, Hessian eigenvalues, energy, drift.

Everything here reads a solved (or candidate) field and produces the
per-rung record of the ladder report: the sup norms whose uniformity in
epsilon is the point of the experiment, the largest Hessian eigenvalue,
the path energy and constant-speed defect, and a third-derivative proxy
that is logged but never asserted.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, fields as dc_fields

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import pde
from .geometry import (Field, Metric, covariant_hessian, dx, g_norm_sq_partials,
                       hessian_g_norm, laplace_beltrami, layer_integrals,
                       spatial_partials, time_derivatives)
from .pde import ProblemData


@dataclass
class SupNorms:
    sup_u: float
    sup_ut: float
    sup_grad_u: float
    sup_utt: float
    sup_grad_ut: float
    sup_lap_u: float
    sup_hess_u: float


def sup_norms(u: Field, p: ProblemData) -> SupNorms:
    """Exact grid maxima of the quantity list controlling the C^{1,1} bound.

    Gradient-type quantities are g-norms; the Hessian norm is the frame
    norm e^{-2 phi} |hess|_F.  Time stencils are one-sided on the
    Dirichlet layers so the sup runs over the full grid.
    """
    m = p.metric
    ut, utt, grad_ut = time_derivatives(u)
    gu = g_norm_sq_partials(m, spatial_partials(u.values, u.grid.hx, u.grid.dim))
    gut = g_norm_sq_partials(m, [f.values for f in grad_ut])
    hess = covariant_hessian(u, m)
    return SupNorms(
        sup_u=float(np.max(np.abs(u.values))),
        sup_ut=float(np.max(np.abs(ut.values))),
        sup_grad_u=float(np.sqrt(np.max(gu))),
        sup_utt=float(np.max(np.abs(utt.values))),
        sup_grad_ut=float(np.sqrt(np.max(gut))),
        sup_lap_u=float(np.max(np.abs(laplace_beltrami(u, m).values))),
        sup_hess_u=float(np.max(hessian_g_norm(hess, m))),
    )


def lambda1(u: Field, m: Metric) -> Field:
    """Largest eigenvalue of the Hessian in an orthonormal frame, node-wise.

    dim 1: the single frame entry; dim 2: closed-form top eigenvalue of
    the symmetric 2x2 matrix e^{-2 phi} (hess u)_ij.
    """
    hess = covariant_hessian(u, m)
    w = m.conformal_factor()
    if u.grid.dim == 1:
        return Field(u.grid, w * hess[..., 0, 0])
    h11 = w * hess[..., 0, 0]
    h22 = w * hess[..., 1, 1]
    h12 = w * hess[..., 0, 1]
    half_tr = 0.5 * (h11 + h22)
    disc = np.sqrt(0.25 * (h11 - h22) ** 2 + h12 ** 2)
    return Field(u.grid, half_tr + disc)


def h_quantity(u: Field, p: ProblemData, bias: float = 0.0) -> Field:
    """max over unit directions of u_{xi xi} + |grad u|_g^2 + bias * t^2.

    The direction maximum is the largest Hessian eigenvalue, so this is
    lambda1 + |grad u|_g^2 + bias * t^2 node-wise.
    """
    g = u.grid
    lam = lambda1(u, p.metric).values
    gu = g_norm_sq_partials(p.metric, spatial_partials(u.values, g.hx, g.dim))
    t2 = (g.times() ** 2).reshape((-1,) + (1,) * g.dim)
    return Field(g, lam + gu + bias * t2)


@dataclass
class EnergySpeed:
    energy: float
    speed_sq: np.ndarray        # per time layer
    drift: float
    formal: bool                # True when b != 0 (no geometric meaning then)


def energy_and_speed(u: Field, p: ProblemData) -> EnergySpeed:
    """Path energy, per-layer speed, and the constant-speed defect.

    speed^2(t) = int_M u_t^2 B_u dV;  energy = int_0^1 speed^2 dt.  For a
    solution, speed^2(t) - speed^2(0) = 2 int_0^t int_M u_t f dV ds, and
    `drift` is the sup deviation from that identity (trapezoidal in t).
    With b != 0 the weight has no metric interpretation; the record is
    flagged formal and reported anyway.
    """
    g = u.grid
    ut = time_derivatives(u)[0].values
    bu = pde.b_u(u, p).values
    speed_sq = layer_integrals(ut * ut * bu, g, p.metric)
    energy = float(np.trapezoid(speed_sq, dx=g.ht))
    f_full = p.target_full()
    source = layer_integrals(ut * f_full, g, p.metric)
    accum = 2.0 * cumulative_trapezoid(source, dx=g.ht, initial=0.0)
    drift = float(np.max(np.abs(speed_sq - speed_sq[0] - accum)))
    return EnergySpeed(energy, speed_sq, drift, formal=p.b != 0.0)


def third_derivative_proxy(u: Field) -> float:
    """Sup of centered differences of the Hessian entries (logged only).

    Differences run over every spatial direction and over the interior
    time layers; for fields quadratic in (x, t) this is zero to rounding.
    """
    g = u.grid
    hess = covariant_hessian(u, Metric(g.dim, g.length))
    worst = 0.0
    for i in range(g.dim):
        for j in range(i, g.dim):
            entry = hess[..., i, j]
            for ax in range(1, g.dim + 1):
                worst = max(worst, float(np.max(np.abs(dx(entry, g.hx, axis=ax)))))
            d_t = (entry[2:] - entry[:-2]) / (2.0 * g.ht)
            worst = max(worst, float(np.max(np.abs(d_t))))
    return worst


@dataclass
class RungRecord:
    """One ladder rung; the field names double as the CSV header."""

    epsilon: float
    sup_u: float
    sup_ut: float
    sup_grad_u: float
    sup_utt: float
    sup_grad_ut: float
    sup_lap_u: float
    sup_hess_u: float
    lambda1_max: float
    margin_min: float
    margin_max: float
    newton_iters: int
    final_residual: float
    energy: float
    speed_drift: float
    energy_formal: int
    third_deriv_proxy: float
    u: Field | None = dc_field(default=None, repr=False, compare=False)

    CSV_EXCLUDE = ("u",)

    @classmethod
    def columns(cls) -> list:
        return [f.name for f in dc_fields(cls) if f.name not in cls.CSV_EXCLUDE]

    def row(self) -> list:
        return [getattr(self, name) for name in self.columns()]


@dataclass
class LadderReport:
    rungs: list
    completed: bool
    failure: str | None = None

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rungs])


def collect_rung(u: Field, p: ProblemData, level: float, result) -> RungRecord:
    """Assemble the full diagnostics record for one converged rung."""
    sn = sup_norms(u, p)
    lam_max = float(np.max(lambda1(u, p.metric).values))
    jm = pde.jets(u, p)
    node_margin = np.minimum(np.minimum(jm[..., 0], jm[..., 1]),
                             jm[..., 0] * jm[..., 1] - np.sum(jm[..., 2:] ** 2, axis=-1))
    es = energy_and_speed(u, p)
    return RungRecord(
        epsilon=level,
        sup_u=sn.sup_u, sup_ut=sn.sup_ut, sup_grad_u=sn.sup_grad_u,
        sup_utt=sn.sup_utt, sup_grad_ut=sn.sup_grad_ut,
        sup_lap_u=sn.sup_lap_u, sup_hess_u=sn.sup_hess_u,
        lambda1_max=lam_max,
        margin_min=float(np.min(node_margin)),
        margin_max=float(np.max(node_margin)),
        newton_iters=result.iterations,
        final_residual=result.residual_norm,
        energy=es.energy,
        speed_drift=es.drift,
        energy_formal=int(es.formal),
        third_deriv_proxy=third_derivative_proxy(u),
        u=u,
    )
