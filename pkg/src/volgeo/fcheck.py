"""Admissibility analysis of nonnegative right-hand sides.

For a degenerate target f >= 0 the solvability hypotheses are controlled
by derivatives of sqrt(f), not of f itself: this module computes the
bundle of sups entering that criterion, checks the gradient bound for
square roots of nonnegative C^{1,1} functions on the torus (where the
boundary-distance branch of the bound is vacuous), and measures the best
constant in |grad f|^2 <= C f^{3/2}.

Nodes where the field is essentially zero (below `threshold_rel` times
its sup) are excluded from square-root derivative scans: the bounds hold
almost everywhere, and the zero set itself carries no information.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridError
from .geometry import (Field, Metric, SpatialField, covariant_hessian, dt_full,
                       dtt_full, dx, dxx, g_norm_sq_partials, hessian_g_norm,
                       spatial_partials)

DEFAULT_THRESHOLD_REL = 1e-10

#: ratios larger than this are reported as unbounded
OVERFLOW_GUARD = 1e15


def _zero_mask(values: np.ndarray, threshold_rel: float) -> np.ndarray:
    top = float(np.max(values))
    return values > threshold_rel * max(top, np.finfo(float).tiny)


@dataclass
class FAdmissibilityRecord:
    sup_f: float
    sup_sqrtf_t: float
    sup_grad_sqrtf: float
    sup_f_tt: float
    sup_hess_sqrtf: float

    @property
    def total(self) -> float:
        return (self.sup_f + self.sup_sqrtf_t + self.sup_grad_sqrtf
                + self.sup_f_tt + self.sup_hess_sqrtf)


def f_admissibility(f: Field, m: Metric,
                    threshold_rel: float = DEFAULT_THRESHOLD_REL) -> FAdmissibilityRecord:
    """Sups of f, |sqrt(f)_t|, |grad sqrt(f)|_g, |f_tt|, |hess_g sqrt(f)|.

    Derivatives of sqrt(f) are evaluated with sqrt(f) zero-extended on the
    zero set of f; a negative node raises GridError.
    """
    v = f.values
    if np.any(v < 0.0):
        worst = np.unravel_index(np.argmin(v), v.shape)
        raise GridError(f"f must be nonnegative; f{tuple(worst)} = {v[worst]:.6g}")
    g = f.grid
    mask = _zero_mask(v, threshold_rel)
    sqrtf = np.where(mask, np.sqrt(np.maximum(v, 0.0)), 0.0)
    sf = Field(g, sqrtf)
    sqrtf_t = dt_full(sqrtf, g.ht)
    grad_sq = g_norm_sq_partials(m, spatial_partials(sqrtf, g.hx, g.dim))
    f_tt = dtt_full(v, g.ht)
    hess = hessian_g_norm(covariant_hessian(sf, m), m)
    return FAdmissibilityRecord(
        sup_f=float(np.max(v)),
        sup_sqrtf_t=float(np.max(np.abs(sqrtf_t))),
        sup_grad_sqrtf=float(np.sqrt(np.max(grad_sq))),
        sup_f_tt=float(np.max(np.abs(f_tt))),
        sup_hess_sqrtf=float(np.max(hess)),
    )


@dataclass
class BlockiReport:
    min_margin: float
    argmin: tuple
    bound: float                # (1 + sup lambda_max(D^2 psi)) / 2
    sup_grad_sqrt: float


def blocki_bound_check(psi: SpatialField,
                       threshold_rel: float = DEFAULT_THRESHOLD_REL) -> BlockiReport:
    """Check |D sqrt(psi)| <= (1 + sup lambda_max(D^2 psi)) / 2 node-wise.

    psi >= 0 on the torus; flat stencils throughout (the bound is a
    Euclidean statement).  Returns the minimum margin over nodes where
    psi is above threshold, with its location.
    """
    v = psi.values
    if np.any(v < 0.0):
        raise GridError("psi must be nonnegative")
    g = psi.grid
    hx = g.hx
    mask = _zero_mask(v, threshold_rel)
    sqrtpsi = np.where(mask, np.sqrt(np.maximum(v, 0.0)), 0.0)
    grad = np.sqrt(sum(p * p for p in spatial_partials(sqrtpsi, hx, g.dim)))
    if g.dim == 1:
        lam_max = dxx(v, hx, axis=0)
    else:
        pxx = dxx(v, hx, axis=0)
        pyy = dxx(v, hx, axis=1)
        pxy = dx(dx(v, hx, axis=0), hx, axis=1)
        half_tr = 0.5 * (pxx + pyy)
        disc = np.sqrt(0.25 * (pxx - pyy) ** 2 + pxy ** 2)
        lam_max = half_tr + disc
    bound = 0.5 * (1.0 + float(np.max(lam_max)))
    margin = np.where(mask, bound - grad, np.inf)
    arg = np.unravel_index(np.argmin(margin), margin.shape)
    return BlockiReport(
        min_margin=float(margin[arg]),
        argmin=tuple(int(i) for i in arg),
        bound=bound,
        sup_grad_sqrt=float(np.max(np.where(mask, grad, 0.0))),
    )


def gradient_growth_check(f: Field, m: Metric,
                          threshold_rel: float = DEFAULT_THRESHOLD_REL) -> float:
    """Best constant C in |grad f|_g^2 <= C f^{3/2} over {f > threshold}.

    The gradient is taken through the square root, |grad f| = 2 sqrt(f)
    |grad sqrt(f)|, which is the numerically faithful form near the zero
    set (sqrt(f) is the smooth object there); the ratio then reads
    4 |grad sqrt(f)|_g^2 / sqrt(f).  Returns inf when the ratio exceeds
    the overflow guard.
    """
    v = f.values
    if np.any(v < 0.0):
        raise GridError("f must be nonnegative")
    g = f.grid
    mask = _zero_mask(v, threshold_rel)
    if not np.any(mask):
        return 0.0
    sqrtf = np.where(mask, np.sqrt(np.maximum(v, 0.0)), 0.0)
    grad_sq = g_norm_sq_partials(m, spatial_partials(sqrtf, g.hx, g.dim))
    ratio = np.where(mask, 4.0 * grad_sq / np.where(mask, sqrtf, 1.0), 0.0)
    best = float(np.max(ratio))
    return np.inf if best > OVERFLOW_GUARD else best
