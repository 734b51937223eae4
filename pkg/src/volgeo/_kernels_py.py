"""Numpy implementation of the hot stencil kernels.

This is the fallback backend (and the reference the compiled extension is
tested against).  All kernels take raw arrays: u has shape (nt, nx) in
dim 1 or (nt, nx, nx) in dim 2, a and em2p are spatial arrays, and the
interior slices are time layers 1..nt-2.  em2p is the conformal weight
e^{-2 phi} (pass an array of ones for flat dim-2 metrics).
"""

from __future__ import annotations

import numpy as np

from .geometry import dx, dxx, lap0, spatial_partials

IS_COMPILED = False


def _mixed_partials(u: np.ndarray, hx: float, ht: float, sdim: int) -> list:
    """partial_i(u_t) on interior layers via the centered 4-point stencil."""
    ut = (u[2:] - u[:-2]) / (2.0 * ht)
    return spatial_partials(ut, hx, sdim)


def bu_1d(u: np.ndarray, a: np.ndarray, b: float, hx: float) -> np.ndarray:
    """B_u = lap(u) - b |grad u|^2 + a on all time layers (dim 1, flat)."""
    ux = dx(u, hx, axis=1)
    return dxx(u, hx, axis=1) - b * ux * ux + a


def bu_2d(u: np.ndarray, a: np.ndarray, b: float, em2p: np.ndarray, hx: float) -> np.ndarray:
    """B_u = e^{-2phi} lap0(u) - b e^{-2phi} |Du|^2 + a on all time layers."""
    ux = dx(u, hx, axis=1)
    uy = dx(u, hx, axis=2)
    return em2p * (lap0(u, hx, 2) - b * (ux * ux + uy * uy)) + a


def residual_1d(u, a, b, target, hx, ht):
    """u_tt * B_u - |grad u_t|^2 - target on interior layers (dim 1)."""
    ht2 = ht * ht
    utt = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / ht2
    bu = bu_1d(u, a, b, hx)[1:-1]
    (utx,) = _mixed_partials(u, hx, ht, 1)
    return utt * bu - utx * utx - target


def residual_2d(u, a, b, em2p, target, hx, ht):
    """u_tt * B_u - e^{-2phi} |D u_t|^2 - target on interior layers (dim 2)."""
    ht2 = ht * ht
    utt = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / ht2
    bu = bu_2d(u, a, b, em2p, hx)[1:-1]
    utx, uty = _mixed_partials(u, hx, ht, 2)
    return utt * bu - em2p * (utx * utx + uty * uty) - target


def jet_mins_1d(u, a, b, hx, ht):
    """(min u_tt, min B_u, min Q) over interior nodes; the line-search scan."""
    ht2 = ht * ht
    utt = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / ht2
    bu = bu_1d(u, a, b, hx)[1:-1]
    (utx,) = _mixed_partials(u, hx, ht, 1)
    q = utt * bu - utx * utx
    return float(utt.min()), float(bu.min()), float(q.min())


def jet_mins_2d(u, a, b, em2p, hx, ht):
    ht2 = ht * ht
    utt = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / ht2
    bu = bu_2d(u, a, b, em2p, hx)[1:-1]
    utx, uty = _mixed_partials(u, hx, ht, 2)
    q = utt * bu - em2p * (utx * utx + uty * uty)
    return float(utt.min()), float(bu.min()), float(q.min())


def dq_apply_1d(u, w, a, b, hx, ht):
    """Linearized operator at u applied to w, on interior layers (dim 1).

    dQ(w) = u_tt (lap w - 2 b u_x w_x) + B_u w_tt - 2 u_tx w_tx, using the
    actual boundary-layer values of w (the assembled matrix is this with
    w = 0 on layers 0 and nt-1).
    """
    ht2 = ht * ht
    utt = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / ht2
    wtt = (w[2:] - 2.0 * w[1:-1] + w[:-2]) / ht2
    bu = bu_1d(u, a, b, hx)[1:-1]
    (utx,) = _mixed_partials(u, hx, ht, 1)
    (wtx,) = _mixed_partials(w, hx, ht, 1)
    ui = u[1:-1]
    wi = w[1:-1]
    lap_w = dxx(wi, hx, axis=1)
    adv = dx(ui, hx, axis=1) * dx(wi, hx, axis=1)
    return utt * (lap_w - 2.0 * b * adv) + bu * wtt - 2.0 * utx * wtx


def dq_apply_2d(u, w, a, b, em2p, hx, ht):
    ht2 = ht * ht
    utt = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / ht2
    wtt = (w[2:] - 2.0 * w[1:-1] + w[:-2]) / ht2
    bu = bu_2d(u, a, b, em2p, hx)[1:-1]
    utx, uty = _mixed_partials(u, hx, ht, 2)
    wtx, wty = _mixed_partials(w, hx, ht, 2)
    ui = u[1:-1]
    wi = w[1:-1]
    lap_w = em2p * lap0(wi, hx, 2)
    adv = em2p * (dx(ui, hx, axis=1) * dx(wi, hx, axis=1)
                  + dx(ui, hx, axis=2) * dx(wi, hx, axis=2))
    mixed = em2p * (utx * wtx + uty * wty)
    return utt * (lap_w - 2.0 * b * adv) + bu * wtt - 2.0 * mixed
