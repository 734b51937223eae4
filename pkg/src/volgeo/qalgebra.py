"""Pointwise algebra of the quadratic jet form Q and its log G.

A jet r = (r0, r1, r2, ..., r_{n+1}) packs (u_tt, B_u, u_t1, ..., u_tn)
at one node, the mixed entries taken in an orthonormal frame so that
sum_i r_i^2 = |grad u_t|_g^2.  On jets,

    Q(r) = r0 * r1 - sum_{i>=2} r_i^2,      G(r) = log Q(r).

The ellipticity cone is {r0 > 0, r1 > 0, Q(r) > 0}; G is concave there,
which is what the maximum-principle machinery leans on.  All functions
accept a single jet of shape (n+2,) or a batch (..., n+2).
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import ConeViolationError

#: default absolute floor used by admissibility predicates
CONE_FLOOR = 1e-12


class Admissibility(NamedTuple):
    ok: bool | np.ndarray
    margin: float | np.ndarray


def q_value(r: np.ndarray) -> np.ndarray | float:
    """Q(r) = r0 r1 - sum_{i>=2} r_i^2."""
    r = np.asarray(r, dtype=float)
    q = r[..., 0] * r[..., 1] - np.sum(r[..., 2:] ** 2, axis=-1)
    return q if q.ndim else float(q)


def q_grad(r: np.ndarray) -> np.ndarray:
    """Partials of Q: (r1, r0, -2 r2, ..., -2 r_{n+1})."""
    r = np.asarray(r, dtype=float)
    g = np.empty_like(r)
    g[..., 0] = r[..., 1]
    g[..., 1] = r[..., 0]
    g[..., 2:] = -2.0 * r[..., 2:]
    return g


def q_hess(n: int) -> np.ndarray:
    """Constant Hessian of Q for spatial dimension n, shape (n+2, n+2)."""
    m = n + 2
    h = np.zeros((m, m))
    h[0, 1] = h[1, 0] = 1.0
    for i in range(2, m):
        h[i, i] = -2.0
    return h


def _require_cone(q):
    bad = q <= 0.0
    if np.any(bad):
        raise ConeViolationError(f"jet outside the cone: min Q = {np.min(q):.6g}")


def g_value(r: np.ndarray) -> np.ndarray | float:
    """G(r) = log Q(r); raises ConeViolationError if Q <= 0."""
    q = np.asarray(q_value(r))
    _require_cone(q)
    out = np.log(q)
    return out if out.ndim else float(out)


def g_grad(r: np.ndarray) -> np.ndarray:
    """Gradient of G: Q^i / Q."""
    q = np.asarray(q_value(r))
    _require_cone(q)
    return q_grad(r) / q[..., None]


def g_hess(r: np.ndarray) -> np.ndarray:
    """Hessian of G: Q^{ij}/Q - Q^i Q^j / Q^2, shape (..., n+2, n+2)."""
    r = np.asarray(r, dtype=float)
    n = r.shape[-1] - 2
    q = np.asarray(q_value(r))
    _require_cone(q)
    dq = q_grad(r)
    outer = dq[..., :, None] * dq[..., None, :]
    return q_hess(n) / q[..., None, None] - outer / (q ** 2)[..., None, None]


def admissibility_margin(r: np.ndarray) -> np.ndarray | float:
    """min(r0, r1, Q(r)); positive iff the jet lies in the ellipticity cone."""
    r = np.asarray(r, dtype=float)
    q = np.asarray(q_value(r))
    m = np.minimum(np.minimum(r[..., 0], r[..., 1]), q)
    return m if m.ndim else float(m)


def is_admissible(r: np.ndarray, floor: float = 0.0) -> Admissibility:
    """Cone membership with its margin; `floor` shifts the strictness."""
    m = admissibility_margin(r)
    ok = m > floor
    if np.ndim(m) == 0:
        return Admissibility(bool(ok), float(m))
    return Admissibility(ok, m)


def sample_admissible(n: int, samples: int, seed: int = 1234,
                      scale: float = 10.0, disk_fill: float = 0.99) -> np.ndarray:
    """Random admissible jets, shape (samples, n+2).

    r0, r1 ~ U(0, scale]; the mixed entries are uniform in the ball
    sum r_i^2 < disk_fill * r0 * r1, so every sample sits strictly inside
    the cone.  Fixed seed => reproducible scans.
    """
    rng = np.random.default_rng(seed)
    r = np.empty((samples, n + 2))
    r[:, 0] = scale * (1.0 - rng.random(samples))
    r[:, 1] = scale * (1.0 - rng.random(samples))
    direction = rng.standard_normal((samples, n))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = np.sqrt(disk_fill * r[:, 0] * r[:, 1]) * rng.random(samples) ** (1.0 / n)
    r[:, 2:] = direction * radius[:, None]
    return r
