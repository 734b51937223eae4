"""Named analytic families for endpoints, conformal exponents, and targets.

These are the built-in data generators the CLI config refers to, so runs
(and the acceptance suite) need no external files.  Specs are small
dicts: {"family": "sine", "amplitude": 0.02, "frequency": 1}, etc.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError
from .geometry import Field, SpaceTimeGrid, SpatialField


def _tau(grid: SpaceTimeGrid):
    """Angle coordinates 2 pi x / L per direction, broadcastable."""
    return tuple(2.0 * np.pi * c / grid.length for c in grid.coords())


def spatial_family(spec: dict, grid: SpaceTimeGrid) -> SpatialField:
    """Build a spatial field from a family spec.

    Families: zero; constant(value); sine(amplitude, frequency, axis);
    bump(center, width, height) -- a periodic Gaussian bump; file(path).
    """
    fam = spec.get("family", spec.get("kind"))
    if fam in (None, "zero"):
        return SpatialField(grid, np.zeros(grid.spatial_shape))
    if fam == "constant":
        return SpatialField(grid, np.full(grid.spatial_shape, float(spec["value"])))
    if fam == "sine":
        amp = float(spec.get("amplitude", 0.02))
        freq = int(spec.get("frequency", 1))
        axis = spec.get("axis", "x")
        taus = _tau(grid)
        if grid.dim == 1 or axis == "x":
            vals = amp * np.sin(freq * taus[0])
        elif axis == "y":
            vals = amp * np.sin(freq * taus[1])
        else:  # "both": product pattern
            vals = amp * np.sin(freq * taus[0]) * np.sin(freq * taus[1])
        return SpatialField(grid, np.broadcast_to(vals, grid.spatial_shape).copy())
    if fam == "bump":
        center = float(spec.get("center", 0.5)) * grid.length
        width = float(spec.get("width", 0.1)) * grid.length
        height = float(spec.get("height", 0.1))
        vals = np.ones(grid.spatial_shape)
        for c in grid.coords():
            d = np.abs(c - center)
            d = np.minimum(d, grid.length - d)          # torus distance
            vals = vals * np.exp(-((d / width) ** 2))
        return SpatialField(grid, height * np.broadcast_to(vals, grid.spatial_shape).copy())
    if fam == "file":
        from .io import read_spatial_field
        return read_spatial_field(spec["path"], grid)
    raise ConfigurationError(f"unknown spatial family {fam!r}")


def phi_family(spec: dict | str | None, grid: SpaceTimeGrid) -> SpatialField | None:
    """Conformal exponent: 'flat' (None) or cos-bump(amplitude, frequency)."""
    if spec is None or spec == "flat":
        return None
    if isinstance(spec, str):
        raise ConfigurationError(f"unknown phi spec {spec!r}")
    kind = spec.get("kind", spec.get("family"))
    if kind == "flat":
        return None
    if kind == "cos-bump":
        amp = float(spec.get("amplitude", 0.1))
        freq = int(spec.get("frequency", 1))
        axis = spec.get("axis", "x")
        taus = _tau(grid)
        vals = amp * np.cos(freq * taus[0])
        if grid.dim == 2 and axis == "both":
            vals = amp * np.cos(freq * taus[0]) * np.cos(freq * taus[1])
        return SpatialField(grid, np.broadcast_to(vals, grid.spatial_shape).copy())
    raise ConfigurationError(f"unknown phi spec {spec!r}")


def target_family(spec: dict, grid: SpaceTimeGrid):
    """Target right-hand side: constant epsilon or a nonnegative field.

    Families: constant(value) -> float; cos-squared(amplitude, frequency)
    -> the degenerate family amplitude * (1 - cos(f * 2 pi x / L))^2,
    t-independent; file(path) -> Field.
    """
    kind = spec.get("kind", spec.get("family"))
    if kind == "constant":
        return float(spec["value"])
    if kind == "cos-squared":
        amp = float(spec.get("amplitude", 1.0))
        freq = int(spec.get("frequency", 1))
        taus = _tau(grid)
        vals = amp * (1.0 - np.cos(freq * taus[0])) ** 2
        full = np.broadcast_to(vals, grid.shape).copy()
        return Field(grid, full)
    if kind == "file":
        from .io import read_field
        return read_field(spec["path"], grid)
    raise ConfigurationError(f"unknown target spec {spec!r}")


# ---------------------------------------------------------------------------
# manufactured states (closed-form fields with known jets)
# ---------------------------------------------------------------------------

def manufactured_state(grid: SpaceTimeGrid, amplitude: float = 0.01):
    """The documented manufactured pair for dim 1, flat, a = 1, b = 0.

    u*(x, t) = t^2/2 + amplitude sin(2 pi x / L) cos(pi t), together with
    its exact right-hand side f* = u*_tt (1 + u*_xx) - (u*_tx)^2 evaluated
    analytically on the grid (min f* is about 0.5 at the default
    amplitude).  Returns (u, f) as Fields.
    """
    if grid.dim != 1:
        raise ConfigurationError("manufactured_state is the dim-1 family")
    (x,) = grid.coords()
    t = grid.times()[:, None]
    k = 2.0 * np.pi / grid.length
    s = np.sin(k * x)
    c = np.cos(k * x)
    u = 0.5 * t ** 2 + amplitude * s * np.cos(np.pi * t)
    utt = 1.0 - amplitude * np.pi ** 2 * s * np.cos(np.pi * t)
    uxx = -amplitude * k ** 2 * s * np.cos(np.pi * t)
    utx = -amplitude * np.pi * k * c * np.sin(np.pi * t)
    f = utt * (1.0 + uxx) - utx ** 2
    return Field(grid, u), Field(grid, f)


def dirichlet_probe(grid: SpaceTimeGrid) -> Field:
    """sin(2 pi x / L) sin(pi t) with the Dirichlet layers zeroed exactly.

    The standard direction field for linearization probes (psi must vanish
    identically on layers 0 and nt-1, not just to rounding).
    """
    k = 2.0 * np.pi / grid.length
    sx = np.sin(k * grid.coords()[0])
    if grid.dim == 2:
        sx = sx * np.cos(k * grid.coords()[1])
    t = grid.times().reshape((-1,) + (1,) * grid.dim)
    vals = np.broadcast_to(sx * np.sin(np.pi * t), grid.shape).copy()
    vals[0] = 0.0
    vals[-1] = 0.0
    return Field(grid, vals)


def manufactured_state_2d(grid: SpaceTimeGrid, amplitude: float = 0.01) -> Field:
    """Smooth dim-2 probe with nonzero gradient, mixed derivatives, and u_tt.

    u(x, y, t) = t^2/2 + amplitude sin(2 pi x / L) cos(2 pi y / L) cos(pi t);
    used by the identity checks, which define f := Q(u) themselves.
    """
    if grid.dim != 2:
        raise ConfigurationError("manufactured_state_2d is the dim-2 family")
    x, y = grid.coords()
    t = grid.times()[:, None, None]
    k = 2.0 * np.pi / grid.length
    u = 0.5 * t ** 2 + amplitude * np.sin(k * x) * np.cos(k * y) * np.cos(np.pi * t)
    return Field(grid, u)
