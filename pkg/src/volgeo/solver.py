"""Damped Newton iteration inside the admissibility cone and the epsilon ladder.

The ladder is the continuation scheme: solve at target level eps_0, then
warm-start each smaller level eps_k = eps_0 * ratio^k down to eps_min,
recording the diagnostics bundle per rung.  For field targets the level
is the additive shift delta (the approximation route for degenerate
right-hand sides); for constant targets it is epsilon itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import diagnostics, pde
from .errors import ConfigurationError, InadmissibleDataError, LinearSolveError
from .geometry import Field
from .pde import ProblemData


@dataclass
class SolverConfig:
    newton_tol: float = 1e-10          # on ||residual||_inf
    max_newton_iters: int = 50
    max_halvings: int = 30             # backtracking factor 1/2
    admissibility_floor: float = 1e-12
    linear_tol: float = 1e-12
    eps0: float = 1e-1
    eps_ratio: float = 0.1
    eps_min: float = 1e-4
    bulge: float | None = None         # default max(1, sup|u1 - u0|)

    def __post_init__(self):
        for name in ("newton_tol", "admissibility_floor", "linear_tol",
                     "eps0", "eps_min"):
            if not getattr(self, name) > 0.0:
                raise ConfigurationError(f"{name} must be positive")
        if not 0.0 < self.eps_ratio < 1.0:
            raise ConfigurationError("eps_ratio must lie in (0, 1)")
        if self.bulge is not None and not self.bulge > 0.0:
            raise ConfigurationError("bulge must be positive")

    def ladder_levels(self) -> list:
        levels = []
        eps = self.eps0
        while eps >= self.eps_min * (1.0 - 1e-9):
            levels.append(eps)
            eps *= self.eps_ratio
        return levels


@dataclass
class SolveResult:
    u: Field
    iterations: int
    residual_norm: float
    margins: tuple                      # (min u_tt, min B_u, min Q)
    converged: bool
    residual_history: list = dc_field(default_factory=list)
    message: str = ""


def default_bulge(p: ProblemData) -> float:
    return max(1.0, float(np.max(np.abs(p.u1.values - p.u0.values))))


def initial_path(p: ProblemData, lam: float) -> Field:
    """Admissible connector u = (1-t) u0 + t u1 - lam t (1-t).

    The bulge is x-independent, so u_tt = 2 lam > 0 everywhere and B_u
    stays above the convex combination of the endpoint B's; both endpoint
    data must be admissible (checked, rejecting with the node location).
    """
    if not lam > 0.0:
        raise ConfigurationError(f"bulge must be positive, got {lam}")
    pde.check_admissible_endpoints(p)
    t = p.grid.times().reshape((-1,) + (1,) * p.grid.dim)
    vals = (1.0 - t) * p.u0.values + t * p.u1.values - lam * t * (1.0 - t)
    return Field(p.grid, vals)


def newton_solve(p: ProblemData, u_init: Field, cfg: SolverConfig | None = None) -> SolveResult:
    """Damped Newton with a cone-guarding monotone line search.

    Accepts u + s*psi for the largest s in {1, 1/2, 1/4, ...} that keeps
    every interior jet strictly inside the cone (margin above the
    configured floor) and reduces ||residual||_inf.  Non-convergence is
    reported in the result (best iterate retained), not raised.
    """
    cfg = cfg or SolverConfig()
    if not (np.array_equal(u_init.values[0], p.u0.values)
            and np.array_equal(u_init.values[-1], p.u1.values)):
        raise InadmissibleDataError("u_init does not match the Dirichlet layers")
    u = u_init.copy()
    margins = pde.jet_margins(u, p)
    if min(margins) <= cfg.admissibility_floor:
        raise InadmissibleDataError(
            f"initial guess leaves the admissibility cone (margin {min(margins):.3e})")

    res_norm = float(np.max(np.abs(pde.residual(u, p))))
    history = [res_norm]
    iterations = 0
    while res_norm > cfg.newton_tol and iterations < cfg.max_newton_iters:
        try:
            system = pde.assemble_dq(u, p)
            psi = pde.solve_linear(system, cfg.linear_tol)
        except LinearSolveError as exc:
            return SolveResult(u, iterations, res_norm, margins, False,
                               history, f"linear solver breakdown: {exc}")
        s = 1.0
        accepted = False
        for _ in range(cfg.max_halvings + 1):
            trial = u.copy()
            trial.values[1:-1] += s * psi
            trial_margins = pde.jet_margins(trial, p)
            if min(trial_margins) > cfg.admissibility_floor:
                trial_norm = float(np.max(np.abs(pde.residual(trial, p))))
                if trial_norm < res_norm:
                    u, margins, res_norm = trial, trial_margins, trial_norm
                    accepted = True
                    break
            s *= 0.5
        if not accepted:
            return SolveResult(u, iterations, res_norm, margins, False, history,
                               "line search stalled without an acceptable step")
        iterations += 1
        history.append(res_norm)

    converged = res_norm <= cfg.newton_tol and min(margins) > cfg.admissibility_floor
    msg = "" if converged else f"no convergence in {iterations} iterations"
    return SolveResult(u, iterations, res_norm, margins, converged, history, msg)


def epsilon_ladder(p: ProblemData, cfg: SolverConfig | None = None) -> "diagnostics.LadderReport":
    """Warm-started continuation over decreasing target levels.

    Rung k solves at level eps0 * ratio^k starting from rung k-1's
    solution.  A failed first rung raises ConfigurationError (pick a
    larger eps0 or bulge); a later failure aborts gracefully and the
    report carries the completed rungs only.
    """
    cfg = cfg or SolverConfig()
    levels = cfg.ladder_levels()
    if not levels:
        raise ConfigurationError("empty ladder: eps0 < eps_min")
    lam = cfg.bulge if cfg.bulge is not None else default_bulge(p)
    u = initial_path(p, lam)
    rungs = []
    for k, level in enumerate(levels):
        pk = p.with_level(level)
        result = newton_solve(pk, u, cfg)
        if not result.converged:
            if k == 0:
                raise ConfigurationError(
                    f"first rung (level {level:.3e}) failed: {result.message}; "
                    f"try a larger eps0 or bulge")
            return diagnostics.LadderReport(
                rungs=rungs, completed=False,
                failure=f"rung {k} (level {level:.3e}) failed: {result.message}")
        u = result.u
        rungs.append(diagnostics.collect_rung(u, pk, level, result))
    return diagnostics.LadderReport(rungs=rungs, completed=True, failure=None)
