"""Numerical geodesics in the space of volume forms.

Solver and verification harness for the fully nonlinear equation
u_tt (lap u - b |grad u|^2 + a) - |grad u_t|^2 = f on flat circles and
conformally flat 2-tori, with an epsilon-continuation Newton scheme and
oracles for the calculus identities behind the uniform second-derivative
bound.
"""

from .backend import BACKEND_NAME
from .diagnostics import (LadderReport, RungRecord, energy_and_speed, h_quantity,
                          lambda1, sup_norms, third_derivative_proxy)
from .errors import (ConeViolationError, ConfigurationError, EllipticityLossError,
                     GridError, InadmissibleDataError, LinearSolveError, VolgeoError)
from .fcheck import blocki_bound_check, f_admissibility, gradient_growth_check
from .geometry import (Field, Metric, SpaceTimeGrid, SpatialField, covariant_hessian,
                       gradient_g, grad_norm_sq, integrate, laplace_beltrami,
                       time_derivatives)
from .pde import (ProblemData, SparseSystem, apply_dq, assemble_dq, b_u, jet_margins,
                  jets, residual, solve_linear)
from .qalgebra import (g_grad, g_hess, g_value, is_admissible, q_value,
                       sample_admissible)
from .solver import SolveResult, SolverConfig, epsilon_ladder, initial_path, newton_solve

__version__ = "0.1.0"
