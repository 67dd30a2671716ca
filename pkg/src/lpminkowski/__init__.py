"""Numerical tools for the planar L_p-Minkowski equation ``u'' + u = f u^(p-1)``.

Modules
-------
periodic, support_geometry
    Periodic functions on the circle and convex bodies given by support
    functions.
lp_ode
    Newton collocation and homotopy continuation solvers.
energy
    First-integral analysis for ``f = 1``: period integral, its derivative,
    symmetric solutions and their count.
obstruction
    Sign-definite kernels that rule out solutions for ``p <= -2``.
constructions
    Explicit families whose minimum tends to zero for ``0 < p < 2``.
cli
    The ``lpminkowski`` command.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BoundViolation,
    CompatibilityError,
    DomainError,
    GluingFailure,
    InconclusiveSign,
    LeftPositiveCone,
    LpMinkowskiError,
    NoConvergence,
    NonPositiveInput,
    NotConvex,
    PathFailure,
    PoleEvaluation,
    QuadratureFailure,
    SingularJacobian,
    SolverError,
)
from .periodic import PeriodicFunction  # noqa: E402
from .support_geometry import SupportBody  # noqa: E402
from .lp_ode import ProblemSpec, SolveReport, continuation_solve, newton_solve  # noqa: E402
from .energy import (  # noqa: E402
    EnergyContext,
    H_integral,
    count_solutions,
    dH_dm,
    reconstruct_symmetric_solution,
)
from .obstruction import certify_nonexistence, construct_counterexample, kernel_Kf  # noqa: E402
from .constructions import build_family_member, solve_and_compare  # noqa: E402
from .funcspec import parse_function  # noqa: E402

__all__ = [
    "__version__",
    "BoundViolation", "CompatibilityError", "DomainError", "GluingFailure",
    "InconclusiveSign", "LeftPositiveCone", "LpMinkowskiError", "NoConvergence",
    "NonPositiveInput", "NotConvex", "PathFailure", "PoleEvaluation",
    "QuadratureFailure", "SingularJacobian", "SolverError",
    "PeriodicFunction", "SupportBody", "ProblemSpec", "SolveReport",
    "newton_solve", "continuation_solve",
    "EnergyContext", "H_integral", "dH_dm", "count_solutions",
    "reconstruct_symmetric_solution",
    "kernel_Kf", "construct_counterexample", "certify_nonexistence",
    "build_family_member", "solve_and_compare", "parse_function",
]
