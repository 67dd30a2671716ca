"""Exception hierarchy shared by every module of the package."""


class LpMinkowskiError(Exception):
    """Base class for all errors raised by :mod:`lpminkowski`."""


class DomainError(LpMinkowskiError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class NonPositiveInput(DomainError):
    """A function that must be strictly positive is not."""


class NotConvex(DomainError):
    """A support function fails the convexity test ``u'' + u > 0``."""


class PoleEvaluation(DomainError):
    """Evaluation requested too close to a pole of a singular function."""


class SolverError(LpMinkowskiError):
    """Base class for failures of the periodic solvers.

    ``info`` carries whatever partial state the solver had when it stopped
    (last iterate, residual history, last good continuation parameter).
    """

    def __init__(self, message, **info):
        super().__init__(message)
        self.info = info


class SingularJacobian(SolverError):
    """The linearised operator is numerically rank deficient."""


class NoConvergence(SolverError):
    """Newton iteration did not reach the tolerance."""


class LeftPositiveCone(SolverError):
    """Damping could not keep the iterate strictly positive."""


class PathFailure(SolverError):
    """Continuation step size underflowed before reaching ``t = 1``."""


class QuadratureFailure(LpMinkowskiError):
    """Adaptive quadrature could not meet its tolerance."""


class CompatibilityError(LpMinkowskiError):
    """The closing condition ``H(m) = pi / kappa`` is not satisfied."""


class InconclusiveSign(LpMinkowskiError):
    """The obstruction kernel changes sign, so no conclusion can be drawn."""


class GluingFailure(LpMinkowskiError):
    """A piecewise construction could not satisfy its matching conditions."""


class BoundViolation(LpMinkowskiError):
    """A parameter-free a-priori bound is violated by a claimed solution."""
