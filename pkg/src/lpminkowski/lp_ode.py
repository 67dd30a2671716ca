"""Periodic solver for ``u'' + u = f u^(p-1)``.

Newton collocation on the uniform grid, homotopy continuation from the
constant solution of ``u'' + u = 1``, and the post-solve diagnostics
(integral identities, first integral, Harnack-type ratios).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .errors import (
    DomainError,
    LeftPositiveCone,
    NoConvergence,
    NonPositiveInput,
    PathFailure,
    SingularJacobian,
    SolverError,
)
from .support_geometry import SupportBody
from .periodic import DEFAULT_N, PeriodicFunction, check_grid_size, diff_matrix, grid, trapezoid

__all__ = [
    "ProblemSpec",
    "SolveReport",
    "residual",
    "newton_solve",
    "continuation_solve",
    "linearization_spectrum_check",
    "solution_diagnostics",
]

DEFAULT_TOL = 1e-10
DEFAULT_STEPS = 64
MIN_STEP = 1e-6
MAX_ITER = 50
RCOND_MIN = 1e-12
ARMIJO_C = 1e-4
MIN_DAMPING = 2.0**-12
POSITIVITY_FACTOR = 0.5


@dataclass(frozen=True)
class ProblemSpec:
    """Exponent ``p`` and right-hand side ``f`` of ``u'' + u = f u^(p-1)``.

    ``signed_power`` exists so configurations can state the convention
    explicitly; the solver works on strictly positive iterates and rejects
    ``signed_power=True``.
    """

    p: float
    f: PeriodicFunction
    signed_power: bool = False

    def __post_init__(self):
        if not math.isfinite(float(self.p)):
            raise DomainError(f"exponent p must be finite, got {self.p!r}")
        object.__setattr__(self, "p", float(self.p))
        if self.signed_power:
            raise DomainError("the periodic solver only evaluates ordinary powers of positive u")

    def f_values(self, n):
        """Samples of ``f`` on the ``n``-point grid, checked positive."""
        fv = self.f.sample(n)
        if not np.min(fv) > 0:
            raise DomainError(f"f must be positive on the grid (min f = {np.min(fv):.3e})")
        return fv


@dataclass
class SolveReport:
    """Outcome of a solve together with its diagnostics."""

    spec: ProblemSpec
    status: str
    u: np.ndarray
    residual_norm: float
    iterations: int
    history: list
    grid_n: int
    method: str
    tol: float
    solution: Optional[SupportBody] = None
    # |int f u^(p-1) - int u| / int u; zero on exact solutions
    mass_balance: float = float("nan")
    # int K_f u^p, only for p <= -2
    kernel_identity: Optional[float] = None
    first_integral_spread: Optional[float] = None
    harnack: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)
    nullspace_dim: int = 0
    reference_deviation: Optional[float] = None

    @property
    def converged(self):
        return self.status == "converged"

    @property
    def theta(self):
        return grid(self.grid_n)

    def to_dict(self):
        return {
            "p": self.spec.p,
            "status": self.status,
            "grid_n": self.grid_n,
            "method": self.method,
            "tol": self.tol,
            "residual_norm": self.residual_norm,
            "iterations": self.iterations,
            "history": [float(r) for r in self.history],
            "mass_balance": self.mass_balance,
            "kernel_identity": self.kernel_identity,
            "first_integral_spread": self.first_integral_spread,
            "harnack": self.harnack,
            "nullspace_dim": self.nullspace_dim,
            "reference_deviation": self.reference_deviation,
            "trace": [list(row) for row in self.trace],
            "u_min": float(np.min(self.u)),
            "u_max": float(np.max(self.u)),
            "solution": self.u.tolist(),
        }


def _grid_size(u: PeriodicFunction, n=None):
    if n is not None:
        return check_grid_size(n)
    return u.n if u.n is not None else DEFAULT_N


def residual(u: PeriodicFunction, spec: ProblemSpec, n=None):
    """Grid samples of ``u'' + u - f u^(p-1)`` as a :class:`PeriodicFunction`.

    Raises
    ------
    NonPositiveInput
        If ``min u <= 0`` on the grid.
    """
    n = _grid_size(u, n)
    v = u.sample(n)
    if not np.min(v) > 0:
        raise NonPositiveInput(f"u must be positive on the grid (min u = {np.min(v):.3e})")
    r = u.sample(n, 2) + v - spec.f.sample(n) * v ** (spec.p - 1.0)
    return PeriodicFunction.from_samples(r)


def _rcond(lu_piv, anorm):
    lu, _ = lu_piv
    rc, info = lapack.dgecon(lu, anorm, norm="1")
    return float(rc) if info == 0 else 0.0


class _Collocation:
    """The discrete system ``D2 u + u - f u^(p-1) = 0`` on a fixed grid."""

    def __init__(self, p, fv, d2):
        self.p = float(p)
        self.fv = np.asarray(fv, dtype=float)
        self.d2 = d2
        self.eye = np.eye(d2.shape[0])

    def residual(self, u):
        return self.d2 @ u + u - self.fv * u ** (self.p - 1.0)

    def jacobian(self, u):
        return self.d2 + self.eye - np.diag((self.p - 1.0) * self.fv * u ** (self.p - 2.0))

    def newton(self, u0, tol, max_iter=MAX_ITER):
        """Damped Newton from ``u0``; returns ``(u, history)``."""
        u = np.array(u0, dtype=float)
        if not np.min(u) > 0:
            raise NonPositiveInput(f"initial guess not positive (min = {np.min(u):.3e})")
        history = []
        r = self.residual(u)
        for it in range(max_iter + 1):
            norm = float(np.max(np.abs(r)))
            history.append(norm)
            jac = self.jacobian(u)
            lu_piv = sla.lu_factor(jac, check_finite=False)
            rc = _rcond(lu_piv, np.linalg.norm(jac, 1))
            if rc < RCOND_MIN:
                raise SingularJacobian(
                    f"linearised operator is numerically singular (rcond = {rc:.2e})",
                    u=u, history=history, rcond=rc)
            if norm <= tol:
                return u, history
            if it == max_iter:
                break
            step = -sla.lu_solve(lu_piv, r, check_finite=False)
            u, r = self._damped_update(u, step, r, norm, history)
        raise NoConvergence(f"no convergence after {max_iter} iterations "
                            f"(residual {history[-1]:.3e})", u=u, history=history)

    def _damped_update(self, u, step, r, norm, history):
        floor = POSITIVITY_FACTOR * np.min(u)
        lam = 1.0
        best = None
        while lam >= MIN_DAMPING:
            trial = u + lam * step
            if np.min(trial) > floor:
                rt = self.residual(trial)
                nt = float(np.max(np.abs(rt)))
                if nt <= (1.0 - ARMIJO_C * lam) * norm:
                    return trial, rt
                if np.isfinite(nt) and (best is None or nt < best[2]):
                    best = (trial, rt, nt)
            lam *= 0.5
        if best is None:
            raise LeftPositiveCone("damping could not keep the iterate positive",
                                   u=u, history=history)
        # no sufficient decrease: take the least-residual positive trial
        return best[0], best[1]


def _lstsq_linear(fv, d2, u0):
    """Least-squares solve of ``D2 u + u = f`` closest to ``u0``.

    The minimum-norm correction to ``u0`` is orthogonal to the kernel, so
    ``u0 + correction`` is the member of the solution set nearest ``u0``.
    A correction that does not lower the residual (``u0`` already solves
    the system to roundoff) is discarded.
    """
    op = d2 + np.eye(d2.shape[0])
    uu, s, vt = np.linalg.svd(op)
    keep = s > s[0] * 1e-10
    r = fv - (d2 @ u0 + u0)
    u = u0 + vt[keep].T @ ((uu[:, keep].T @ r) / s[keep])
    if np.max(np.abs(fv - (d2 @ u + u))) >= np.max(np.abs(r)):
        u = np.array(u0, dtype=float)
    return u, int((~keep).sum())


def newton_solve(spec: ProblemSpec, init: PeriodicFunction, tol=DEFAULT_TOL, *,
                 n=None, method="spectral", max_iter=MAX_ITER, degenerate="raise"):
    """Solve the collocation system by damped Newton starting from ``init``.

    Parameters
    ----------
    spec : ProblemSpec
    init : PeriodicFunction
        Positive starting guess; sampled on the ``n``-point grid.
    tol : float
        Max-norm residual target.
    n : int, optional
        Grid size; defaults to the grid of ``init`` or 256.
    method : {"spectral", "fd2", "fd4"}
        Differentiation used for ``u''``.
    degenerate : {"raise", "lstsq"}
        At ``p = 1`` the operator is linear with a two-dimensional kernel.
        ``"raise"`` lets Newton report :class:`SingularJacobian`;
        ``"lstsq"`` solves ``u'' + u = f`` in the least-squares sense and picks
        the member of the solution family closest to ``init``.

    Raises
    ------
    SingularJacobian, NoConvergence, LeftPositiveCone
    """
    n = _grid_size(init, n)
    fv = spec.f_values(n)
    d2 = diff_matrix(n, 2, method)
    u0 = init.sample(n)
    if degenerate not in ("raise", "lstsq"):
        raise DomainError(f"unknown degenerate mode {degenerate!r}")
    if degenerate == "lstsq" and spec.p == 1.0:
        u, dim = _lstsq_linear(fv, d2, u0)
        if not np.min(u) > 0:
            raise LeftPositiveCone("least-squares solution is not positive", u=u, history=[])
        norm = float(np.max(np.abs(d2 @ u + u - fv)))
        report = _finish(spec, u, [norm], n, method, tol, d2)
        report.nullspace_dim = dim
        return report
    system = _Collocation(spec.p, fv, d2)
    u, history = system.newton(u0, tol, max_iter)
    return _finish(spec, u, history, n, method, tol, d2)


def _finish(spec, u, history, n, method, tol, d2):
    status = "converged" if history[-1] <= tol else "not_converged"
    report = SolveReport(spec=spec, status=status, u=u, residual_norm=history[-1],
                         iterations=len(history) - 1, history=history, grid_n=n,
                         method=method, tol=tol)
    solution_diagnostics(report, d2)
    return report


def solution_diagnostics(report: SolveReport, d2=None):
    """Fill the identity, first-integral and Harnack fields of ``report``."""
    from .obstruction import kernel_Kf

    spec, u, n = report.spec, report.u, report.grid_n
    p = spec.p
    fv = spec.f.sample(n)
    if d2 is None:
        d2 = diff_matrix(n, 2, report.method)
    body = PeriodicFunction.from_samples(u, method="fd4" if report.method == "fd4" else "spectral")
    try:
        report.solution = SupportBody(body, n)
    except DomainError:
        report.solution = None
        if report.status == "converged":
            report.status = "not_convex"

    int_u = trapezoid(u)
    report.mass_balance = float(abs(trapezoid(fv * u ** (p - 1.0)) - int_u) / int_u)
    if p <= -2:
        kf = kernel_Kf(spec.f, p).sample(n)
        report.kernel_identity = float(trapezoid(kf * u**p))
    if np.allclose(fv, 1.0, rtol=0, atol=1e-14):
        du = body.sample(n, 1)
        pot = 2.0 * np.log(u) if p == 0 else (2.0 / p) * u**p
        e = du**2 + u**2 - pot
        report.first_integral_spread = float(np.max(e) - np.min(e))

    u_min, u_max = float(np.min(u)), float(np.max(u))
    h = {"u_min": u_min, "u_max": u_max}
    if p < 0:
        h["max2_over_min_p"] = u_max**2 / u_min**p
    elif p == 0 and u_min < 1:
        h["max2_over_log_inv_min"] = u_max**2 / math.log(1.0 / u_min)
    w_minus = float(np.min(u + np.roll(u, -n // 2)))
    w_plus = float(np.max(u + np.roll(u, -n // 2)))
    h["w_minus"], h["w_plus"] = w_minus, w_plus
    h["width_ratio"] = w_plus / w_minus
    report.harnack = h
    return report


def continuation_solve(p, f: PeriodicFunction, steps=DEFAULT_STEPS, *, n=DEFAULT_N,
                       tol=DEFAULT_TOL, method="spectral", min_step=MIN_STEP,
                       max_iter=MAX_ITER):
    """Track ``u'' + u = f_t u^(p_t - 1)`` from ``t = 0`` to ``t = 1``.

    ``p_t = t p`` and ``f_t = t f + 1 - t``; the path starts at ``u = 1``.
    Steps are uniform (``1/steps``); a failed Newton solve halves the step, a
    success lets it grow back.  The predictor extrapolates the last two
    accepted solutions linearly in ``t``.

    Raises
    ------
    PathFailure
        If the step falls below ``min_step``.  ``info`` holds ``last_t``, the
        last accepted solution and the trace.
    """
    n = check_grid_size(n)
    p = float(p)
    fv = f.sample(n)
    if not np.min(fv) > 0:
        raise DomainError(f"f must be positive on the grid (min f = {np.min(fv):.3e})")
    d2 = diff_matrix(n, 2, method)
    base = 1.0 / int(steps)
    t, dt = 0.0, base
    u = np.ones(n)
    prev = None
    trace = [(0.0, 0, 1.0)]
    history = [0.0]
    while t < 1.0:
        t_next = min(1.0, t + dt)
        guess = u
        if prev is not None:
            t_prev, u_prev = prev
            guess = u + (u - u_prev) * (t_next - t) / (t - t_prev)
            if not np.min(guess) > POSITIVITY_FACTOR * np.min(u):
                guess = u
        system = _Collocation(t_next * p, t_next * fv + (1.0 - t_next), d2)
        try:
            u_new, history = system.newton(guess, tol, max_iter)
        except SolverError as exc:
            dt *= 0.5
            if dt < min_step:
                raise PathFailure(
                    f"continuation step underflow at t = {t:.6g} "
                    f"({type(exc).__name__}: {exc})",
                    last_t=t, u=u, trace=trace, cause=type(exc).__name__)
            continue
        prev = (t, u)
        t, u = t_next, u_new
        trace.append((t, len(history) - 1, float(np.min(u))))
        dt = min(2.0 * dt, base)
    spec = ProblemSpec(p, f)
    report = _finish(spec, u, history, n, method, tol, d2)
    report.trace = trace
    return report


def linearization_spectrum_check(u: PeriodicFunction, spec: ProblemSpec, *, n=None,
                                 method="spectral"):
    """Smallest singular value of ``phi -> phi'' + phi - (p-1) f u^(p-2) phi``."""
    n = _grid_size(u, n)
    v = u.sample(n)
    if not np.min(v) > 0:
        raise NonPositiveInput(f"u must be positive on the grid (min u = {np.min(v):.3e})")
    system = _Collocation(spec.p, spec.f.sample(n), diff_matrix(n, 2, method))
    return float(np.linalg.svd(system.jacobian(v), compute_uv=False)[-1])
