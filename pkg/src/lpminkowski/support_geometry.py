"""Convex bodies given by their support functions in the plane."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NonPositiveInput, NotConvex
from .periodic import DEFAULT_N, PeriodicFunction, check_grid_size, grid, trapezoid

__all__ = [
    "SupportBody",
    "boundary_point",
    "radial_length",
    "widths",
    "area",
    "arc_inequality_check",
    "monotone_arcs",
]

OVERSAMPLE = 4
PLATEAU_TOL = 1e-10


@dataclass(frozen=True)
class SupportBody:
    """A support function certified positive and uniformly convex on a grid.

    Certification evaluates ``u`` and ``u'' + u`` on the ``n``-point grid and
    again on a grid ``OVERSAMPLE`` times finer; both minima must be positive.
    """

    u: PeriodicFunction
    n: int = DEFAULT_N
    convexity_margin: float = field(init=False)
    positivity_margin: float = field(init=False)

    def __post_init__(self):
        n = check_grid_size(self.n)
        margins = []
        for m in (n, OVERSAMPLE * n):
            u0 = self.u.sample(m, 0) if m != n else self.u.sample(n, 0)
            u2 = self.u.sample(m, 2)
            margins.append((float(np.min(u0)), float(np.min(u2 + u0))))
        pos = min(a for a, _ in margins)
        conv = min(b for _, b in margins)
        object.__setattr__(self, "positivity_margin", pos)
        object.__setattr__(self, "convexity_margin", conv)
        if not pos > 0:
            raise NonPositiveInput(f"support function not positive (min u = {pos:.3e})")
        if not conv > 0:
            raise NotConvex(f"u'' + u not positive (min = {conv:.3e})")

    @property
    def theta(self):
        return grid(self.n)

    def values(self, order=0):
        return self.u.sample(self.n, order)

    @property
    def u_min(self):
        return float(np.min(self.values()))

    @property
    def u_max(self):
        return float(np.max(self.values()))


def boundary_point(b: SupportBody, theta):
    """Boundary point with outer normal angle ``theta``.

    ``r = u (cos, sin) + u' (-sin, cos)``; returns shape ``(..., 2)``.
    """
    u, du = b.u(theta, 0), b.u(theta, 1)
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([u * c - du * s, u * s + du * c], axis=-1)


def radial_length(b: SupportBody, theta):
    """Distance from the origin to the boundary point with normal ``theta``."""
    return np.hypot(b.u(theta, 0), b.u(theta, 1))


def widths(b: SupportBody):
    """Minimal and maximal width ``u(theta) + u(theta + pi)`` over the grid."""
    v = b.values()
    w = v + np.roll(v, -b.n // 2)
    return float(w.min()), float(w.max())


def area(b: SupportBody, convention="half"):
    """Enclosed area ``(1/2) * integral of u (u'' + u)``.

    ``convention="full"`` drops the 1/2, matching the unnormalised volume
    integral that appears alongside the mixed-volume identity.
    """
    u = b.values()
    integral = trapezoid(u * (b.values(2) + u))
    if convention == "half":
        return 0.5 * integral
    if convention == "full":
        return integral
    raise DomainError(f"unknown area convention {convention!r}")


def monotone_arcs(du, tol=PLATEAU_TOL):
    """Maximal arcs on which ``du`` keeps one sign.

    Returns ``(first, last, sign)`` node indices; ``last`` may exceed
    ``len(du) - 1`` when the arc wraps around.  Nodes with ``|du| <= tol`` are
    plateaus and are merged into the arc that precedes them.
    """
    du = np.asarray(du, dtype=float)
    n = du.size
    sign = np.where(du > tol, 1, np.where(du < -tol, -1, 0))
    nz = np.flatnonzero(sign)
    if nz.size == 0:
        return []
    filled = sign.copy()
    last = sign[nz[-1]]
    for i in range(n):
        if filled[i] == 0:
            filled[i] = last
        last = filled[i]
    starts = np.flatnonzero(filled != np.roll(filled, 1))
    if starts.size == 0:
        return [(0, n - 1, int(filled[0]))]
    arcs = []
    for j, s0 in enumerate(starts):
        s1 = starts[(j + 1) % starts.size]
        stop = s1 - 1 if s1 > s0 else s1 - 1 + n
        arcs.append((int(s0), int(stop), int(filled[s0])))
    return arcs


def _power_term(u, p):
    # (2/p) u^p, or 2 ln u at p = 0
    if p == 0:
        return 2.0 * np.log(u)
    return (2.0 / p) * u**p


def arc_inequality_check(b: SupportBody, f: PeriodicFunction, p, tol=1e-8):
    """Check the energy inequalities satisfied by solutions on monotone arcs.

    On each arc where ``u`` increases, ``f_min * dP <= d(l^2) <= f_max * dP``
    with ``P = (2/p) u^p`` (``2 ln u`` when ``p = 0``); on decreasing arcs the
    inequalities reverse.  The global forms compare ``u_max`` with ``u_min``
    through ``u^2 - f_pm * P``.  Slack is measured relative to the magnitude of
    the compared terms; ``consistent`` means ``worst_slack >= -tol``.
    """
    n = b.n
    u, du = b.values(0), b.values(1)
    fv = f.sample(n)
    f_min, f_max = float(fv.min()), float(fv.max())
    l2 = u**2 + du**2
    P = _power_term(u, p)

    def rel(x, *scale):
        return x / max(1.0, *(abs(s) for s in scale))

    arc_slacks = []
    for a, z, s in monotone_arcs(du):
        z %= n
        dl2 = l2[z] - l2[a]
        dP = P[z] - P[a]
        lo, hi = (f_min * dP, f_max * dP) if s > 0 else (f_max * dP, f_min * dP)
        arc_slacks.append(min(rel(hi - dl2, hi, dl2), rel(dl2 - lo, lo, dl2)))

    imax, imin = int(np.argmax(u)), int(np.argmin(u))
    global_slacks = []
    if p < 2:
        for fc, direction in ((f_max, 1.0), (f_min, -1.0)):
            top = u[imax] ** 2 - fc * P[imax]
            bottom = u[imin] ** 2 - fc * P[imin]
            global_slacks.append(rel(direction * (bottom - top), top, bottom))

    worst = min(arc_slacks + global_slacks, default=0.0)
    return {
        "p": float(p),
        "n_arcs": len(arc_slacks),
        "arc_slacks": arc_slacks,
        "global_slacks": global_slacks,
        "worst_slack": float(worst),
        "consistent": bool(worst >= -tol),
    }
