"""Period integral and solution counting for ``u'' + u = u^(p-1)``.

With ``f = 1`` every positive solution conserves
``u'^2 + F(u)`` where ``F(u) = u^2 - (2/p) u^p`` (``u^2 - 2 ln u`` at
``p = 0``).  A solution with minimum ``m`` oscillates between ``m`` and the
conjugate level ``M(m) > 1`` with ``F(M) = F(m)``; it needs the half period
``H(m) = int_m^M du / sqrt(F(m) - F(u))`` to equal ``pi / kappa`` for an
integer ``kappa`` in order to close up.  Everything below works with
``G(u) = F(u) - F(1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial import chebyshev as cheb
from numpy.polynomial import polynomial as P
from scipy import optimize

from .errors import CompatibilityError, DomainError, QuadratureFailure
from .support_geometry import SupportBody
from .periodic import DEFAULT_N, PeriodicFunction, check_grid_size, grid
from .quadrature import adaptive_gauss

__all__ = [
    "EnergyContext",
    "EnergyProfile",
    "CountResult",
    "conjugate_max",
    "H_integral",
    "H_limits",
    "dM_dm",
    "kernels",
    "dH_dm",
    "prop83_kernel_scan",
    "reconstruct_symmetric_solution",
    "count_solutions",
    "energy_profile",
    "profile_row",
    "counting_grid",
    "PROFILE_COLUMNS",
]

SERIES_WINDOW = 1e-2
SERIES_TERMS = 24
H_TOL = 1e-12
DH_TOL = 1e-10
# smallest |sum| / sum|piece| accepted from the kernel form of dH/dm
KERNEL_CANCELLATION = 1e-7
COMPAT_TOL = 1e-8
DH_METHODS = ("kernel_8_11", "boundary_8_12", "finite_difference")


def _series_divide(a, b, terms):
    """Power series ``a / b`` with ``b[0] != 0``, truncated to ``terms``."""
    a = np.pad(a, (0, max(0, terms - len(a))))[:terms]
    b = np.pad(b, (0, max(0, terms - len(b))))[:terms]
    c = np.zeros(terms)
    for k in range(terms):
        c[k] = (a[k] - np.dot(b[1:k + 1], c[:k][::-1])) / b[0]
    return c


@dataclass(frozen=True)
class EnergyContext:
    """``F``, ``G = F - F(1)`` and derived kernels for a fixed exponent ``p < 2``."""

    p: float

    def __post_init__(self):
        p = float(self.p)
        if not (math.isfinite(p) and p < 2):
            raise DomainError(f"the energy analysis needs finite p < 2, got {self.p!r}")
        object.__setattr__(self, "p", p)
        u = np.concatenate([np.linspace(0.05, 1.0, 40), np.linspace(1.0, 4.0, 40)[1:]])
        g = self.G(u)
        if not (np.all(np.diff(g[:40]) < 0) and np.all(np.diff(g[39:]) > 0)):
            raise DomainError(f"F is not unimodal with minimum at 1 for p = {p}")

    # -- F, G and derivatives --------------------------------------------------
    def F(self, u):
        u = np.asarray(u, dtype=float)
        if self.p == 0:
            return u**2 - 2.0 * np.log(u)
        return u**2 - (2.0 / self.p) * u**self.p

    def dF(self, a, d):
        """``F(a + d) - F(a)`` without cancellation for small ``d``."""
        a = np.asarray(a, dtype=float)
        d = np.asarray(d, dtype=float)
        quad = d * (2.0 * a + d)
        x = np.log1p(d / a)
        if self.p == 0:
            return quad - 2.0 * x
        return quad - (2.0 / self.p) * a**self.p * np.expm1(self.p * x)

    def G(self, u):
        u = np.asarray(u, dtype=float)
        return self.dF(1.0, u - 1.0)

    def G1(self, u):
        u = np.asarray(u, dtype=float)
        return 2.0 * u - 2.0 * u ** (self.p - 1.0)

    def G2(self, u):
        u = np.asarray(u, dtype=float)
        return 2.0 - 2.0 * (self.p - 1.0) * u ** (self.p - 2.0)

    def G3(self, u):
        u = np.asarray(u, dtype=float)
        return -2.0 * (self.p - 1.0) * (self.p - 2.0) * u ** (self.p - 3.0)

    # -- Taylor data about u = 1 ---------------------------------------------
    @cached_property
    def _g_series(self):
        k = np.arange(SERIES_TERMS + 4)
        if self.p == 0:
            g = np.where(k >= 1, 2.0 * (-1.0) ** k / np.maximum(k, 1), 0.0)
            g[1] = 0.0
            g[2] = 2.0
        else:
            # generalised binomial coefficients by the product recurrence
            binom = np.cumprod(np.concatenate([[1.0], (self.p - k[1:] + 1.0) / k[1:]]))
            g = -(2.0 / self.p) * binom
            g[0] = 0.0
            g[1] = 0.0
            g[2] += 1.0
        return g

    @cached_property
    def _ratio_series(self):
        n = SERIES_TERMS + 4
        g = self._g_series
        g1, g2, g3 = P.polyder(g, 1), P.polyder(g, 2), P.polyder(g, 3)
        trunc = lambda c: np.pad(c, (0, max(0, n - len(c))))[:n]
        mul = lambda *cs: trunc(_mul_all(cs))
        k_ser = mul(g, g1, g3) + 1.5 * mul(g1, g1, g2) - 3.0 * mul(g, g2, g2)
        g1_4 = mul(g1, g1, g1, g1)
        num = mul(g1, g1) - 2.0 * mul(g, g2)
        g1_2 = mul(g1, g1)
        g1_3 = mul(g1, g1, g1)
        terms = SERIES_TERMS
        return {
            # K and (G')^4 both start at order 4
            "K_over_G1_4": _series_divide(k_ser[4:], g1_4[4:], terms),
            # ((G')^2 - 2 G G'') starts at order 3, (G')^2 at order 2
            "R": np.concatenate([[0.0], _series_divide(num[3:], g1_2[2:], terms - 1)]),
            # (G')^3 starts at order 3
            "Phi": _series_divide(num[3:], g1_3[3:], terms),
        }

    def _patched(self, u, direct, name, offset=None):
        # ``offset`` is ``u - 1`` when the caller knows it more accurately
        d = np.asarray(u, dtype=float) - 1.0 if offset is None else np.asarray(offset, dtype=float)
        near = np.abs(d) < SERIES_WINDOW
        out = np.empty_like(d)
        if np.any(~near):
            out[~near] = direct(d[~near])
        if np.any(near):
            out[near] = P.polyval(d[near], self._ratio_series[name])
        return out if out.ndim else float(out)

    def _derivs(self, d, dtype=float):
        """``G`` and its first three derivatives at ``u = 1 + d`` in type ``dtype``."""
        d = np.asarray(d, dtype=dtype)
        u = 1 + d
        p = dtype(self.p)
        if self.p == 0:
            g = d * (2 + d) - 2 * np.log1p(d)
        else:
            g = d * (2 + d) - (2 / p) * np.expm1(p * np.log1p(d))
        g1 = 2 * d - 2 * np.expm1((p - 1) * np.log1p(d))
        g2 = 2 - 2 * (p - 1) * u ** (p - 2)
        g3 = -2 * (p - 1) * (p - 2) * u ** (p - 3)
        return g, g1, g2, g3

    def K(self, u):
        """``G G' G''' + (3/2) (G')^2 G'' - 3 G (G'')^2``.

        The terms are ``O((u-1)^2)`` while ``K`` is ``O((u-1)^4)``, so the sum
        is formed in extended precision.
        """
        d = np.asarray(u, dtype=np.longdouble) - 1
        g, g1, g2, g3 = self._derivs(d, np.longdouble)
        return np.asarray(g * g1 * g3 + 1.5 * g1**2 * g2 - 3 * g * g2**2, dtype=float)

    def K_over_G1_4(self, u, offset=None):
        """``K / (G')^4``, continuous through its removable singularity at 1."""
        def direct(d):
            g, g1, g2, g3 = self._derivs(d, np.longdouble)
            return np.asarray((g * g1 * g3 + 1.5 * g1**2 * g2 - 3 * g * g2**2) / g1**4,
                              dtype=float)
        return self._patched(u, direct, "K_over_G1_4", offset)

    def _numerator(self, d):
        g, g1, g2, _ = self._derivs(d, np.longdouble)
        return g1, g1**2 - 2 * g * g2

    def boundary_ratio(self, u, offset=None):
        """``((G')^2 - 2 G G'') / (G')^2``, zero at ``u = 1``."""
        def direct(d):
            g1, num = self._numerator(d)
            return np.asarray(num / g1**2, dtype=float)
        return self._patched(u, direct, "R", offset)

    def Phi(self, u, offset=None):
        """``((G')^2 - 2 G G'') / (G')^3``; its derivative is ``-2 K / (G')^4``."""
        def direct(d):
            g1, num = self._numerator(d)
            return np.asarray(num / g1**3, dtype=float)
        return self._patched(u, direct, "Phi", offset)

    def L(self, u):
        p = self.p
        u = np.asarray(u, dtype=float)
        return ((3 * p - 4) * u ** (2 * p - 4) + 2 * (2 * p - 1) * (p - 2) * u ** (p - 4)
                + (p - 2) * (p - 8) * u**-2.0 - 2 * (2 * p * p - 7 * p + 8) * u ** (p - 2)
                - p * (p - 3))

    def dL(self, u):
        p = self.p
        u = np.asarray(u, dtype=float)
        return ((3 * p - 4) * (2 * p - 4) * u ** (2 * p - 5)
                + 2 * (2 * p - 1) * (p - 2) * (p - 4) * u ** (p - 5)
                - 2 * (p - 2) * (p - 8) * u**-3.0
                - 2 * (2 * p * p - 7 * p + 8) * (p - 2) * u ** (p - 3))

    def T(self, u):
        p = self.p
        u = np.asarray(u, dtype=float)
        return (2 * (p - 1) * (3 * p - 4) * u**p + (p - 2) * (p - 4) * (2 * p - 1)
                - p * (2 * p * p - 7 * p + 8) * u**2)

    def dK_closed(self, u):
        """``K'`` through ``L``: ``4 (p-1)(p-2)/p * u^(p-1) * L``; undefined at ``p = 0``."""
        if self.p == 0:
            raise DomainError("the L-representation of K' divides by p")
        p = self.p
        u = np.asarray(u, dtype=float)
        return 4.0 * (p - 1) * (p - 2) / p * u ** (p - 1) * self.L(u)


def _mul_all(cs):
    out = np.array([1.0])
    for c in cs:
        out = P.polymul(out, c)
    return out


def _ctx(ctx_or_p):
    return ctx_or_p if isinstance(ctx_or_p, EnergyContext) else EnergyContext(ctx_or_p)


def _check_m(m):
    m = float(m)
    if not 0.0 < m < 1.0:
        raise DomainError(f"the minimum m must lie in (0, 1), got {m}")
    return m


# -- conjugate maximum ------------------------------------------------------------

def conjugate_max(ctx, m):
    """The unique ``M > 1`` with ``F(M) = F(m)``.

    Bracketed root finding on ``G(M) - G(m)`` followed by Newton polishing.
    """
    ctx = _ctx(ctx)
    m = _check_m(m)
    target = float(ctx.G(m))
    hi = 2.0
    while ctx.G(hi) < target:
        hi *= 2.0
    h = lambda x: float(ctx.G(x)) - target
    M = optimize.brentq(h, 1.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    for _ in range(3):
        g1 = float(ctx.G1(M))
        step = h(M) / g1
        if not np.isfinite(step) or step == 0.0:
            break
        M -= step
    return M


def dM_dm(ctx, m):
    """``(m - m^(p-1)) / (M - M^(p-1))`` at ``M = conjugate_max(m)``."""
    ctx = _ctx(ctx)
    m = _check_m(m)
    M = conjugate_max(ctx, m)
    p = ctx.p
    return (m - m ** (p - 1.0)) / (M - M ** (p - 1.0))


def H_limits(p):
    """Limits of ``H`` as ``m -> 0`` and ``m -> 1``."""
    p = float(p)
    if not p < 2:
        raise DomainError(f"H is defined for p < 2, got {p}")
    low = np.pi / (2.0 - p) if 0.0 < p < 2.0 else np.pi / 2.0
    return low, np.pi / math.sqrt(2.0 - p)


# -- integrals over [m, M] ---------------------------------------------------

def _split_integral(ctx, m, M, weight, power, tol=H_TOL, pieces=False):
    """``int_m^M weight(u) (F(m) - F(u))^power du`` in three pieces.

    ``u = m + (1-m) s^2`` on ``[m, 1]`` and ``u = M - (M-c) s^2`` on
    ``[c, M]`` remove the square-root behaviour at both ends; the regular
    middle piece ``[1, c]`` with ``c = 1 + min(1/2, (M-1)/2)`` is integrated
    in ``t = u - 1`` directly, which stays resolved even when ``M`` is huge.
    Differences of ``F`` are anchored at ``m`` (lower, middle) or ``M``, and ``weight``
    receives ``u - 1`` computed without cancellation as its ``offset``.
    """
    lo_len = 1.0 - m
    c1 = min(0.5, 0.5 * (M - 1.0))
    hi_len = M - 1.0 - c1

    def lower(s):
        d = lo_len * s * s
        gap = -ctx.dF(m, d)
        w = weight(m + d, offset=-lo_len * (1.0 - s) * (1.0 + s))
        return w * gap**power * (2.0 * lo_len * s)

    def middle(t):
        gap = -ctx.dF(m, (1.0 - m) + t)
        return weight(1.0 + t, offset=t) * gap**power

    def upper(s):
        d = hi_len * s * s
        gap = -ctx.dF(M, -d)
        w = weight(M - d, offset=c1 + hi_len * (1.0 - s) * (1.0 + s))
        return w * gap**power * (2.0 * hi_len * s)

    # break the panels where the series patch about u = 1 takes over
    lo_cut = math.sqrt(max(0.0, 1.0 - SERIES_WINDOW - m) / lo_len)
    hi_cut = math.sqrt(max(0.0, M - 1.0 - SERIES_WINDOW) / hi_len) if hi_len > 0 else 1.0
    parts = (adaptive_gauss(lower, 0.0, 1.0, tol, points=(lo_cut,)),
             adaptive_gauss(middle, 0.0, c1, tol, points=(SERIES_WINDOW,)),
             adaptive_gauss(upper, 0.0, 1.0, tol, points=(hi_cut,)))
    return parts if pieces else sum(parts)


def _one(u, offset=None):
    return np.ones_like(u)


def H_integral(ctx, m, tol=H_TOL):
    """Half period ``int_m^M du / sqrt(F(m) - F(u))``."""
    ctx = _ctx(ctx)
    m = _check_m(m)
    M = conjugate_max(ctx, m)
    return _split_integral(ctx, m, M, _one, -0.5, tol)


def dH_dm(ctx, m, method="kernel_8_11", h=None):
    """Derivative of ``H`` by one of three independent routes.

    ``kernel_8_11``
        ``-4 (m - m^(p-1)) / G(m) * int K/(G')^4 sqrt(G(m) - G(u)) du``.
    ``boundary_8_12``
        ``(m - m^(p-1)) / G(m) * int ((G')^2 - 2 G G'')/(G')^2 / sqrt(G(m) - G(u)) du``.
    ``finite_difference``
        Central difference of :func:`H_integral` with step ``h``
        (default ``min(1e-4, 0.1 min(m, 1-m))``).

    The integral routes need ``1 - m >= 1e-3``.
    """
    ctx = _ctx(ctx)
    m = _check_m(m)
    p = ctx.p
    if method == "finite_difference":
        if h is None:
            h = min(1e-4, 0.1 * min(m, 1.0 - m))
        return (H_integral(ctx, m + h) - H_integral(ctx, m - h)) / (2.0 * h)
    if method not in DH_METHODS:
        raise DomainError(f"unknown dH/dm method {method!r}")
    if 1.0 - m < 1e-3:
        raise DomainError("integral forms of dH/dm need m <= 1 - 1e-3")
    M = conjugate_max(ctx, m)
    Gm = float(ctx.G(m))
    slope = m - m ** (p - 1.0)
    if method == "kernel_8_11":
        parts = _split_integral(ctx, m, M, ctx.K_over_G1_4, 0.5, DH_TOL, pieces=True)
        integral = sum(parts)
        # the kernel changes sign, so for small m the pieces nearly cancel
        ratio = abs(integral) / sum(abs(v) for v in parts)
        if ratio < KERNEL_CANCELLATION:
            raise QuadratureFailure(
                f"kernel form of dH/dm keeps only a {ratio:.3g} fraction of its pieces "
                f"at m={m:.6g}; use another method")
        return -4.0 * slope * integral / Gm
    integral = _split_integral(ctx, m, M, ctx.boundary_ratio, -0.5, DH_TOL)
    return slope * integral / Gm


def kernels(ctx, u):
    """``(K, L, T)`` at ``u``."""
    ctx = _ctx(ctx)
    u = float(u)
    if not u > 0:
        raise DomainError(f"kernels need u > 0, got {u}")
    return float(ctx.K(u)), float(ctx.L(u)), float(ctx.T(u))


# -- kernel scan along the level curve --------------------------------------

def _invert_G(ctx, gamma, lo, hi):
    g = lambda x: float(ctx.G(x)) - gamma
    return optimize.brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def prop83_kernel_scan(ctx, m, samples=200, zero_tol=1e-10):
    """Sample ``Phi(u) - Phi(v)`` on ``{G(u) = G(v) = gamma}``, ``m < u < 1 < v < M``.

    ``gamma`` runs over Chebyshev points of ``(0, G(m))``.  Values with
    magnitude below ``zero_tol`` count as zero when deciding whether the sign
    is constant.
    """
    ctx = _ctx(ctx)
    m = _check_m(m)
    M = conjugate_max(ctx, m)
    Gm = float(ctx.G(m))
    x = 0.5 * (1.0 - np.cos(np.pi * (np.arange(samples) + 0.5) / samples))
    gammas = Gm * x
    values = np.empty(samples)
    for i, gam in enumerate(gammas):
        u = _invert_G(ctx, gam, m, 1.0)
        v = _invert_G(ctx, gam, 1.0, M)
        values[i] = ctx.Phi(u) - ctx.Phi(v)
    vmin, vmax = float(values.min()), float(values.max())
    return {
        "p": ctx.p,
        "m": m,
        "min": vmin,
        "max": vmax,
        "sign_constant": bool(vmin >= -zero_tol or vmax <= zero_tol),
        "gamma": gammas,
        "values": values,
    }


# -- symmetric solutions -------------------------------------------------------

def _theta_of_tau(ctx, m, M, target, max_deg=2048):
    """Chebyshev representation of ``theta(tau)`` with ``u = m + (M-m)(1-cos tau)/2``."""
    half = 0.5 * (M - m)

    def rate(tau):
        d = half * (1.0 - np.cos(tau))
        lower = tau <= 0.5 * np.pi
        gap = np.where(lower, -ctx.dF(m, d), -ctx.dF(M, d - 2.0 * half))
        return half * np.sin(tau) / np.sqrt(gap)

    deg = 64
    while True:
        series = cheb.Chebyshev.interpolate(rate, deg, domain=[0.0, np.pi]).integ(lbnd=0.0)
        if abs(series(np.pi) - target) < 1e-11 or deg >= max_deg:
            return series
        deg *= 2


def reconstruct_symmetric_solution(ctx, m, kappa, n=DEFAULT_N, tol=COMPAT_TOL):
    """Solution with minimum ``m`` and ``kappa`` minima on the circle.

    The half period is traced by ``theta(u) = int_m^u dv / sqrt(F(m) - F(v))``
    in the variable ``u = m + (M - m)(1 - cos tau)/2``, inverted on the grid,
    and extended evenly about 0 and ``pi/kappa`` with period ``2 pi/kappa``.
    The minimum sits at ``theta = 0``.

    Raises
    ------
    CompatibilityError
        If ``|H(m) - pi/kappa| > tol``.
    """
    ctx = _ctx(ctx)
    m = _check_m(m)
    kappa = int(kappa)
    if kappa < 1:
        raise DomainError(f"kappa must be a positive integer, got {kappa}")
    H = H_integral(ctx, m)
    half_period = np.pi / kappa
    if abs(H - half_period) > tol:
        raise CompatibilityError(
            f"H(m) = {H:.12g} differs from pi/kappa = {half_period:.12g} by {abs(H - half_period):.2e}")
    M = conjugate_max(ctx, m)
    n = check_grid_size(n)
    theta_series = _theta_of_tau(ctx, m, M, H)
    scale = half_period / theta_series(np.pi)
    theta = np.mod(grid(n), 2.0 * half_period)
    theta = np.where(theta > half_period, 2.0 * half_period - theta, theta)
    # vectorised bisection for tau with theta(tau) = target, then Newton
    lo = np.zeros(n)
    hi = np.full(n, np.pi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = scale * theta_series(mid) < theta
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    tau = 0.5 * (lo + hi)
    deriv = theta_series.deriv()
    for _ in range(2):
        rate = scale * deriv(tau)
        ok = rate > 1e-300
        tau = np.where(ok, tau - (scale * theta_series(tau) - theta) / np.where(ok, rate, 1.0), tau)
        tau = np.clip(tau, 0.0, np.pi)
    u = m + 0.5 * (M - m) * (1.0 - np.cos(tau))
    return SupportBody(PeriodicFunction.from_samples(u), n)


# -- counting --------------------------------------------------------------------

@dataclass
class CountResult:
    """Roots of ``H(m) = pi/kappa`` for ``f = 1``.

    ``roots`` lists the non-constant solutions up to rotation, one per
    ``(kappa, m)`` pair.  ``count`` adds the constant solution ``u = 1`` and is
    the number of positive solutions up to rotation that were found.
    """

    p: float
    roots: list = field(default_factory=list)
    m_grid: np.ndarray = None
    H_grid: np.ndarray = None

    @property
    def n_nonconstant(self):
        return len(self.roots)

    @property
    def count(self):
        return len(self.roots) + 1

    def to_dict(self):
        return {
            "p": self.p,
            "roots": [{k: (int(v) if k == "kappa" else float(v)) for k, v in r.items()} for r in self.roots],
            "nonconstant": self.n_nonconstant,
            "count": self.count,
        }


def counting_grid(size=400, eps=1e-5):
    """Nodes in ``(eps, 1 - eps)``, geometric towards both ends."""
    half = size // 2
    left = eps * (0.5 / eps) ** np.linspace(0.0, 1.0, half)
    right = 1.0 - eps * (0.5 / eps) ** np.linspace(0.0, 1.0, size - half)
    return np.unique(np.concatenate([left, right]))


def count_solutions(p, m_grid_size=400, eps=1e-5, map_fn=map, m_tol=1e-12, noise=1e-10):
    """Every crossing of ``H`` with ``pi/kappa`` for ``1 <= kappa <= ceil(sqrt(2-p)) + 1``.

    ``H`` is tabulated on :func:`counting_grid`; each sign change is refined by
    bisection in ``m`` to ``m_tol``.  Grid values within ``noise`` of a level
    are treated as touching it, not crossing it.  This matters for ``p < -2``,
    where ``H`` tends to ``pi/2`` as ``m -> 0`` and roundoff would otherwise
    produce spurious crossings of the ``kappa = 2`` level.
    """
    ctx = EnergyContext(p)
    ms = counting_grid(m_grid_size, eps)
    Hs = np.array(list(map_fn(lambda x: H_integral(ctx, x), ms)))
    roots = []
    kmax = math.ceil(math.sqrt(2.0 - ctx.p)) + 1
    for kappa in range(1, kmax + 1):
        level = np.pi / kappa
        d = Hs - level
        # nodes within quadrature noise of the level carry no sign
        sign = np.where(d > noise, 1, np.where(d < -noise, -1, 0))
        signed = np.flatnonzero(sign)
        for i, j in zip(signed[:-1], signed[1:]):
            if sign[i] == sign[j]:
                continue
            lo, hi, slo = ms[i], ms[j], sign[i]
            while hi - lo > m_tol:
                mid = 0.5 * (lo + hi)
                if (H_integral(ctx, mid) - level) * slo > 0:
                    lo = mid
                else:
                    hi = mid
            m = 0.5 * (lo + hi)
            roots.append({"kappa": kappa, "m": m, "H": H_integral(ctx, m)})
    roots.sort(key=lambda r: (r["kappa"], r["m"]))
    return CountResult(p=ctx.p, roots=roots, m_grid=ms, H_grid=Hs)


# -- tabulation --------------------------------------------------------------------

PROFILE_COLUMNS = ("m", "M", "H", "dHdm_kernel", "dHdm_boundary", "dHdm_fd")


@dataclass
class EnergyProfile:
    p: float
    rows: list

    def column(self, name):
        i = PROFILE_COLUMNS.index(name)
        return np.array([r[i] for r in self.rows])


def profile_row(ctx, m):
    ctx = _ctx(ctx)
    M = conjugate_max(ctx, m)
    H = H_integral(ctx, m)
    integral_ok = 1.0 - m >= 1e-3
    dk = float("nan")
    if integral_ok:
        try:
            dk = dH_dm(ctx, m, "kernel_8_11")
        except QuadratureFailure:
            pass  # cancellation in the kernel form; other columns still stand
    db = dH_dm(ctx, m, "boundary_8_12") if integral_ok else float("nan")
    fd = dH_dm(ctx, m, "finite_difference")
    return (float(m), float(M), float(H), float(dk), float(db), float(fd))


def energy_profile(p, m_values=None, map_fn=map):
    """Rows ``(m, M, H, dH/dm kernel, dH/dm boundary, dH/dm central difference)``."""
    ctx = EnergyContext(p)
    if m_values is None:
        m_values = np.linspace(0.05, 0.95, 19)
    m_values = np.asarray(m_values, dtype=float)
    if np.any(np.diff(m_values) <= 0):
        raise DomainError("profile m values must be strictly increasing")
    rows = list(map_fn(lambda m: profile_row(ctx, m), m_values))
    return EnergyProfile(p=ctx.p, rows=rows)

