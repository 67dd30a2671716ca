"""Sign obstruction for ``u'' + u = f u^(p-1)`` when ``p <= -2``.

Every positive solution satisfies ``int K_f u^p = 0`` with
``K_f = (p+2) f cos 2t + f' sin 2t``.  If ``K_f`` has one sign and does not
vanish identically the identity cannot hold, so no solution exists.  This
module evaluates the kernel, the identity on arbitrary positive bodies, and
the explicit right-hand sides that make ``K_f`` strictly negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import DomainError, InconclusiveSign, PoleEvaluation
from .support_geometry import SupportBody
from .periodic import DEFAULT_N, PeriodicFunction, check_grid_size, grid, trapezoid

__all__ = [
    "ObstructionReport",
    "kernel_Kf",
    "identity_residual",
    "xi_function",
    "phi_function",
    "construct_counterexample",
    "certify_nonexistence",
    "random_probe",
]

POLE_EXCLUSION = 1e-6
POLE_WINDOW = 1e-3
HALF_PI = 0.5 * np.pi
QUARTER_PI = 0.25 * np.pi


# -- kernel -----------------------------------------------------------------

def _to_complex(const, a, b):
    # f = sum_k c_k e^{ik t}, index k + K
    K = max(len(a), len(b))
    c = np.zeros(2 * K + 1, dtype=complex)
    c[K] = const
    a = np.pad(np.asarray(a, float), (0, K - len(a)))
    b = np.pad(np.asarray(b, float), (0, K - len(b)))
    c[K + 1:] = 0.5 * (a - 1j * b)
    c[:K][::-1] = 0.5 * (a + 1j * b)
    return c


def _from_complex(c):
    K = (c.size - 1) // 2
    pos, neg = c[K + 1:], c[:K][::-1]
    a = (pos + neg).real
    b = (1j * (pos - neg)).real
    return PeriodicFunction.fourier(c[K].real, a, b)


def _kernel_fourier(f: PeriodicFunction, p):
    const, a, b = f.coefficients
    c = _to_complex(const, a, b)
    K = (c.size - 1) // 2
    k = np.arange(-K, K + 1)
    dc = 1j * k * c
    # pad by two so the e^{+-2it} shifts stay in range
    c = np.pad(c, 2)
    dc = np.pad(dc, 2)
    up = lambda v: np.roll(v, 2)     # multiply by e^{2it}
    down = lambda v: np.roll(v, -2)  # multiply by e^{-2it}
    cos2 = 0.5 * (up(c) + down(c))
    sin2 = (up(dc) - down(dc)) / 2j
    return _from_complex((p + 2.0) * cos2 + sin2)


def _times_sin2(df, theta):
    s = np.sin(2.0 * theta)
    with np.errstate(invalid="ignore"):
        out = df * s
    # f' sin 2t -> 0 at the poles even where f' blows up
    return np.where(np.isfinite(out) | (np.abs(s) > 1e-12), out, 0.0)


def kernel_Kf(f: PeriodicFunction, p):
    """The obstruction kernel ``(p+2) f cos 2t + f' sin 2t``.

    Trigonometric ``f`` gives an exact trigonometric kernel; sampled ``f``
    gives grid samples; analytic ``f`` gives an analytic kernel.
    """
    p = float(p)
    if f.kind == "fourier":
        return _kernel_fourier(f, p)
    if f.kind == "samples":
        n = f.n
        t = grid(n)
        vals = (p + 2.0) * f.sample(n) * np.cos(2 * t) + f.sample(n, 1) * np.sin(2 * t)
        return PeriodicFunction.from_samples(vals, method=f.method)

    def kf(theta):
        theta = np.asarray(theta, dtype=float)
        return (p + 2.0) * f(theta) * np.cos(2 * theta) + _times_sin2(f(theta, 1), theta)

    return PeriodicFunction.analytic(kf)


def identity_residual(u: SupportBody, f: PeriodicFunction, p):
    """``int K_f u^p`` over the circle by the periodic trapezoid rule."""
    kf = kernel_Kf(f, p).sample(u.n)
    return float(trapezoid(kf * u.values() ** float(p)))


# -- the singular profile xi and its rescaling phi ---------------------------

def _reduce(theta):
    """Map to ``[0, pi/2]`` using evenness and pi-periodicity.

    Returns the reduced angle and the sign picked up by a first derivative.
    """
    t = np.mod(theta, np.pi)
    flip = t > HALF_PI
    return np.where(flip, np.pi - t, t), np.where(flip, -1.0, 1.0)


def _xi_reduced(t, p):
    # t in (0, pi/2); xi is odd about pi/4
    if t > QUARTER_PI:
        return -_xi_reduced(HALF_PI - t, p)
    if t == QUARTER_PI:
        return 0.0
    a = 0.5 * p
    # log substitution t = e^s turns the pole into an exponential tail
    g = lambda s: math.sin(2.0 * math.exp(s)) ** a * math.exp(s)
    val, _ = integrate.quad(g, math.log(t), math.log(QUARTER_PI), epsabs=0.0,
                            epsrel=1e-13, limit=200)
    return val


def _check_p(p):
    p = float(p)
    if not p < -2:
        raise DomainError(f"the singular profiles need p < -2, got {p}")
    return p


def xi_function(p):
    """``xi(t) = int_t^{pi/4} sin(2s)^(p/2) ds``, extended evenly and pi-periodically.

    Raises :class:`PoleEvaluation` within ``1e-6`` of ``t = k pi/2``.
    """
    p = _check_p(p)

    def xi(theta):
        theta = np.asarray(theta, dtype=float)
        t, _ = _reduce(theta)
        if np.any(np.minimum(t, HALF_PI - t) < POLE_EXCLUSION):
            raise PoleEvaluation("xi diverges at multiples of pi/2")
        out = np.vectorize(lambda x: _xi_reduced(float(x), p), otypes=[float])(t)
        return out if theta.ndim else float(out)

    def dxi(theta):
        theta = np.asarray(theta, dtype=float)
        t, sign = _reduce(theta)
        if np.any(np.minimum(t, HALF_PI - t) < POLE_EXCLUSION):
            raise PoleEvaluation("xi diverges at multiples of pi/2")
        return -sign * np.sin(2 * t) ** (0.5 * p)

    return PeriodicFunction.analytic(xi, dxi)


class _Phi:
    """``|sin 2t|^{-(p+2)/2} xi(t)`` with exact limits at the poles.

    Inside ``POLE_WINDOW`` of a pole the value is interpolated between the
    limit and the value at the window edge by ``d^beta`` where ``d`` is the
    distance to the pole and ``beta = min(-(p+2)/2, 2)`` is the leading
    exponent of the deviation from the limit.
    """

    def __init__(self, p):
        self.p = p
        self.beta = min(-(p + 2.0) / 2.0, 2.0)
        self.limit0 = -1.0 / (p + 2.0)
        self.limit1 = 1.0 / (p + 2.0)
        self.edge0 = self._direct(POLE_WINDOW)
        self.edge1 = self._direct(HALF_PI - POLE_WINDOW)

    def _direct(self, t):
        s = math.sin(2.0 * t)
        return s ** (-(self.p + 2.0) / 2.0) * _xi_reduced(t, self.p)

    def _ddirect(self, t, value):
        # product rule on s^{-(p+2)/2} xi with xi' = -s^{p/2}
        s, c = math.sin(2.0 * t), math.cos(2.0 * t)
        return -(self.p + 2.0) * c / s * value - s ** (-(self.p + 2.0) / 2.0) * s ** (0.5 * self.p)

    def value(self, t):
        if t < POLE_WINDOW:
            return self.limit0 + (self.edge0 - self.limit0) * (t / POLE_WINDOW) ** self.beta
        d = HALF_PI - t
        if d < POLE_WINDOW:
            return self.limit1 + (self.edge1 - self.limit1) * (d / POLE_WINDOW) ** self.beta
        return self._direct(t)

    def derivative(self, t):
        b = self.beta
        if t < POLE_WINDOW:
            if t == 0.0:
                return 0.0 if b > 1 else (math.inf if b < 1 else (self.edge0 - self.limit0) / POLE_WINDOW)
            return b * (self.edge0 - self.limit0) / POLE_WINDOW * (t / POLE_WINDOW) ** (b - 1)
        d = HALF_PI - t
        if d < POLE_WINDOW:
            if d == 0.0:
                return 0.0 if b > 1 else (-math.inf if b < 1 else -(self.edge1 - self.limit1) / POLE_WINDOW)
            return -b * (self.edge1 - self.limit1) / POLE_WINDOW * (d / POLE_WINDOW) ** (b - 1)
        return self._ddirect(t, self._direct(t))


def phi_function(p):
    """``phi = |sin 2t|^{-(p+2)/2} xi`` with ``phi(0) = -1/(p+2)``, ``phi(pi/2) = 1/(p+2)``.

    Even and pi-periodic.  The supplied derivative is exact off the pole
    windows and the derivative of the patch inside them.
    """
    p = _check_p(p)
    core = _Phi(p)

    def phi(theta):
        theta = np.asarray(theta, dtype=float)
        t, _ = _reduce(theta)
        out = np.vectorize(lambda x: core.value(float(x)), otypes=[float])(t)
        return out if theta.ndim else float(out)

    def dphi(theta):
        theta = np.asarray(theta, dtype=float)
        t, sign = _reduce(theta)
        out = sign * np.vectorize(lambda x: core.derivative(float(x)), otypes=[float])(t)
        return out if theta.ndim else float(out)

    return PeriodicFunction.analytic(phi, dphi)


# -- counterexamples -------------------------------------------------------------

def construct_counterexample(p, check_n=4096, check=True):
    """Right-hand side with a strictly negative obstruction kernel.

    Returns ``(f, expected_K_f)``.  For ``p = -2`` this is ``f = 2 + cos 2t``
    with ``K_f = -2 sin^2 2t``; for ``p < -2`` it is ``f = -1/(p+2) + phi``
    with ``K_f = -1 - cos 2t``.

    With ``check=True`` the ``p < -2`` case verifies on a ``check_n`` grid
    that ``f`` vanishes at ``t = pi/2 + k pi`` and is positive elsewhere.
    This holds for ``-4 <= p < -2``.  Below ``-4``, ``phi`` rises above its
    value at ``t = 0`` near the poles, so by the odd symmetry about ``pi/4``
    ``f`` turns negative near ``t = pi/2`` and a :class:`DomainError` is
    raised; ``check=False`` returns the pair anyway.
    """
    p = float(p)
    if p > -2:
        raise DomainError(f"counterexamples exist only for p <= -2, got {p}")
    if p == -2:
        f = PeriodicFunction.fourier(2.0, [0.0, 1.0])
        return f, PeriodicFunction.fourier(-1.0, [0.0, 0.0, 0.0, 1.0])
    phi = phi_function(p)
    shift = -1.0 / (p + 2.0)
    f = PeriodicFunction.analytic(lambda t: shift + phi(t), lambda t: phi(t, 1))
    expected = PeriodicFunction.fourier(-1.0, [0.0, -1.0])
    if check:
        t = grid(check_n)
        fv = f.sample(check_n)
        at_pole = np.isclose(np.mod(t, np.pi), HALF_PI, rtol=0, atol=1e-12)
        if np.any(np.abs(fv[at_pole]) > 1e-12) or not np.all(fv[~at_pole] > 0):
            raise DomainError(
                f"f = -1/(p+2) + phi is not positive off the poles for p = {p} "
                f"(min f = {fv[~at_pole].min():.3e})")
    return f, expected


# -- certification -------------------------------------------------------------

def random_probe(rng, harmonics=6, min_value=0.1, min_curvature=0.1):
    """Random positive, uniformly convex trigonometric support function.

    Coefficients are standard normal; the perturbation is halved until
    ``min u > min_value`` and ``min(u'' + u) > min_curvature`` on a 512-point
    grid.  The mean level is drawn log-uniformly from ``[0.5, 2]``.
    """
    level = float(np.exp(rng.uniform(np.log(0.5), np.log(2.0))))
    a = rng.standard_normal(harmonics)
    b = rng.standard_normal(harmonics)
    scale = 1.0
    while True:
        u = PeriodicFunction.fourier(level, level * scale * a, level * scale * b)
        if (np.min(u.sample(512)) > min_value
                and np.min(u.sample(512, 2) + u.sample(512)) > min_curvature):
            return u
        scale *= 0.5


@dataclass
class ObstructionReport:
    """Kernel samples, sign summary and identity residuals over probe bodies."""

    p: float
    f: PeriodicFunction
    grid_n: int
    kf: np.ndarray
    kf_max: float
    kf_min: float
    kf_positive_measure: float
    kf_negative_fraction: float
    kf_abs_integral: float
    probe_residuals: list = field(default_factory=list)
    probe_thresholds: list = field(default_factory=list)
    certified: bool = False
    seed: int = 0

    def to_dict(self):
        return {
            "p": self.p,
            "grid_n": self.grid_n,
            "seed": self.seed,
            "Kf_max": self.kf_max,
            "Kf_min": self.kf_min,
            "Kf_positive_measure": self.kf_positive_measure,
            "Kf_negative_fraction": self.kf_negative_fraction,
            "Kf_abs_integral": self.kf_abs_integral,
            "probe_residuals": list(self.probe_residuals),
            "probe_thresholds": list(self.probe_thresholds),
            "certified": self.certified,
        }


def certify_nonexistence(p, f: PeriodicFunction, probes=100, *, seed=0, n=DEFAULT_N,
                         tol=1e-12, map_fn=map):
    """Check that the obstruction kernel is sign-definite and test the identity.

    The report is certified when ``K_f <= tol`` on the grid (and on a grid
    four times finer), ``int |K_f| > tol``, and every probe body gives
    ``int K_f u^p < -delta`` with
    ``delta = 1e-4 * int |K_f| * (min u)^p`` for that probe.

    Raises
    ------
    DomainError
        If ``p > -2``.
    InconclusiveSign
        If ``K_f`` takes both signs beyond ``tol``.
    """
    p = float(p)
    if p > -2:
        raise DomainError(f"the obstruction applies for p <= -2, got {p}")
    n = check_grid_size(n)
    kernel = kernel_Kf(f, p)
    kf = kernel.sample(n)
    fine = kernel.sample(4 * n)
    kmax = float(max(kf.max(), fine.max()))
    kmin = float(min(kf.min(), fine.min()))
    if kmax > tol and kmin < -tol:
        raise InconclusiveSign(
            f"K_f changes sign (min {kmin:.3e}, max {kmax:.3e}); the identity gives no obstruction")
    abs_int = float(trapezoid(np.abs(kf)))
    rng = np.random.default_rng(seed)
    bodies = [random_probe(rng) for _ in range(int(probes))]

    def evaluate(u):
        values = u.sample(n)
        res = float(trapezoid(kf * values**p))
        return res, 1e-4 * abs_int * float(np.min(values)) ** p

    results = list(map_fn(evaluate, bodies))
    residuals = [r for r, _ in results]
    thresholds = [d for _, d in results]
    certified = (kmax <= tol and abs_int > tol
                 and all(r < -d for r, d in results))
    return ObstructionReport(
        p=p, f=f, grid_n=n, kf=kf, kf_max=kmax, kf_min=kmin,
        kf_positive_measure=float(2 * np.pi * np.mean(kf > tol)),
        kf_negative_fraction=float(np.mean(kf < -tol)),
        kf_abs_integral=abs_int, probe_residuals=residuals,
        probe_thresholds=thresholds, certified=bool(certified), seed=int(seed))
