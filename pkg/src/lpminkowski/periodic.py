"""2*pi-periodic functions with derivatives.

Three representations share one interface:

* ``fourier``  -- constant plus cosine/sine coefficient lists, derivatives exact;
* ``samples``  -- values on the uniform grid ``theta_j = 2*pi*j/N`` starting at 0,
  derivatives spectral (default) or 4th-order centred differences at the nodes,
  trigonometric interpolation off the nodes;
* ``analytic`` -- Python callables for the value and (optionally) derivatives.
  Used for closed-form objects with singular points (the obstruction data) and
  piecewise constructions where sampling would lose the exact derivatives.
"""

from __future__ import annotations

import json
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * np.pi
DEFAULT_N = 256
MIN_N = 16

__all__ = [
    "PeriodicFunction",
    "grid",
    "check_grid_size",
    "spectral_derivative",
    "fd_derivative",
    "diff_matrix",
    "trapezoid",
    "eval_derivatives",
]


def check_grid_size(n):
    n = int(n)
    if n < MIN_N or n % 2:
        raise DomainError(f"grid size must be even and >= {MIN_N}, got {n}")
    return n


def grid(n=DEFAULT_N):
    """Uniform periodic grid ``2*pi*j/n``, ``j = 0..n-1``."""
    n = check_grid_size(n)
    return TWO_PI * np.arange(n) / n


def trapezoid(values):
    """Periodic trapezoid rule over one full period for grid samples."""
    values = np.asarray(values, dtype=float)
    return TWO_PI * values.mean(axis=-1)


def _wavenumbers(n):
    return np.fft.fftfreq(n, d=1.0 / n)


def spectral_derivative(values, order=1):
    """Derivative of grid samples via FFT.

    The Nyquist mode is treated as ``a*cos(n*theta/2)``: it is dropped for odd
    orders (its odd derivatives vanish on the nodes) and kept for even orders.
    """
    values = np.asarray(values, dtype=float)
    if order == 0:
        return values.copy()
    n = values.shape[-1]
    k = _wavenumbers(n)
    symbol = (1j * k) ** order
    if order % 2:
        symbol[n // 2] = 0.0
    return np.real(np.fft.ifft(symbol * np.fft.fft(values)))


_FD_STENCILS = {
    # (order, accuracy): offsets -> weights (divide by h**order)
    (1, 2): {-1: -0.5, 1: 0.5},
    (2, 2): {-1: 1.0, 0: -2.0, 1: 1.0},
    (1, 4): {-2: 1 / 12, -1: -2 / 3, 1: 2 / 3, 2: -1 / 12},
    (2, 4): {-2: -1 / 12, -1: 4 / 3, 0: -5 / 2, 1: 4 / 3, 2: -1 / 12},
}


def fd_derivative(values, order=1, accuracy=4):
    """Centred finite-difference derivative of periodic grid samples."""
    values = np.asarray(values, dtype=float)
    if order == 0:
        return values.copy()
    try:
        stencil = _FD_STENCILS[(order, accuracy)]
    except KeyError:
        raise DomainError(f"no stencil for order={order}, accuracy={accuracy}")
    n = values.shape[-1]
    h = TWO_PI / n
    out = np.zeros_like(values)
    for offset, w in stencil.items():
        out += w * np.roll(values, -offset, axis=-1)
    return out / h**order


def diff_matrix(n, order, method="spectral"):
    """Dense periodic differentiation matrix acting on grid samples.

    ``method`` is ``"spectral"``, ``"fd2"`` or ``"fd4"``.
    """
    n = check_grid_size(n)
    eye = np.eye(n)
    if method == "spectral":
        return spectral_derivative(eye, order).T
    if method in ("fd2", "fd4"):
        return fd_derivative(eye, order, accuracy=int(method[2])).T
    raise DomainError(f"unknown differentiation method {method!r}")


def _coefficients_from_samples(values):
    values = np.asarray(values, dtype=float)
    n = values.size
    vhat = np.fft.rfft(values)
    const = vhat[0].real / n
    a = 2.0 * vhat[1:].real / n
    b = -2.0 * vhat[1:].imag / n
    # Nyquist term carries half weight and no sine part
    a[-1] *= 0.5
    b[-1] = 0.0
    return const, a, b


def _eval_trig(const, a, b, theta, order):
    theta = np.asarray(theta, dtype=float)
    k = np.arange(1, max(len(a), len(b)) + 1, dtype=float)
    a = np.pad(np.asarray(a, dtype=float), (0, len(k) - len(a)))
    b = np.pad(np.asarray(b, dtype=float), (0, len(k) - len(b)))
    out = np.full(theta.shape, const if order == 0 else 0.0)
    if len(k) == 0:
        return out
    phase = np.multiply.outer(theta, k)
    c, s = np.cos(phase), np.sin(phase)
    # d^r/dθ^r of a cos + b sin cycles with period 4 in r
    kr = k**order
    r = order % 4
    if r == 0:
        terms = a * c + b * s
    elif r == 1:
        terms = -a * s + b * c
    elif r == 2:
        terms = -(a * c + b * s)
    else:
        terms = a * s - b * c
    return out + terms @ kr if theta.ndim else out + float(np.dot(terms, kr))


class PeriodicFunction:
    """A real 2*pi-periodic function with evaluable derivatives.

    Instances are immutable; build them with :meth:`fourier`,
    :meth:`from_samples`, :meth:`analytic` or :meth:`constant`.
    """

    __slots__ = ("kind", "_const", "_cos", "_sin", "_values", "_funcs", "method")

    def __init__(self, kind, *, const=0.0, cos=(), sin=(), values=None,
                 funcs=None, method="spectral"):
        self.kind = kind
        self._const = float(const)
        self._cos = np.asarray(cos, dtype=float).copy()
        self._sin = np.asarray(sin, dtype=float).copy()
        self._cos.setflags(write=False)
        self._sin.setflags(write=False)
        self._values = None
        if values is not None:
            v = np.asarray(values, dtype=float).copy()
            check_grid_size(v.size)
            v.setflags(write=False)
            self._values = v
        self._funcs = tuple(funcs) if funcs is not None else ()
        if method not in ("spectral", "fd4"):
            raise DomainError(f"unknown grid derivative method {method!r}")
        self.method = method

    # -- constructors -----------------------------------------------------
    @classmethod
    def fourier(cls, const=0.0, cos: Sequence[float] = (), sin: Sequence[float] = ()):
        return cls("fourier", const=const, cos=cos, sin=sin)

    @classmethod
    def constant(cls, c):
        return cls.fourier(c)

    @classmethod
    def from_samples(cls, values, method="spectral"):
        return cls("samples", values=values, method=method)

    @classmethod
    def analytic(cls, f: Callable, df: Callable | None = None,
                 d2f: Callable | None = None):
        funcs = [f]
        if df is not None:
            funcs.append(df)
            if d2f is not None:
                funcs.append(d2f)
        return cls("analytic", funcs=funcs)

    # -- evaluation -------------------------------------------------------
    @property
    def n(self):
        """Grid size for sample-backed functions, else ``None``."""
        return None if self._values is None else self._values.size

    @property
    def values(self):
        return self._values

    @property
    def coefficients(self):
        """``(const, cos, sin)``; sampled functions report their interpolant."""
        if self.kind == "fourier":
            return self._const, self._cos, self._sin
        if self.kind == "samples":
            return _coefficients_from_samples(self._values)
        raise DomainError("analytic functions have no stored coefficients")

    def __call__(self, theta, order=0):
        if order not in (0, 1, 2):
            raise DomainError(f"derivative order must be 0, 1 or 2, got {order}")
        theta = np.asarray(theta, dtype=float)
        if self.kind == "analytic":
            if order >= len(self._funcs):
                raise DomainError(f"derivative of order {order} not supplied")
            out = self._funcs[order](np.mod(theta, TWO_PI))
            return np.asarray(out, dtype=float) if theta.ndim else float(out)
        if self.kind == "samples":
            nodes = self._node_index(theta)
            if nodes is not None:
                vals = self.sample(self.n, order)[nodes]
                return vals if theta.ndim else float(vals)
        const, a, b = self.coefficients
        return _eval_trig(const, a, b, theta, order)

    def _node_index(self, theta):
        n = self.n
        pos = np.mod(theta, TWO_PI) * n / TWO_PI
        idx = np.rint(pos)
        if np.all(np.abs(pos - idx) < 1e-12):
            return idx.astype(int) % n
        return None

    def sample(self, n=DEFAULT_N, order=0):
        """Values of the ``order``-th derivative on the ``n``-point grid."""
        n = check_grid_size(n)
        if self.kind == "samples" and n == self.n:
            if self.method == "fd4":
                return fd_derivative(self._values, order, accuracy=4)
            return spectral_derivative(self._values, order)
        return np.asarray(self(grid(n), order), dtype=float)

    # -- arithmetic -------------------------------------------------------
    def _combine(self, other, op):
        if np.isscalar(other):
            other = PeriodicFunction.constant(other)
        if self.kind == other.kind == "fourier":
            m = max(len(self._cos), len(other._cos))
            k = max(len(self._sin), len(other._sin))
            return PeriodicFunction.fourier(
                op(self._const, other._const),
                op(np.pad(self._cos, (0, m - len(self._cos))),
                   np.pad(other._cos, (0, m - len(other._cos)))),
                op(np.pad(self._sin, (0, k - len(self._sin))),
                   np.pad(other._sin, (0, k - len(other._sin)))),
            )
        if self.kind == other.kind == "samples" and self.n == other.n:
            return PeriodicFunction.from_samples(op(self._values, other._values),
                                                 method=self.method)
        a, b = self, other
        funcs = []
        for r in range(3):
            try:
                a(0.0, r), b(0.0, r)
            except DomainError:
                break
            funcs.append(lambda t, r=r: op(a(t, r), b(t, r)))
        return PeriodicFunction("analytic", funcs=funcs)

    def __add__(self, other):
        return self._combine(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __rsub__(self, other):
        return (-self)._combine(other, np.add)

    def __mul__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        c = float(c)
        if self.kind == "fourier":
            return PeriodicFunction.fourier(c * self._const, c * self._cos, c * self._sin)
        if self.kind == "samples":
            return PeriodicFunction.from_samples(c * self._values, method=self.method)
        return PeriodicFunction("analytic", funcs=[
            (lambda t, g=g: c * g(t)) for g in self._funcs])

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __repr__(self):
        if self.kind == "fourier":
            return (f"PeriodicFunction.fourier({self._const!r}, "
                    f"cos={self._cos.tolist()!r}, sin={self._sin.tolist()!r})")
        if self.kind == "samples":
            return f"PeriodicFunction.from_samples(<{self.n} values>)"
        return f"PeriodicFunction.analytic(<{len(self._funcs)} callables>)"

    # -- serialisation ----------------------------------------------------
    def to_dict(self, n=DEFAULT_N):
        """JSON-ready dict. Analytic functions are written as grid samples."""
        if self.kind == "fourier":
            return {"kind": "fourier", "const": self._const,
                    "cos": self._cos.tolist(), "sin": self._sin.tolist()}
        values = self._values if self.kind == "samples" else self.sample(n)
        return {"kind": "samples", "values": np.asarray(values).tolist()}

    @classmethod
    def from_dict(cls, d):
        kind = d.get("kind")
        if kind == "fourier":
            return cls.fourier(d.get("const", 0.0), d.get("cos", ()), d.get("sin", ()))
        if kind == "samples":
            return cls.from_samples(d["values"])
        raise DomainError(f"unknown PeriodicFunction kind {kind!r}")

    def to_json(self, n=DEFAULT_N):
        return json.dumps(self.to_dict(n))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def eval_derivatives(g: PeriodicFunction, theta, order=0):
    """``g``, ``g'`` or ``g''`` at ``theta``."""
    return g(theta, order)
