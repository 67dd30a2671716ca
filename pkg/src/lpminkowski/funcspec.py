"""Parse one-line descriptions of periodic functions.

Accepted forms:

* ``const:c``
* ``fourier:c;a1,a2,...;b1,b2,...`` (cosine then sine coefficients)
* a trigonometric sum such as ``2+cos2t`` or ``1 - 0.3*sin(3t) + 0.1cos t``
* inline JSON from :meth:`PeriodicFunction.to_json`
* a path to a file holding such JSON
"""

from __future__ import annotations

import re
from pathlib import Path

from .errors import DomainError
from .periodic import PeriodicFunction

__all__ = ["parse_function", "describe"]

_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_TERM = re.compile(
    rf"(?P<sign>[+-])?(?P<coef>{_NUM})?\*?"
    r"(?:(?P<trig>cos|sin)\(?(?P<k>\d*)\*?(?:theta|t|θ)?\)?)?"
)


def _floats(text):
    text = text.strip()
    return [float(v) for v in text.split(",") if v.strip()] if text else []


def _parse_expression(text):
    s = re.sub(r"\s+", "", text)
    if not s:
        raise DomainError("empty function expression")
    const = 0.0
    cos, sin = {}, {}
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos or not (m["coef"] or m["trig"]):
            raise DomainError(f"cannot parse function expression {text!r} at {s[pos:]!r}")
        if pos > 0 and not m["sign"]:
            raise DomainError(f"missing '+' or '-' before {s[pos:]!r} in {text!r}")
        c = float(m["coef"]) if m["coef"] else 1.0
        if m["sign"] == "-":
            c = -c
        if m["trig"]:
            k = int(m["k"]) if m["k"] else 1
            if k == 0:
                if m["trig"] == "cos":
                    const += c
            else:
                target = cos if m["trig"] == "cos" else sin
                target[k] = target.get(k, 0.0) + c
        else:
            const += c
        pos = m.end()
    top = max([0, *cos, *sin])
    return PeriodicFunction.fourier(const, [cos.get(k, 0.0) for k in range(1, top + 1)],
                                    [sin.get(k, 0.0) for k in range(1, top + 1)])


def parse_function(text):
    """Build a :class:`PeriodicFunction` from ``text``.

    Raises
    ------
    DomainError
        If ``text`` matches none of the accepted forms.
    """
    text = str(text).strip()
    if text.startswith("const:"):
        try:
            return PeriodicFunction.constant(float(text[6:]))
        except ValueError as exc:
            raise DomainError(f"bad constant in {text!r}") from exc
    if text.startswith("fourier:"):
        parts = text[8:].split(";")
        if len(parts) > 3 or not parts[0].strip():
            raise DomainError(f"expected fourier:c;a1,a2,...;b1,b2,..., got {text!r}")
        try:
            const = float(parts[0])
            a = _floats(parts[1]) if len(parts) > 1 else []
            b = _floats(parts[2]) if len(parts) > 2 else []
        except ValueError as exc:
            raise DomainError(f"bad coefficient in {text!r}") from exc
        return PeriodicFunction.fourier(const, a, b)
    if text.startswith("{"):
        try:
            return PeriodicFunction.from_json(text)
        except (ValueError, KeyError) as exc:
            raise DomainError(f"bad function JSON: {exc}") from exc
    path = Path(text)
    if path.suffix == ".json" or path.is_file():
        if not path.is_file():
            raise DomainError(f"function file {text!r} not found")
        return parse_function(path.read_text(encoding="utf-8"))
    return _parse_expression(text)


def describe(f: PeriodicFunction):
    """Short JSON-ready description of ``f`` for run headers."""
    if f.kind == "fourier":
        const, a, b = f.coefficients
        return {"kind": "fourier", "const": const, "cos": a.tolist(), "sin": b.tolist()}
    return {"kind": f.kind}
