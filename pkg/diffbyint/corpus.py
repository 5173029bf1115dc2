"""Test functions for derivative estimates and sweeps.

Functions are addressed by a small closed grammar: a corpus id such as
`sin` or `abs`, or `poly:c0,c1,...` for c0 + c1 x + c2 x^2 + ... with
coefficients parsed exactly (integers, decimals or fractions like 1/3).
"""

import math

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as poly

from diffbyint import suggestions
from diffbyint.datatypes import match_shape
from diffbyint.exceptions import UnknownFunction

POLY_PREFIX = "poly:"


@dataclass(frozen=True)
class CorpusFunction:
    """A vectorized test function with known derivatives where available.

    `derivative(n, x)` returns f^(n)(x), or None if no closed form is
    known for that order.
    """

    id: str
    f: Callable
    derivative: Callable | None = None
    description: str = ""

    def __call__(self, x):
        return self.f(x)

    def exact_derivative(self, n, x):
        if self.derivative is None:
            return None
        value = self.derivative(n, x)
        if value is None or not math.isfinite(value):
            return None
        return float(value)


def _vectorized(ufunc):
    return lambda x: match_shape(ufunc(np.asarray(x, dtype=float)), x)


def _periodic_derivative(func):
    """Derivatives of sin and cos by phase shifts of n pi / 2."""
    return lambda n, x: float(func(x + n * math.pi / 2))


def _abs_derivative(n, x):
    if n == 1:
        return float(np.sign(x))
    return 0.0 if x != 0.0 else math.nan


def _xabs(x):
    x_arr = np.asarray(x, dtype=float)
    return match_shape(x_arr * np.abs(x_arr), x)


def _xabs_derivative(n, x):
    if n == 1:
        return 2.0 * abs(x)
    if n == 2:
        return 2.0 * float(np.sign(x))
    return 0.0 if x != 0.0 else math.nan


def _tanh_derivative(n, x):
    t = math.tanh(x)
    s = 1.0 - t * t
    match n:
        case 1:
            return s
        case 2:
            return -2.0 * t * s
        case 3:
            return -2.0 * s * (1.0 - 3.0 * t * t)
        case _:
            return None


def _psi(x):
    """exp(-1/x) for x > 0 and 0 otherwise."""
    values = np.zeros_like(x)
    positive = x > 0.0
    values[positive] = np.exp(-1.0 / x[positive])
    return values


def _smoothstep(x):
    """Smooth step from 0 (x <= 0) to 1 (x >= 1), non-analytic at both ends."""
    x_arr = np.asarray(x, dtype=float)
    rising = _psi(x_arr)
    return match_shape(rising / (rising + _psi(1.0 - x_arr)), x)


CORPUS = {
    "sin": CorpusFunction("sin", _vectorized(np.sin), _periodic_derivative(math.sin), "sin(x)"),
    "cos": CorpusFunction("cos", _vectorized(np.cos), _periodic_derivative(math.cos), "cos(x)"),
    "exp": CorpusFunction("exp", _vectorized(np.exp), lambda n, x: math.exp(x), "exp(x)"),
    "abs": CorpusFunction("abs", _vectorized(np.abs), _abs_derivative, "|x|"),
    "xabs": CorpusFunction("xabs", _xabs, _xabs_derivative, "x |x|"),
    "tanh": CorpusFunction("tanh", _vectorized(np.tanh), _tanh_derivative, "tanh(x)"),
    "smoothstep": CorpusFunction(
        "smoothstep",
        _smoothstep,
        None,
        "psi(x) / (psi(x) + psi(1 - x)) with psi(x) = exp(-1/x) for x > 0",
    ),
}


def _parse_coefficients(expr):
    coefficients = []
    for text in expr[len(POLY_PREFIX) :].split(","):
        try:
            coefficients.append(Fraction(text.strip()))
        except (ValueError, ZeroDivisionError):
            raise UnknownFunction(
                f"Invalid polynomial coefficient '{text}' in '{expr}'."
            ) from None
    return coefficients


def _derive_coefficients(coefficients, n):
    """Exact coefficients of the n-th derivative."""
    derived = poly.polyder(np.array(coefficients, dtype=object), n)
    return [Fraction(c) for c in derived]


def polynomial(coefficients, function_id=None):
    """Polynomial test function from exact coefficients in ascending order."""
    coefficients = [Fraction(c) for c in coefficients]
    p = Polynomial([float(c) for c in coefficients])

    def derivative(n, x):
        return float(Polynomial([float(c) for c in _derive_coefficients(coefficients, n)])(x))

    return CorpusFunction(
        function_id or POLY_PREFIX + ",".join(str(c) for c in coefficients),
        lambda x: match_shape(p(np.asarray(x, dtype=float)), x),
        derivative,
        " + ".join(f"{c} x^{i}" for i, c in enumerate(coefficients)),
    )


def parse_function(expr):
    """Resolve a corpus id or a `poly:c0,c1,...` expression."""
    expr = expr.strip()
    if expr.startswith(POLY_PREFIX):
        return polynomial(_parse_coefficients(expr), function_id=expr)
    try:
        return CORPUS[expr]
    except KeyError:
        raise UnknownFunction(
            suggestions.fix_unknown_function(expr, list(CORPUS) + ["poly:c0,c1,..."])
        ) from None
