"""Weight functions and kernels for differentiation by integration.

A weight w on [-1, 1] that vanishes at +-1 together with its first n-1
derivatives and integrates to one yields the kernel k = w^(n) for

    f^(n)(x0) ~ (-1/h)^n * int_{-1}^{1} k(t) f(x0 + h t) dt.

Kernels store w^(n) itself, the (-1/h)^n factor is applied by the
differentiator. Built-ins are addressable by id through REGISTRY:
`lanczos`, `constant`, `legendre:<n>`, `bump:<n>` and `fabius:<n>`.
"""

import logging
import math

from dataclasses import dataclass
from fractions import Fraction
from functools import cache

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as poly

from diffbyint import fabius
from diffbyint import suggestions
from diffbyint.datatypes import KernelSpec, Provenance, WeightSpec, match_shape
from diffbyint.exceptions import (
    KernelOverflow,
    OrderMismatch,
    UnknownKernel,
    UnsupportedOrder,
)

logger = logging.getLogger(__name__)

# int_{-1}^{1} exp(1/(t^2 - 1)) dt
BUMP_NORMALIZATION = 0.4439938161680786

EXACT_FLOAT_INTEGERS = 2**53


def _on_support(t, values, closed=True):
    """Zero out values outside [-1, 1] (or outside (-1, 1) if not closed)."""
    t_arr = np.asarray(t, dtype=float)
    inside = np.abs(t_arr) <= 1.0 if closed else np.abs(t_arr) < 1.0
    return match_shape(np.where(inside, values, 0.0), t)


def _polynomial_weight(weight_id, polynomial, factor):
    """Weight factor * p(t) on [-1, 1] with all derivatives.

    p has integer coefficients, so endpoint values of its derivatives are
    exact as long as they stay below 2^53.
    """

    def evaluator(p):
        return lambda t: _on_support(t, factor * p(np.asarray(t, dtype=float)))

    return WeightSpec(
        weight_id,
        evaluator(polynomial),
        lambda k: evaluator(polynomial.deriv(k)),
        max_deriv_order=None,
    )


def lanczos_weight():
    """w(t) = 3/4 (1 - t^2), the weight behind Lanczos' derivative."""
    return _polynomial_weight("lanczos", Polynomial([1, 0, -1]), 0.75)


def constant_weight():
    """w(t) = 1/2, which recovers the central difference quotient."""
    return _polynomial_weight("constant", Polynomial([1]), 0.5)


def kernel_from_weight(weight, n, kernel_id=None):
    """Turn a weight into the kernel w^(n) of order n."""
    return KernelSpec(
        kernel_id or f"{weight.id}:{n}",
        n,
        weight.derivative(n),
        Provenance.DERIVATIVE_OF_WEIGHT,
        resolution=weight.resolution(n) if weight.resolution else None,
    )


def lanczos_kernel():
    """k(t) = -3/2 t."""
    return kernel_from_weight(lanczos_weight(), 1, kernel_id="lanczos")


def direct_kernel(evaluate, order, kernel_id="user"):
    """Wrap a user supplied kernel callable with its claimed order."""
    return KernelSpec(kernel_id, order, evaluate, Provenance.DIRECT)


def scaled_kernel(kernel, factor, kernel_id=None):
    """Return the kernel multiplied by a constant factor."""
    evaluate = kernel.eval
    return KernelSpec(
        kernel_id or f"{kernel.id}*{factor:g}",
        kernel.order,
        lambda t: match_shape(factor * np.asarray(evaluate(t), dtype=float), t),
        kernel.provenance,
        scale=kernel.scale * factor,
        exact_normalization=kernel.exact_normalization,
        resolution=kernel.resolution,
    )


def interval_weight(weight, x0, h):
    """The weight on [x0 - h, x0 + h]: w_h(x) = w((x - x0) / h) / h."""
    if not h > 0.0:
        raise ValueError(f"Step half-width h has to be positive, got {h}.")
    return lambda x: match_shape(
        np.asarray(weight.eval((np.asarray(x, dtype=float) - x0) / h)) / h, x
    )


def double_factorial(m):
    """Exact m!! for m >= -1."""
    if m < -1:
        raise ValueError(f"Double factorial is undefined for {m}.")
    return math.prod(range(m, 0, -2))


def rodrigues_integral(n):
    """Exact int_{-1}^{1} (x^2 - 1)^n dx = (-1)^n n! 2^(n+1) / (2n+1)!!."""
    return Fraction((-1) ** n * math.factorial(n) * 2 ** (n + 1), double_factorial(2 * n + 1))


def legendre_polynomial(n, x):
    """P_n(x) by the three-term recurrence (m+1) P_{m+1} = (2m+1) x P_m - m P_{m-1}."""
    if n < 0:
        raise UnsupportedOrder(f"Legendre polynomials need n >= 0, got {n}.")
    x_arr = np.asarray(x, dtype=float)
    previous = np.ones_like(x_arr)
    if n == 0:
        return match_shape(previous, x)
    current = x_arr.copy()
    for m in range(1, n):
        previous, current = current, ((2 * m + 1) * x_arr * current - m * previous) / (m + 1)
    return match_shape(current, x)


def _legendre_constant(n):
    """(-1)^n (2n+1)!! / 2 and whether it is exact in floating point."""
    numerator = (-1) ** n * double_factorial(2 * n + 1)
    try:
        constant = numerator / 2
    except OverflowError as err:
        raise KernelOverflow(
            f"(2n+1)!! for n={n} exceeds the floating point range."
        ) from err
    exact = abs(numerator) <= EXACT_FLOAT_INTEGERS
    if not exact:
        logger.warning(
            "(2n+1)!! for n=%d exceeds 2^53 and is rounded to floating point.", n
        )
    return constant, exact


def legendre_kernel(n):
    """k_n(x) = (-1)^n / 2 * (2n+1)!! * P_n(x)."""
    if n < 1:
        raise UnsupportedOrder(f"Legendre kernels need n >= 1, got {n}.")
    constant, exact = _legendre_constant(n)

    def kernel(t):
        return _on_support(t, constant * np.asarray(legendre_polynomial(n, t)))

    return KernelSpec(
        f"legendre:{n}", n, kernel, Provenance.DIRECT, exact_normalization=exact
    )


def legendre_weight(n):
    """The weight whose n-th derivative is legendre_kernel(n).

    w(t) = (2n+1)!! / (2^(n+1) n!) * (1 - t^2)^n, which is the Lanczos
    weight for n = 1.
    """
    if n < 1:
        raise UnsupportedOrder(f"Legendre weights need n >= 1, got {n}.")
    constant = Fraction(double_factorial(2 * n + 1), 2 ** (n + 1) * math.factorial(n))
    return _polynomial_weight(f"legendre:{n}", Polynomial([1, 0, -1]) ** n, float(constant))


def _exact_series(coefficients):
    """Object array of exact coefficients, so numpy keeps Python ints."""
    return np.array(coefficients, dtype=object)


@dataclass(frozen=True)
class RationalPrefactor:
    """Numerator polynomial Q_n of the bump derivatives.

    d^n/dt^n exp(1/(t^2-1)) = Q_n(t) / (t^2-1)^(2n) * exp(1/(t^2-1)),
    with integer coefficients in ascending powers of t.
    """

    order: int
    coefficients: tuple

    @classmethod
    def initial(cls):
        return cls(0, (1,))

    def next(self):
        """Q_{n+1} = (t^2-1)^2 Q_n' - (4n t (t^2-1) + 2t) Q_n."""
        n = self.order
        q = _exact_series(self.coefficients)
        squared = _exact_series([1, 0, -2, 0, 1])
        factor = _exact_series([0, 2 - 4 * n, 0, 4 * n])
        following = poly.polysub(
            poly.polymul(squared, poly.polyder(q)), poly.polymul(factor, q)
        )
        return RationalPrefactor(n + 1, tuple(int(c) for c in following))

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def __call__(self, t):
        return poly.polyval(np.asarray(t, dtype=float), [float(c) for c in self.coefficients])


@cache
def bump_prefactor(n):
    """Q_n for n >= 0."""
    if n < 0:
        raise UnsupportedOrder(f"Prefactors need n >= 0, got {n}.")
    if n == 0:
        return RationalPrefactor.initial()
    return bump_prefactor(n - 1).next()


def _bump_derivative(n):
    """Callable for w_e^(n), exactly zero for |t| >= 1."""
    prefactor = bump_prefactor(n)

    def evaluate(t):
        t_arr = np.asarray(t, dtype=float)
        values = np.zeros_like(t_arr)
        inside = np.abs(t_arr) < 1.0
        inner = t_arr[inside]
        s = inner * inner - 1.0
        # Q_n / s^(2n) * exp(1/s) with the power folded into the exponent
        values[inside] = prefactor(inner) * np.exp(1.0 / s - 2 * n * np.log(-s))
        return match_shape(values / BUMP_NORMALIZATION, t)

    return evaluate


def bump_weight():
    """w_e(t) = exp(1/(t^2-1)) / K on (-1, 1), zero elsewhere."""
    return WeightSpec(
        "bump",
        _bump_derivative(0),
        _bump_derivative,
        max_deriv_order=None,
        endpoint_limits=True,
    )


def bump_kernel(n):
    """w_e^(n) for n >= 1."""
    if n < 1:
        raise UnsupportedOrder(f"Bump kernels need n >= 1, got {n}.")
    return KernelSpec(f"bump:{n}", n, _bump_derivative(n), Provenance.DERIVATIVE_OF_WEIGHT)


def _fabius_derivative(n, table):
    """Callable for Fb^(n)(t + 1) = 2^(n(n+1)/2) Fb(2^n (t + 1)) on (-1, 1)."""
    if n < 0 or n > table.max_order:
        raise UnsupportedOrder(
            f"Fabius kernels are available for 1 <= n <= {table.max_order}, got {n}."
        )

    def evaluate(t):
        t_arr = np.asarray(t, dtype=float)
        inside = np.abs(t_arr) < 1.0
        shifted = np.where(inside, t_arr + 1.0, 0.0)
        values = table.eval_derivative(shifted, n)
        return match_shape(np.where(inside, values, 0.0), t)

    return evaluate


def _fabius_resolution(n):
    """Fb^(n)(t + 1) repeats the shape of Fb on intervals of length 2^-n."""
    return 2.0**-n


def fabius_weight(table=None):
    """w_Fb(t) = Fb(t + 1)."""
    table = table or fabius.default_table()
    return WeightSpec(
        "fabius",
        _fabius_derivative(0, table),
        lambda k: _fabius_derivative(k, table),
        max_deriv_order=table.max_order,
        endpoint_limits=True,
        resolution=_fabius_resolution,
    )


def fabius_kernel(n, table=None):
    """2^(n(n+1)/2) Fb(2^n (t + 1)) for 1 <= n <= the table's max_order."""
    if n < 1:
        raise UnsupportedOrder(f"Fabius kernels need n >= 1, got {n}.")
    table = table or fabius.default_table()
    return KernelSpec(
        f"fabius:{n}",
        n,
        _fabius_derivative(n, table),
        Provenance.DERIVATIVE_OF_WEIGHT,
        resolution=_fabius_resolution(n),
    )


@dataclass(frozen=True)
class RegistryEntry:
    """A family of built-in weights and kernels.

    `fixed_order` is set for families with a single order. Factories take
    the order (and the Fabius table, which only the fabius family uses).
    """

    family: str
    description: str
    weight: object = None
    kernel: object = None
    fixed_order: int | None = None

    def id_pattern(self):
        return self.family if self.fixed_order else f"{self.family}:<n>"

    def orders(self, fabius_max_order=fabius.DEFAULT_MAX_ORDER):
        if self.fixed_order:
            return str(self.fixed_order)
        if self.family == "fabius":
            return f"1..{fabius_max_order}"
        return "1.."


REGISTRY = {
    "lanczos": RegistryEntry(
        "lanczos",
        "Lanczos weight 3/4 (1 - t^2), kernel -3/2 t",
        weight=lambda n, table: lanczos_weight(),
        kernel=lambda n, table: lanczos_kernel(),
        fixed_order=1,
    ),
    "constant": RegistryEntry(
        "constant",
        "constant weight 1/2 (boundary terms only, central difference)",
        weight=lambda n, table: constant_weight(),
        fixed_order=1,
    ),
    "legendre": RegistryEntry(
        "legendre",
        "Legendre kernel (-1)^n/2 (2n+1)!! P_n",
        weight=lambda n, table: legendre_weight(n),
        kernel=lambda n, table: legendre_kernel(n),
    ),
    "bump": RegistryEntry(
        "bump",
        "exponential bump weight exp(1/(t^2-1)) / K and its derivatives",
        weight=lambda n, table: bump_weight(),
        kernel=lambda n, table: bump_kernel(n),
    ),
    "fabius": RegistryEntry(
        "fabius",
        "shifted Fabius weight Fb(t + 1) and kernels 2^(n(n+1)/2) Fb(2^n (t + 1))",
        weight=lambda n, table: fabius_weight(table),
        kernel=lambda n, table: fabius_kernel(n, table),
    ),
}


def parse_id(entry_id, order=None):
    """Split 'family:<n>' and reconcile it with an explicitly requested order.

    Returns (registry entry, order).
    """
    family, _, suffix = entry_id.strip().partition(":")
    try:
        entry = REGISTRY[family]
    except KeyError:
        raise UnknownKernel(
            suggestions.fix_unknown_id(entry_id, [e.id_pattern() for e in REGISTRY.values()])
        ) from None

    id_order = None
    if suffix:
        try:
            id_order = int(suffix)
        except ValueError:
            raise UnknownKernel(f"Invalid order '{suffix}' in id '{entry_id}'.") from None
        if entry.fixed_order:
            raise UnknownKernel(f"'{family}' has the fixed order {entry.fixed_order}.")

    candidates = {o for o in (id_order, order, entry.fixed_order) if o is not None}
    if len(candidates) > 1:
        raise OrderMismatch(f"Id '{entry_id}' does not match the requested order {order}.")
    if not candidates:
        raise UnsupportedOrder(f"Id '{entry_id}' needs an order, e.g. '{family}:1'.")
    return entry, candidates.pop()


def resolve_kernel(kernel_id, order=None, table=None):
    """Look up a built-in kernel by id."""
    entry, n = parse_id(kernel_id, order)
    if entry.kernel is None:
        raise UnknownKernel(
            f"'{entry.family}' is a weight without a valid kernel, use it as a weight."
        )
    return entry.kernel(n, table)


def resolve_weight(weight_id, order=None, table=None):
    """Look up a built-in weight by id. Returns (weight, order)."""
    entry, n = parse_id(weight_id, order)
    return entry.weight(n, table), n


def list_entries(fabius_max_order=fabius.DEFAULT_MAX_ORDER):
    """Rows of (id pattern, provides, orders, description) for every family.

    Fabius kernels are listed up to the order a table built with
    fabius_max_order supports, the table itself is not built.
    """
    rows = []
    for entry in REGISTRY.values():
        provides = "weight, kernel" if entry.kernel else "weight"
        orders = entry.orders(fabius_max_order)
        rows.append((entry.id_pattern(), provides, orders, entry.description))
    return rows
