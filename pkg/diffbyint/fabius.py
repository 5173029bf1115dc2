"""Evaluate the Fabius function Fb and its derivatives.

Fb is the smooth function with Fb'(x) = 2 Fb(2x), Fb(0) = 0 and
Fb(1 - x) = 1 - Fb(x) on [0, 1]. On [0, 1] it is tabulated as the fixed
point of

    (T F)(x) = int_0^{2x} F(v) dv        for x in [0, 1/2]
    (T F)(x) = 1 - (T F)(1 - x)          for x in [1/2, 1]

starting from F(x) = x. The map halves the distance between iterates, so
convergence is linear with rate 1/2. Beyond [0, 1] the values follow from

    Fb(x) = 1 - Fb(x - 1)          for 1 < x <= 2
    Fb(x) = -Fb(x - 2^m)           for 2^m < x <= 2^(m+1), m >= 1

and derivatives from Fb^(m)(x) = 2^(m(m+1)/2) Fb(2^m x).
"""

import logging

from dataclasses import dataclass
from functools import cache

import numpy as np

from diffbyint import quadrature
from diffbyint.datatypes import GridFunction, match_shape
from diffbyint.exceptions import NonConvergence, OutOfRange, UnsupportedOrder

logger = logging.getLogger(__name__)

DEFAULT_GRID_SIZE = 4097
MIN_GRID_SIZE = 257
DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITERATIONS = 200
DEFAULT_MAX_ORDER = 8
INTERPOLATION_DEGREE = 5


def reduce_argument(x):
    """Map arguments in [0, inf) to [0, 2] and return (reduced, sign)."""
    reduced = np.array(x, dtype=float, copy=True, ndmin=1)
    sign = np.ones_like(reduced)
    while True:
        above = reduced > 2.0
        if not above.any():
            return reduced, sign
        mantissa, exponent = np.frexp(reduced[above])
        # 2^power < x <= 2^(power + 1)
        power = exponent - 1 - (mantissa == 0.5)
        reduced[above] -= np.ldexp(1.0, power)
        sign[above] = -sign[above]


@dataclass(frozen=True)
class FabiusTable:
    """Tabulated Fb on [0, 1] and the metadata of its construction."""

    base: GridFunction
    iterations: int
    residual: float
    max_argument: float
    history: tuple = ()

    @property
    def max_order(self):
        """Largest kernel order n with 2^(n+1) <= max_argument."""
        return int(np.floor(np.log2(self.max_argument))) - 1

    def eval(self, x):
        """Evaluate Fb(x) for 0 <= x <= max_argument."""
        x_arr = np.asarray(x, dtype=float)
        if not np.all((x_arr >= 0.0) & (x_arr <= self.max_argument)):
            raise OutOfRange(
                f"Fabius function is tabulated for 0 <= x <= {self.max_argument}."
            )
        reduced, sign = reduce_argument(x_arr)
        upper = reduced > 1.0
        base = self.base(np.where(upper, reduced - 1.0, reduced))
        values = sign * np.where(upper, 1.0 - base, base)
        return match_shape(values.reshape(x_arr.shape), x)

    def eval_derivative(self, x, m):
        """Evaluate Fb^(m)(x) = 2^(m(m+1)/2) Fb(2^m x)."""
        if m < 0:
            raise UnsupportedOrder(f"Derivative order has to be non-negative, got {m}.")
        scaled = np.ldexp(np.asarray(x, dtype=float), m)
        values = np.ldexp(np.asarray(self.eval(scaled)), m * (m + 1) // 2)
        return match_shape(values, x)


def fixed_point_step(current):
    """Apply the integral map T once to a tabulated iterate on [0, 1]."""
    size = len(current)
    middle = (size - 1) // 2
    cumulative = quadrature.antiderivative(
        current, size, current.interpolation_degree, a=0.0, b=1.0
    )

    values = np.empty(size)
    # (T F)(x_i) = G(x_{2i}) for the left half of the grid
    values[: middle + 1] = cumulative.values[0::2]
    values[middle + 1 :] = 1.0 - values[middle - 1 :: -1]
    values[middle] = 0.5
    return GridFunction(current.nodes, values, current.interpolation_degree)


def _check_grid_size(grid_size):
    if grid_size < MIN_GRID_SIZE:
        raise ValueError(f"Fabius grid needs at least {MIN_GRID_SIZE} nodes, got {grid_size}.")
    if (grid_size - 1) % 2:
        raise ValueError(f"Fabius grid size has to be odd, got {grid_size}.")


def build_table(
    grid_size=DEFAULT_GRID_SIZE,
    max_iterations=DEFAULT_MAX_ITERATIONS,
    tol=DEFAULT_TOL,
    max_order=DEFAULT_MAX_ORDER,
):
    """Iterate the integral map until the sup-norm change drops below tol."""
    _check_grid_size(grid_size)
    if not tol > 0.0:
        raise ValueError(f"Tolerance has to be positive, got {tol}.")

    nodes = np.linspace(0.0, 1.0, grid_size)
    current = GridFunction(nodes, nodes.copy(), INTERPOLATION_DEGREE)
    history = []

    for iteration in range(1, max_iterations + 1):
        following = fixed_point_step(current)
        residual = float(np.max(np.abs(following.values - current.values)))
        history.append(residual)
        current = following
        logger.debug("Fabius iteration %d: residual %.3e", iteration, residual)
        if residual <= tol:
            break
    else:
        table = FabiusTable(
            current, max_iterations, history[-1], 2.0 ** (max_order + 1), tuple(history)
        )
        raise NonConvergence(
            f"Fabius table did not converge: residual {history[-1]:.3e} > {tol:.1e} "
            f"after {max_iterations} iterations.",
            result=table,
        )

    logger.info(
        "Built Fabius table with %d nodes in %d iterations (residual %.3e).",
        grid_size,
        iteration,
        residual,
    )
    return FabiusTable(current, iteration, residual, 2.0 ** (max_order + 1), tuple(history))


def table_from_values(nodes, values, max_order=DEFAULT_MAX_ORDER):
    """Wrap externally tabulated values on [0, 1].

    The residual is measured by applying the integral map once, so a table
    read from disk is verified instead of trusted.
    """
    base = GridFunction(nodes, values, INTERPOLATION_DEGREE)
    if base.a != 0.0 or base.b != 1.0:
        raise OutOfRange(f"Fabius table has to span [0, 1], got [{base.a}, {base.b}].")
    _check_grid_size(len(base))
    residual = float(np.max(np.abs(fixed_point_step(base).values - base.values)))
    return FabiusTable(base, 0, residual, 2.0 ** (max_order + 1), (residual,))


@cache
def get_table(
    grid_size=DEFAULT_GRID_SIZE,
    max_iterations=DEFAULT_MAX_ITERATIONS,
    tol=DEFAULT_TOL,
    max_order=DEFAULT_MAX_ORDER,
):
    """Build a table once per parameter set and share it afterwards."""
    return build_table(grid_size, max_iterations, tol, max_order)


def default_table():
    return get_table()


def evaluate(x):
    """Fb(x) using the default table."""
    return default_table().eval(x)


def evaluate_derivative(x, m):
    """Fb^(m)(x) using the default table."""
    return default_table().eval_derivative(x, m)
