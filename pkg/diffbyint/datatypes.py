"""This module contains the value types shared across diffbyint.

Most importantly, GridFunction represents sampled functions (repeated
antiderivatives, the Fabius base table) and behaves like any other
vectorized callable, so it can be fed back into the quadrature routines.
"""

import math

from dataclasses import dataclass, field
from enum import StrEnum
from typing import Callable

import numpy as np

from diffbyint.exceptions import OutOfRange, UnsupportedOrder


def match_shape(values, x):
    """Return a float for scalar input and an array otherwise."""
    if np.ndim(x) == 0:
        return float(np.asarray(values).reshape(()))
    return np.asarray(values, dtype=float)


@dataclass(frozen=True, slots=True)
class QuadratureResult:
    """Value and absolute error estimate of a definite integral."""

    value: float
    error_estimate: float
    evaluations: int
    converged: bool = True
    panels: int = 1

    def __post_init__(self):
        if not self.error_estimate >= 0.0:
            raise ValueError(f"Negative error estimate {self.error_estimate}.")
        if self.evaluations < 1:
            raise ValueError("A quadrature result needs at least one evaluation.")


class GridFunction:
    __slots__ = ("nodes", "values", "interpolation_degree", "a", "b", "spacing")

    def __init__(self, nodes, values, interpolation_degree=3):
        """Create a function from values on a uniform grid.

        Between nodes the function is evaluated by Lagrange interpolation
        of the given degree on the surrounding nodes. Stencils are shifted
        inwards at the interval boundaries.
        """
        nodes = np.asarray(nodes, dtype=float)
        values = np.asarray(values, dtype=float)

        if nodes.ndim != 1 or nodes.shape != values.shape:
            raise ValueError("Nodes and values need to be 1D arrays of equal length.")
        if interpolation_degree < 1 or len(nodes) <= interpolation_degree:
            raise ValueError(
                f"Cannot interpolate with degree {interpolation_degree} on {len(nodes)} nodes."
            )
        steps = np.diff(nodes)
        if np.any(steps <= 0.0):
            raise ValueError("Grid nodes have to be strictly increasing.")

        self.nodes = nodes
        self.values = values
        self.interpolation_degree = int(interpolation_degree)
        self.a = float(nodes[0])
        self.b = float(nodes[-1])
        self.spacing = (self.b - self.a) / (len(nodes) - 1)

        if not np.allclose(steps, self.spacing, rtol=1e-9, atol=0.0):
            raise ValueError("Grid nodes have to be uniformly spaced.")

    def __len__(self):
        return len(self.nodes)

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        slack = 1e-12 * (self.b - self.a)
        if np.any(x_arr < self.a - slack) or np.any(x_arr > self.b + slack):
            raise OutOfRange(
                f"Grid function on [{self.a}, {self.b}] evaluated outside its domain."
            )

        degree = self.interpolation_degree
        last = len(self.nodes) - 1
        position = (x_arr - self.a) / self.spacing
        cell = np.clip(np.floor(position).astype(int), 0, last - 1)
        start = np.clip(cell - (degree - 1) // 2, 0, last - degree)
        local = position - start

        result = np.zeros_like(local)
        for j in range(degree + 1):
            basis = np.ones_like(local)
            for m in range(degree + 1):
                if m != j:
                    basis = basis * (local - m) / (j - m)
            result = result + basis * self.values[start + j]
        return match_shape(result, x)

    def __repr__(self):
        return (
            f"GridFunction([{self.a}, {self.b}], {len(self.nodes)} nodes, "
            f"degree {self.interpolation_degree})"
        )


class Provenance(StrEnum):
    """How the values of a kernel are obtained."""

    DERIVATIVE_OF_WEIGHT = "derivative-of-weight"
    DIRECT = "direct"


@dataclass(frozen=True)
class WeightSpec:
    """A weight function w on [-1, 1] and the derivatives it can provide.

    `derivatives` maps an order k >= 1 to a callable for w^(k).
    `max_deriv_order` of None means every order is available.
    Weights that are non-analytic at the endpoints set `endpoint_limits`,
    so their endpoint values are also checked as one-sided limits.
    `resolution` maps an order k to the resolution of w^(k), see KernelSpec.
    """

    id: str
    eval: Callable
    derivatives: Callable | None = None
    max_deriv_order: int | None = 0
    endpoint_limits: bool = False
    resolution: Callable | None = None

    def __call__(self, t):
        return self.eval(t)

    def has_derivative(self, k):
        if k == 0:
            return True
        if self.derivatives is None:
            return False
        return self.max_deriv_order is None or k <= self.max_deriv_order

    def derivative(self, k):
        if k < 0 or not self.has_derivative(k):
            raise UnsupportedOrder(
                f"Weight '{self.id}' does not provide a derivative of order {k}."
            )
        if k == 0:
            return self.eval
        return self.derivatives(k)


@dataclass(frozen=True)
class KernelSpec:
    """A kernel k used as f^(n)(x0) ~ (-1/h)^n * int k(t) f(x0 + h t) dt.

    `resolution` is the length in t over which the kernel changes like a
    smooth function of unit scale. None means the whole interval.
    """

    id: str
    order: int
    eval: Callable
    provenance: Provenance = Provenance.DIRECT
    scale: float = 1.0
    exact_normalization: bool = True
    resolution: float | None = None

    def __post_init__(self):
        if self.order < 1:
            raise UnsupportedOrder(f"Kernel '{self.id}' needs an order >= 1.")

    def __call__(self, t):
        return self.eval(t)


@dataclass(frozen=True, slots=True)
class DerivativeEstimate:
    value: float
    order: int
    h: float
    x0: float
    kernel_id: str
    quad_error: float
    converged: bool = True

    def __post_init__(self):
        if not self.h > 0.0:
            raise OutOfRange(f"Step half-width h has to be positive, got {self.h}.")
        if self.order < 1:
            raise UnsupportedOrder("Derivative order has to be at least 1.")

    def __str__(self):
        status = "" if self.converged else " (quadrature did not converge)"
        return (
            f"f^({self.order})({self.x0!r}) ~ {self.value!r} "
            f"[kernel {self.kernel_id}, h={self.h!r}, quadrature error <= {self.quad_error:.3e}]{status}"
        )


@dataclass(frozen=True, slots=True)
class SweepRow:
    h: float
    estimate: float
    abs_error: float | None
    quad_error: float
    flag: str | None = None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    kernel_id: str
    order: int
    x0: float
    reference: float | None = None
    observed_order: float | None = None
    h_values: tuple = field(init=False)

    def __post_init__(self):
        h_values = tuple(row.h for row in self.rows)
        if any(later >= earlier for earlier, later in zip(h_values, h_values[1:])):
            raise ValueError("Sweep rows have to be ordered by strictly decreasing h.")
        object.__setattr__(self, "h_values", h_values)

    @property
    def flagged(self):
        return [row for row in self.rows if row.flag is not None]

    @property
    def errors(self):
        return [math.nan if row.abs_error is None else row.abs_error for row in self.rows]
