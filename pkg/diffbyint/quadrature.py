"""Numerical integration on finite intervals.

`integrate` is a globally adaptive Gauss-Legendre scheme: every panel is
evaluated with a 10 and a 21 point rule and the panel with the largest
disagreement is bisected next. Gauss nodes never touch the panel ends, so
integrands like exp(1/(t^2-1)) are never evaluated at t = +-1.

`antiderivative` tabulates the antiderivative vanishing at the left end of
an interval on a uniform grid. The result is itself a valid integrand, so
repeated antiderivatives are built by composition.
"""

import heapq
import itertools
import logging
import math

from functools import cache

import numpy as np
from scipy.special import roots_legendre

from diffbyint.datatypes import GridFunction, QuadratureResult
from diffbyint.exceptions import NonFiniteSample, OutOfRange

logger = logging.getLogger(__name__)

LOW_ORDER = 10
HIGH_ORDER = 21
CELL_POINTS = 8

DEFAULT_ABS_TOL = 1e-12
DEFAULT_MAX_SUBDIV = 40
DEFAULT_MAX_PANELS = 2000
DEFAULT_GRID_SIZE = 4097
DEFAULT_INTERPOLATION_DEGREE = 7
MIN_GRID_SIZE = 16

# Disagreements below this multiple of sum(w|f|) are floating point noise.
ROUNDOFF_FACTOR = 50.0 * np.finfo(float).eps


@cache
def gauss_legendre(npoints):
    """Return cached Gauss-Legendre nodes and weights on [-1, 1]."""
    nodes, weights = roots_legendre(npoints)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def sample(f, points):
    """Evaluate f at an array of points.

    Vectorized callables are called once. Callables that only accept
    scalars are detected by the error (or wrong shape) they produce and
    evaluated point by point. Non-finite samples raise NonFiniteSample.
    """
    points = np.asarray(points, dtype=float)
    try:
        values = np.asarray(f(points), dtype=float)
    except (TypeError, ValueError):
        values = None

    if values is not None and values.ndim == 0:
        values = np.full(points.shape, float(values))
    elif values is None or values.shape != points.shape:
        values = np.array([float(f(p)) for p in points.ravel()]).reshape(points.shape)

    finite = np.isfinite(values)
    if not finite.all():
        bad = points[~finite]
        raise NonFiniteSample(
            f"Integrand returned non-finite values at {len(bad)} point(s), e.g. t={bad[0]!r}.",
            points=bad,
        )
    return values


def _panel(f, a, b):
    """Integrate f over one panel with two Gauss rules.

    Returns (value, error, settled, evaluations). A panel is settled when
    the two rules agree to within roundoff, so bisecting it cannot help.
    """
    low_nodes, low_weights = gauss_legendre(LOW_ORDER)
    high_nodes, high_weights = gauss_legendre(HIGH_ORDER)
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)

    points = center + half * np.concatenate((low_nodes, high_nodes))
    values = sample(f, points)
    low = half * np.dot(low_weights, values[:LOW_ORDER])
    high = half * np.dot(high_weights, values[LOW_ORDER:])

    roundoff = ROUNDOFF_FACTOR * half * np.dot(high_weights, np.abs(values[LOW_ORDER:]))
    difference = abs(high - low)
    return float(high), float(max(difference, roundoff)), difference <= roundoff, points.size


def integrate(
    f,
    a,
    b,
    abs_tol=DEFAULT_ABS_TOL,
    max_subdiv=DEFAULT_MAX_SUBDIV,
    max_panels=DEFAULT_MAX_PANELS,
):
    """Integrate f over [a, b] to an absolute tolerance.

    max_subdiv bounds the bisection depth of a single panel, max_panels the
    total number of panels. When the tolerance cannot be met the result is
    still returned, with `converged` set to False.
    """
    if not a < b:
        raise OutOfRange(f"Integration needs a < b, got [{a}, {b}].")
    if not abs_tol > 0.0:
        raise ValueError(f"Absolute tolerance has to be positive, got {abs_tol}.")

    tie_breaker = itertools.count()
    refinable = []
    settled = []

    def add(lower, upper, depth, panel):
        value, error, is_settled, _evaluations = panel
        if is_settled or depth >= max_subdiv:
            settled.append((value, error))
        else:
            heapq.heappush(refinable, (-error, next(tie_breaker), lower, upper, depth, value))

    first = _panel(f, a, b)
    evaluations = first[3]
    total_error = first[1]
    add(a, b, 0, first)
    panels = 1

    while refinable and total_error > abs_tol and panels < max_panels:
        negative_error, _, lower, upper, depth, _value = heapq.heappop(refinable)
        middle = 0.5 * (lower + upper)
        left = _panel(f, lower, middle)
        right = _panel(f, middle, upper)
        evaluations += left[3] + right[3]
        panels += 1
        total_error += left[1] + right[1] + negative_error
        add(lower, middle, depth + 1, left)
        add(middle, upper, depth + 1, right)

    leaves = settled + [(entry[5], -entry[0]) for entry in refinable]
    value = math.fsum(leaf[0] for leaf in leaves)
    error = math.fsum(leaf[1] for leaf in leaves)
    converged = error <= abs_tol

    if not converged:
        logger.warning(
            "Quadrature on [%g, %g] did not converge: error estimate %.3e > %.3e after %d panels.",
            a,
            b,
            error,
            abs_tol,
            panels,
        )
    return QuadratureResult(
        value=value,
        error_estimate=error,
        evaluations=evaluations,
        converged=converged,
        panels=panels,
    )


def cell_integrals(f, nodes):
    """Integrate f over every cell between consecutive nodes."""
    gauss_nodes, gauss_weights = gauss_legendre(CELL_POINTS)
    centers = 0.5 * (nodes[1:] + nodes[:-1])
    halves = 0.5 * np.diff(nodes)
    points = centers[:, np.newaxis] + halves[:, np.newaxis] * gauss_nodes[np.newaxis, :]
    return halves * (sample(f, points) @ gauss_weights)


def antiderivative(
    k,
    grid_size=DEFAULT_GRID_SIZE,
    interpolation_degree=DEFAULT_INTERPOLATION_DEGREE,
    a=-1.0,
    b=1.0,
):
    """Tabulate G(t) = int_a^t k on a uniform grid, with G(a) = 0 exactly."""
    if grid_size < MIN_GRID_SIZE:
        raise ValueError(f"Grid size has to be at least {MIN_GRID_SIZE}, got {grid_size}.")
    if not a < b:
        raise OutOfRange(f"Antiderivative needs a < b, got [{a}, {b}].")

    nodes = np.linspace(a, b, grid_size)
    values = np.concatenate(([0.0], np.cumsum(cell_integrals(k, nodes))))
    return GridFunction(nodes, values, interpolation_degree)
