"""Derivative estimates by integration and h-sweeps.

For a kernel k of order n,

    f^(n)(x0) ~ (-1/h)^n * int_{-1}^{1} k(t) f(x0 + h t) dt,

where the approximation becomes exact as h -> 0 and, for polynomials of
degree <= n, for every h.
"""

import logging
import math

import numpy as np

from diffbyint import quadrature
from diffbyint.datatypes import DerivativeEstimate, SweepResult, SweepRow
from diffbyint.exceptions import DiffByIntError, OrderMismatch, OutOfRange

logger = logging.getLogger(__name__)

DEFAULT_QUAD_TOL = 1e-10


def _check_step(h):
    if not h > 0.0:
        raise OutOfRange(f"Step half-width h has to be positive, got {h}.")


def _shifted(f, x0, h):
    """t -> f(x0 + h t), tolerant to callables that only accept scalars."""
    return lambda t: quadrature.sample(f, x0 + h * np.asarray(t, dtype=float))


def estimate(f, x0, n, h, kernel, quad_tol=DEFAULT_QUAD_TOL):
    """Estimate f^(n)(x0) with the kernel on [x0 - h, x0 + h].

    The quadrature error estimate is scaled by h^-n, so quad_error shows
    when h is too small for the quadrature tolerance.
    """
    if kernel.order != n:
        raise OrderMismatch(
            f"Kernel '{kernel.id}' has order {kernel.order}, but order {n} was requested."
        )
    _check_step(h)

    shifted = _shifted(f, x0, h)
    kernel_eval = kernel.eval

    def integrand(t):
        return np.asarray(kernel_eval(t), dtype=float) * shifted(t)

    result = quadrature.integrate(integrand, -1.0, 1.0, abs_tol=quad_tol)
    return DerivativeEstimate(
        value=(-1.0 / h) ** n * result.value,
        order=n,
        h=h,
        x0=x0,
        kernel_id=kernel.id,
        quad_error=result.error_estimate * h ** (-n),
        converged=result.converged,
    )


def central_difference(f, x0, h):
    """(f(x0 + h) - f(x0 - h)) / (2h)."""
    _check_step(h)
    return (float(f(x0 + h)) - float(f(x0 - h))) / (2.0 * h)


def integration_by_parts_estimate(f, x0, h, weight, quad_tol=DEFAULT_QUAD_TOL):
    """First derivative including the boundary terms of integration by parts.

        f'(x0) ~ (1/h) [w(t) f(x0 + h t)]_{-1}^{1} - (1/h) int w'(t) f(x0 + h t) dt

    The boundary terms vanish for valid weights. For the constant weight
    1/2 the integral vanishes instead and the central difference remains.
    """
    _check_step(h)
    shifted = _shifted(f, x0, h)
    derivative = weight.derivative(1)

    boundary = float(weight.eval(1.0)) * float(f(x0 + h)) - float(weight.eval(-1.0)) * float(
        f(x0 - h)
    )

    def integrand(t):
        return np.asarray(derivative(t), dtype=float) * shifted(t)

    result = quadrature.integrate(integrand, -1.0, 1.0, abs_tol=quad_tol)
    return DerivativeEstimate(
        value=boundary / h - result.value / h,
        order=1,
        h=h,
        x0=x0,
        kernel_id=weight.id,
        quad_error=result.error_estimate / h,
        converged=result.converged,
    )


def lanczos_derivative(f, x0, h, quad_tol=DEFAULT_QUAD_TOL):
    """Lanczos' derivative 3/(2 h^3) int_{-h}^{h} t f(x0 + t) dt."""
    _check_step(h)

    def integrand(t):
        t = np.asarray(t, dtype=float)
        return t * quadrature.sample(f, x0 + t)

    result = quadrature.integrate(integrand, -h, h, abs_tol=quad_tol)
    factor = 1.5 / h**3
    return DerivativeEstimate(
        value=factor * result.value,
        order=1,
        h=h,
        x0=x0,
        kernel_id="lanczos",
        quad_error=factor * result.error_estimate,
        converged=result.converged,
    )


def observed_order(h_values, errors):
    """Least-squares slope of log(error) over log(h).

    Rows without a finite, positive error are ignored. Returns None if
    fewer than two rows remain.
    """
    h_arr = np.asarray(h_values, dtype=float)
    err_arr = np.asarray(errors, dtype=float)
    usable = np.isfinite(err_arr) & (err_arr > 0.0)
    if usable.sum() < 2:
        return None
    slope, _intercept = np.polyfit(np.log(h_arr[usable]), np.log(err_arr[usable]), 1)
    return float(slope)


def sweep(f, x0, n, kernel, h_values, reference=None, quad_tol=DEFAULT_QUAD_TOL):
    """Estimate f^(n)(x0) for a strictly decreasing sequence of h.

    Rows whose estimate fails are flagged and the sweep continues. With a
    reference value the absolute errors and the observed convergence order
    are reported.
    """
    h_values = [float(h) for h in h_values]
    if not h_values:
        raise ValueError("A sweep needs at least one value of h.")
    for h in h_values:
        _check_step(h)
    if any(later >= earlier for earlier, later in zip(h_values, h_values[1:])):
        raise ValueError("Values of h have to be strictly decreasing.")
    if kernel.order != n:
        raise OrderMismatch(
            f"Kernel '{kernel.id}' has order {kernel.order}, but order {n} was requested."
        )

    rows = []
    for h in h_values:
        try:
            result = estimate(f, x0, n, h, kernel, quad_tol)
        except DiffByIntError as err:
            logger.warning("Sweep row h=%g failed: %s", h, err)
            abs_error = None if reference is None else math.nan
            rows.append(SweepRow(h, math.nan, abs_error, math.nan, str(err)))
            continue

        flag = None
        if not result.converged:
            flag = "quadrature did not converge"
            logger.warning("Sweep row h=%g: %s", h, flag)
        abs_error = None if reference is None else abs(result.value - reference)
        rows.append(SweepRow(h, result.value, abs_error, result.quad_error, flag))

    order = None
    if reference is not None:
        order = observed_order(h_values, [row.abs_error for row in rows])
        if order is not None:
            logger.info("Observed convergence order %.3f", order)

    return SweepResult(tuple(rows), kernel.id, n, x0, reference, order)
