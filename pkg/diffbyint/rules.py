"""This file contains the validity conditions for weights and kernels.

Each condition measures one residual and returns a ConditionResidual
containing the condition id, a residual, the tolerance and whether the
condition holds. The conditions are documented in CONDITIONS.md.
"""

import math

import numpy as np

from diffbyint import quadrature
from diffbyint.exceptions import NonConvergence

# Non-analytic weights are also checked at +-(1 - ENDPOINT_EPSILON)
ENDPOINT_EPSILON = 1e-8
NONNEGATIVITY_SAMPLES = 2001

CONDITION_IDS = {
    "weight_endpoint_zero": "w001",
    "weight_unit_area": "w002",
    "weight_nonnegative": "w003",
    "antiderivative_endpoint_zero": "k001",
    "kernel_unit_area": "k002",
    "kernel_zero_mean": "k003",
    "zero_mean_consistency": "k004",
}


class ConditionResidual:
    """Class to model the outcome of a single validity condition."""

    __slots__ = ("condition", "name", "residual", "tolerance", "passed", "measured", "reason")

    def __init__(self, condition, name, residual, tolerance, measured=None, reason=None, passed=None):
        """Create a new condition outcome.

        Condition is the rule name, name identifies the checked quantity,
        e.g. 'w^(1)(+1)'. The residual is stored as an absolute value;
        unless given explicitly, the condition passes if it does not
        exceed the tolerance. `measured` keeps the raw quantity
        (e.g. the area itself) for callers that need it.
        """
        self.condition = condition
        self.name = name
        self.residual = abs(residual)
        self.tolerance = tolerance
        self.passed = bool(self.residual <= tolerance) if passed is None else passed
        self.measured = measured
        self.reason = reason

    @property
    def id(self):
        return CONDITION_IDS[self.condition]

    def __repr__(self):
        """Print as a log-style record."""
        verdict = "PASS" if self.passed else "FAIL"
        reason = f" ({self.reason})" if self.reason else ""
        return (
            f"[{verdict}] {self.id} {self.condition} {self.name}: "
            f"residual {self.residual:.3e}, tolerance {self.tolerance:.1e}{reason}"
        )

    def __str__(self):
        """Pass on string representation."""
        return self.__repr__()


class ValidationReport:
    """Collect condition outcomes for one weight or kernel."""

    def __init__(self, subject_id, order, conditions, reconstruction_error=None):
        self.subject_id = subject_id
        self.order = order
        self.conditions = list(conditions)
        self.reconstruction_error = reconstruction_error

    @property
    def verdict(self):
        """True iff every condition passes."""
        return bool(self.conditions) and all(c.passed for c in self.conditions)

    def failures(self):
        return [c for c in self.conditions if not c.passed]

    def first_failure(self):
        """The first failing condition in derivation order, or None."""
        failures = self.failures()
        return failures[0] if failures else None

    def get(self, condition):
        """All outcomes of the given condition name."""
        return [c for c in self.conditions if c.condition == condition]

    def rows(self):
        """CSV rows of (condition, residual, tolerance, pass)."""
        return [
            (f"{c.id} {c.condition} {c.name}", c.residual, c.tolerance, c.passed)
            for c in self.conditions
        ]

    def __str__(self):
        lines = [f"Validation of '{self.subject_id}' for order {self.order}"]
        lines.extend(str(c) for c in self.conditions)
        if self.reconstruction_error is not None:
            lines.append(f"Grid refinement changes the area by {self.reconstruction_error:.3e}")
        lines.append("Verdict: valid" if self.verdict else "Verdict: INVALID")
        return "\n".join(lines)


def _area_tolerance(tolerance):
    return max(tolerance * 1e-2, 1e-14)


def weight_endpoint_zero(weight, k, side, tolerance):
    """Ensure w^(k) vanishes at the endpoint side (-1 or +1)."""
    name = f"w^({k})({side:+d})"
    if not weight.has_derivative(k):
        return ConditionResidual(
            "weight_endpoint_zero",
            name,
            math.nan,
            tolerance,
            reason=f"derivative of order {k} is not available, condition untestable",
            passed=False,
        )

    derivative = weight.derivative(k)
    exact = abs(float(derivative(float(side))))
    if not weight.endpoint_limits:
        return ConditionResidual("weight_endpoint_zero", name, exact, tolerance, measured=exact)

    limit = abs(float(derivative(side * (1.0 - ENDPOINT_EPSILON))))
    return ConditionResidual(
        "weight_endpoint_zero",
        name,
        max(exact, limit),
        tolerance,
        measured=exact,
        reason=f"value {exact:.3e}, limit {limit:.3e} at distance {ENDPOINT_EPSILON:g}",
    )


def weight_unit_area(weight, tolerance):
    """Ensure int_{-1}^{1} w = 1."""
    result = quadrature.integrate(weight.eval, -1.0, 1.0, abs_tol=_area_tolerance(tolerance))
    if not result.converged:
        raise NonConvergence("Area integral of the weight did not converge.", result)
    return ConditionResidual(
        "weight_unit_area", "int w", result.value - 1.0, tolerance, measured=result.value
    )


def weight_nonnegative(weight, tolerance, samples=NONNEGATIVITY_SAMPLES):
    """Ensure w >= 0 on a uniform sample of [-1, 1]."""
    values = quadrature.sample(weight.eval, np.linspace(-1.0, 1.0, samples))
    smallest = float(values.min())
    return ConditionResidual(
        "weight_nonnegative", "min w", max(0.0, -smallest), tolerance, measured=smallest
    )


def antiderivative_endpoint_zero(antiderivative, m, tolerance):
    """Ensure the m-th antiderivative k_0^(-m) vanishes at +1.

    The tolerance is relative to the largest tabulated |k_0^(-m)| once
    that exceeds one.
    """
    value = float(antiderivative(1.0))
    magnitude = max(1.0, float(np.max(np.abs(antiderivative.values))))
    reason = None
    if magnitude > 1.0:
        reason = f"tolerance relative to max |k_0^(-{m})| = {magnitude:.3e}"
    return ConditionResidual(
        "antiderivative_endpoint_zero",
        f"k_0^(-{m})(+1)",
        value,
        tolerance * magnitude,
        measured=value,
        reason=reason,
    )


def kernel_unit_area(antiderivative, n, tolerance):
    """Ensure int_{-1}^{1} k_0^(-n) = 1."""
    result = quadrature.integrate(antiderivative, -1.0, 1.0, abs_tol=_area_tolerance(tolerance))
    if not result.converged:
        raise NonConvergence("Area integral of the kernel antiderivative did not converge.", result)
    return ConditionResidual(
        "kernel_unit_area", f"int k_0^(-{n})", result.value - 1.0, tolerance, measured=result.value
    )


def kernel_zero_mean(kernel, tolerance):
    """Ensure int_{-1}^{1} k = 0, the first-order form of k_0^(-1)(+1) = 0."""
    result = quadrature.integrate(kernel.eval, -1.0, 1.0, abs_tol=_area_tolerance(tolerance))
    if not result.converged:
        raise NonConvergence("Integral of the kernel did not converge.", result)
    return ConditionResidual("kernel_zero_mean", "int k", result.value, tolerance, measured=result.value)


def zero_mean_consistency(zero_mean, endpoint, tolerance):
    """Ensure |int k| and |k_0^(-1)(+1)| agree, both measure the same quantity."""
    return ConditionResidual(
        "zero_mean_consistency",
        "|int k| - |k_0^(-1)(+1)|",
        zero_mean.residual - endpoint.residual,
        tolerance,
    )
