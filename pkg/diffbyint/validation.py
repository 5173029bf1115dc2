"""Dispatch weights and kernels to their validity conditions."""

import logging

from diffbyint import kernels
from diffbyint import quadrature
from diffbyint import rules
from diffbyint.exceptions import EndpointViolation, NotNormalizable

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
# Areas below this are indistinguishable from zero
MIN_AREA = 1e-13
# Grid cells per resolution length of a kernel
CELLS_PER_RESOLUTION = 256


def validate_weight(weight, n, tol=DEFAULT_TOL, require_nonnegative=False):
    """Check if the weight is valid for differentiation of order n.

    Checks w^(k)(-1) = w^(k)(+1) = 0 for k = 0..n-1 and int w = 1.
    Orders the weight cannot differentiate to are reported as failures.
    """
    logger.info("Validating weight '%s' for order %d", weight.id, n)
    conditions = []
    for k in range(n):
        for side in (-1, 1):
            conditions.append(rules.weight_endpoint_zero(weight, k, side, tol))
    conditions.append(rules.weight_unit_area(weight, tol))
    if require_nonnegative:
        conditions.append(rules.weight_nonnegative(weight, tol))

    report = rules.ValidationReport(weight.id, n, conditions)
    _log_report(report)
    return report


def antiderivative_grid_size(kernel, grid_size=quadrature.DEFAULT_GRID_SIZE):
    """Smallest grid of the form 2^j (grid_size - 1) + 1 resolving the kernel.

    Kernels without a resolution keep grid_size. Otherwise the number of
    cells is doubled until every resolution length of the kernel spans
    CELLS_PER_RESOLUTION cells of [-1, 1].
    """
    if kernel.resolution is None:
        return grid_size
    cells = grid_size - 1
    while cells * kernel.resolution < 2.0 * CELLS_PER_RESOLUTION:
        cells *= 2
    return cells + 1


def kernel_antiderivatives(
    kernel,
    grid_size=quadrature.DEFAULT_GRID_SIZE,
    interpolation_degree=quadrature.DEFAULT_INTERPOLATION_DEGREE,
):
    """Tabulate k_0^(-1), ..., k_0^(-n), each vanishing at -1."""
    antiderivatives = []
    current = kernel.eval
    for _ in range(kernel.order):
        current = quadrature.antiderivative(current, grid_size, interpolation_degree)
        antiderivatives.append(current)
    return antiderivatives


def validate_kernel(
    kernel,
    tol=DEFAULT_TOL,
    grid_size=quadrature.DEFAULT_GRID_SIZE,
    interpolation_degree=quadrature.DEFAULT_INTERPOLATION_DEGREE,
    check_refinement=True,
):
    """Check if the kernel is valid for differentiation of its order n.

    Conditions are reported in derivation order: k_0^(-m)(+1) = 0 for
    m = 1..n, then int k_0^(-n) = 1. For n = 1 the equivalent form
    int k = 0 is added together with a consistency check against
    k_0^(-1)(+1). Kernels with a resolution finer than grid_size can
    resolve are tabulated on a refined grid, see antiderivative_grid_size.
    With check_refinement the area is recomputed on a grid of twice the
    resolution and the change is stored in the report.
    """
    n = kernel.order
    resolved_size = antiderivative_grid_size(kernel, grid_size)
    logger.info("Validating kernel '%s' of order %d on %d nodes", kernel.id, n, resolved_size)
    if resolved_size != grid_size:
        logger.debug(
            "Grid of %d nodes refined to %d for resolution %g",
            grid_size,
            resolved_size,
            kernel.resolution,
        )

    antiderivatives = kernel_antiderivatives(kernel, resolved_size, interpolation_degree)
    conditions = [
        rules.antiderivative_endpoint_zero(antiderivative, m, tol)
        for m, antiderivative in enumerate(antiderivatives, 1)
    ]
    area = rules.kernel_unit_area(antiderivatives[-1], n, tol)
    conditions.append(area)

    if n == 1:
        endpoint = conditions[0]
        zero_mean = rules.kernel_zero_mean(kernel, endpoint.tolerance)
        conditions.append(zero_mean)
        conditions.append(rules.zero_mean_consistency(zero_mean, endpoint, endpoint.tolerance))

    reconstruction_error = None
    if check_refinement:
        refined = kernel_antiderivatives(kernel, 2 * resolved_size - 1, interpolation_degree)
        refined_area = rules.kernel_unit_area(refined[-1], n, tol)
        reconstruction_error = abs(refined_area.measured - area.measured)
        logger.debug("Area changes by %.3e under grid refinement", reconstruction_error)
        if reconstruction_error > tol:
            logger.warning(
                "Area of '%s' changes by %.3e under grid refinement, more than the tolerance %.1e."
                " Increase the grid size.",
                kernel.id,
                reconstruction_error,
                tol,
            )

    report = rules.ValidationReport(kernel.id, n, conditions, reconstruction_error)
    _log_report(report)
    return report


def normalize_kernel(
    kernel,
    tol=DEFAULT_TOL,
    grid_size=quadrature.DEFAULT_GRID_SIZE,
    interpolation_degree=quadrature.DEFAULT_INTERPOLATION_DEGREE,
):
    """Rescale a kernel so that int k_0^(-n) = 1.

    Only the area condition may fail, endpoint violations cannot be fixed
    by scaling.
    """
    report = validate_kernel(
        kernel, tol, grid_size, interpolation_degree, check_refinement=False
    )
    violations = [c for c in report.get("antiderivative_endpoint_zero") if not c.passed]
    if violations:
        raise EndpointViolation(
            f"Kernel '{kernel.id}' cannot be normalized: {violations[0]}",
            report=report,
        )

    area = report.get("kernel_unit_area")[0].measured
    if abs(area) <= MIN_AREA:
        raise NotNormalizable(
            f"Kernel '{kernel.id}' has the area {area:.3e}, which cannot be scaled to one."
        )
    logger.info("Scaling kernel '%s' by %.17g", kernel.id, 1.0 / area)
    return kernels.scaled_kernel(kernel, 1.0 / area)


def _log_report(report):
    for condition in report.conditions:
        logger.debug("%s", condition)
    if not report.verdict:
        logger.info(
            "'%s' is not valid for order %d: %s",
            report.subject_id,
            report.order,
            report.first_failure(),
        )
