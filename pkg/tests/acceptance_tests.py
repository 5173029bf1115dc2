import math

import numpy as np
import pytest

from diffbyint import corpus
from diffbyint import differentiator
from diffbyint import fabius
from diffbyint import kernels
from diffbyint import quadrature
from diffbyint import validation


def _valid_kernels(max_order):
    """Every built-in kernel family up to the given order."""
    found = [kernels.lanczos_kernel()]
    for n in range(1, max_order + 1):
        found += [kernels.legendre_kernel(n), kernels.bump_kernel(n), kernels.fabius_kernel(n)]
    return found


def test_bump_normalization_constant():
    """This test ensures that K = int exp(1/(t^2-1)) dt is reproduced."""
    result = quadrature.integrate(lambda t: np.exp(1.0 / (t * t - 1.0)), -1.0, 1.0, abs_tol=1e-12)
    assert abs(result.value - 0.4439938161680786) < 1e-12
    assert abs(result.value - kernels.BUMP_NORMALIZATION) < 1e-12

    area = quadrature.integrate(kernels.bump_weight().eval, -1.0, 1.0, abs_tol=1e-12)
    assert abs(area.value - 1.0) < 1e-12


@pytest.mark.parametrize("n", range(1, 7))
def test_legendre_integral_identity(n):
    """int (x^2-1)^n = sqrt(pi) (-1)^n n! / Gamma(n + 3/2)."""
    # Gamma(n + 3/2) = (2n+1)!! sqrt(pi) / 2^(n+1)
    gamma = kernels.double_factorial(2 * n + 1) * math.sqrt(math.pi) / 2 ** (n + 1)
    assert abs(gamma - math.gamma(n + 1.5)) <= 1e-14 * gamma

    expected = math.sqrt(math.pi) * (-1) ** n * math.factorial(n) / gamma
    numeric = quadrature.integrate(lambda x: (x * x - 1.0) ** n, -1.0, 1.0).value
    assert abs(numeric - expected) <= 1e-11 * abs(expected)
    assert abs(float(kernels.rodrigues_integral(n)) - expected) <= 1e-11 * abs(expected)


@pytest.mark.parametrize("n", range(1, 5))
def test_builtin_kernels_are_valid(n):
    """This test ensures that every built-in kernel passes validation."""
    for kernel, tol in (
        (kernels.legendre_kernel(n), 1e-8),
        (kernels.bump_kernel(n), 1e-8),
        (kernels.fabius_kernel(n), 1e-6),
    ):
        report = validation.validate_kernel(kernel, tol, check_refinement=False)
        assert report.verdict, str(report)


def test_validation_is_grid_independent():
    """This test ensures that refining the antiderivative grids changes nothing."""
    for kernel in (kernels.legendre_kernel(2), kernels.bump_kernel(2)):
        report = validation.validate_kernel(kernel, 1e-8, grid_size=2049)
        assert report.verdict
        assert report.reconstruction_error < 1e-9


def _verdicts(grid_size):
    found = {}
    for kernel in [kernels.lanczos_kernel()] + [kernels.legendre_kernel(n) for n in range(1, 7)]:
        found[kernel.id] = validation.validate_kernel(
            kernel, 1e-8, grid_size=grid_size, check_refinement=False
        ).verdict
    for n in range(1, 5):
        kernel = kernels.bump_kernel(n)
        found[kernel.id] = validation.validate_kernel(
            kernel, 1e-8, grid_size=grid_size, check_refinement=False
        ).verdict
    for n in range(1, 9):
        kernel = kernels.fabius_kernel(n)
        found[kernel.id] = validation.validate_kernel(
            kernel, 1e-6, grid_size=grid_size, check_refinement=False
        ).verdict
    for name, evaluate in (
        ("t", lambda t: np.asarray(t, dtype=float)),
        ("t^2", lambda t: np.asarray(t, dtype=float) ** 2),
        ("0.5", lambda t: np.full_like(np.asarray(t, dtype=float), 0.5)),
    ):
        kernel = kernels.direct_kernel(evaluate, 1, kernel_id=name)
        found[name] = validation.validate_kernel(
            kernel, 1e-8, grid_size=grid_size, check_refinement=False
        ).verdict
    return found


def test_verdicts_survive_grid_doubling():
    """This test ensures that every verdict is the same on 4097 and 8193 nodes."""
    coarse = _verdicts(4097)
    fine = _verdicts(8193)
    assert coarse == fine
    assert [name for name, verdict in coarse.items() if not verdict] == ["t", "t^2", "0.5"]


@pytest.mark.parametrize("n", range(1, 5))
def test_weight_kernel_duality(n):
    """This test ensures that valid weights give valid kernels w^(n)."""
    for weight, tol in (
        (kernels.legendre_weight(n), 1e-9),
        (kernels.bump_weight(), 1e-9),
        (kernels.fabius_weight(), 1e-7),
    ):
        assert validation.validate_weight(weight, n, tol).verdict, weight.id
        kernel = kernels.kernel_from_weight(weight, n)
        report = validation.validate_kernel(kernel, 10.0 * tol, check_refinement=False)
        assert report.verdict, str(report)


@pytest.mark.parametrize("n", range(5, 9))
def test_high_order_fabius_kernels_are_valid(n):
    """This test ensures that fabius:5 to fabius:8 pass validation like their weight."""
    weight = kernels.fabius_weight()
    assert validation.validate_weight(weight, n, 1e-7).verdict

    kernel = kernels.kernel_from_weight(weight, n)
    builtin = kernels.resolve_kernel(f"fabius:{n}")
    t = np.linspace(-0.999, 0.999, 101)
    assert np.array_equal(kernel(t), builtin(t))
    assert kernel.resolution == builtin.resolution

    report = validation.validate_kernel(kernel, 1e-6, check_refinement=False)
    assert report.verdict, str(report)


def test_broken_kernels_fail():
    """This test ensures that broken kernels fail with the predicted conditions."""
    unnormalized = validation.validate_kernel(kernels.direct_kernel(lambda t: t, 1), 1e-8)
    assert [c.condition for c in unnormalized.failures()] == ["kernel_unit_area"]

    # k_0^(-1) = (t^3 + 1) / 3 ends at 2/3 and has the area 2/3
    squared = validation.validate_kernel(kernels.direct_kernel(lambda t: t * t, 1), 1e-8)
    assert [c.condition for c in squared.failures()] == [
        "antiderivative_endpoint_zero",
        "kernel_unit_area",
        "kernel_zero_mean",
    ]

    # A weight used as a kernel: k_0^(-1) = (t + 1) / 2 ends at 1 but has the area 1
    constant = validation.validate_kernel(
        kernels.direct_kernel(lambda t: np.full_like(np.asarray(t, dtype=float), 0.5), 1), 1e-8
    )
    assert [c.condition for c in constant.failures()] == [
        "antiderivative_endpoint_zero",
        "kernel_zero_mean",
    ]


def test_bump_prefactors():
    """This test ensures that the prefactor recurrence gives the known numerators.

    The third derivative is printed with an x where t is meant; the
    comparison uses t throughout.
    """
    expected = {
        1: (0, -2),
        2: (-2, 0, 0, 0, 6),
        3: (0, -12, 0, 40, 0, -12, 0, -24),
    }
    for n, coefficients in expected.items():
        prefactor = kernels.bump_prefactor(n)
        assert prefactor.coefficients == coefficients
        assert all(isinstance(c, int) for c in prefactor.coefficients)


@pytest.mark.parametrize("h", [1.0, 0.5, 0.1])
def test_polynomials_are_differentiated_exactly(h):
    """This test ensures that x^n gives n! for every kernel of order n <= 3."""
    for kernel in _valid_kernels(3):
        n = kernel.order
        result = differentiator.estimate(
            lambda x, n=n: np.asarray(x, dtype=float) ** n, 0.5, n, h, kernel, quad_tol=1e-12
        )
        tol = 1e-6 if kernel.id.startswith("fabius") else 1e-8
        assert abs(result.value - math.factorial(n)) < tol, kernel.id


def test_errors_decrease_with_h():
    """This test ensures that the error for exp at 0 shrinks with h."""
    h_values = [0.5, 0.25, 0.125, 0.0625, 0.03125]
    for kernel in _valid_kernels(3):
        result = differentiator.sweep(
            np.exp, 0.0, kernel.order, kernel, h_values, reference=1.0, quad_tol=1e-12
        )
        errors = result.errors
        assert all(later < earlier for earlier, later in zip(errors, errors[1:])), kernel.id
        assert result.observed_order > 1.5


def test_lanczos_sweep_on_sine():
    result = differentiator.sweep(
        np.sin, 0.5, 1, kernels.lanczos_kernel(), [0.1, 0.01, 1e-3], reference=math.cos(0.5)
    )
    assert result.rows[-1].abs_error < 1e-6
    assert result.observed_order is not None


def test_fabius_function():
    """This test ensures that the tabulated Fabius function has its known properties."""
    assert abs(fabius.evaluate(0.5) - 0.5) < 1e-12

    rng = np.random.default_rng(20)
    x = rng.uniform(0.0, 1.0, 1000)
    symmetry = np.abs(fabius.evaluate(x) + fabius.evaluate(1.0 - x) - 1.0)
    assert symmetry.max() <= 1e-10

    area = quadrature.integrate(fabius.evaluate, 0.0, 2.0, abs_tol=1e-12)
    assert abs(area.value - 1.0) < 1e-9

    # Fb'(x) = 2 Fb(2x)
    d = 1e-4
    x = rng.uniform(0.01, 0.99, 100)
    slope = (fabius.evaluate(x + d) - fabius.evaluate(x - d)) / (2.0 * d)
    assert np.abs(slope - 2.0 * fabius.evaluate(2.0 * x)).max() <= 1e-4

    assert abs(fabius.evaluate(0.25) - 5.0 / 72.0) < 1e-6

    # Fb'(x) = 2 Fb(2x) continues to hold on the extension
    table = fabius.default_table()
    d = 1e-5
    x = rng.uniform(d, table.max_argument / 2.0 - d, 2000)
    upper, lower = x + d, x - d
    slope = (table.eval(upper) - table.eval(lower)) / (upper - lower)
    assert np.abs(slope - 2.0 * table.eval(2.0 * x)).max() <= 1e-8


def test_first_order_kernels_agree():
    """This test ensures that different first order kernels converge to the same derivative."""
    spreads = []
    for h in (0.2, 0.1, 0.05, 0.025):
        values = [
            differentiator.estimate(np.exp, 0.3, 1, h, kernel, quad_tol=1e-12).value
            for kernel in (
                kernels.legendre_kernel(1),
                kernels.bump_kernel(1),
                kernels.fabius_kernel(1),
            )
        ]
        spreads.append(max(values) - min(values))
    assert all(later < earlier for earlier, later in zip(spreads, spreads[1:]))
    assert spreads[-1] < 1e-3


def test_wrong_normalization_scales_estimate():
    """This test ensures that a kernel scaled by 2 doubles the derivative."""
    doubled = kernels.scaled_kernel(kernels.lanczos_kernel(), 2.0)
    result = differentiator.estimate(np.exp, 0.0, 1, 1e-3, doubled)
    assert abs(result.value - 2.0) < 1e-4


@pytest.mark.parametrize("function_id", sorted(corpus.CORPUS))
def test_constant_weight_is_central_difference(function_id):
    """This test ensures that the boundary terms of the constant weight are the central difference."""
    function = corpus.parse_function(function_id)
    weight = kernels.constant_weight()
    for x0 in (-0.3, 0.0, 0.7):
        for h in (0.5, 0.1, 1e-3):
            by_parts = differentiator.integration_by_parts_estimate(function, x0, h, weight)
            central = differentiator.central_difference(function, x0, h)
            assert abs(by_parts.value - central) < 1e-12
