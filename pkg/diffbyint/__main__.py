#!/usr/bin/env python
"""Differentiate functions by integration against kernels.

Estimates f^(n)(x0) ~ (-1/h)^n * int_{-1}^{1} k(t) f(x0 + h t) dt, checks
whether weights and kernels are valid for this, runs h-sweeps and evaluates
the Fabius function.
"""
import logging

from dataclasses import dataclass, field

import click

from diffbyint import config as configuration
from diffbyint import corpus
from diffbyint import csv_input
from diffbyint import differentiator
from diffbyint import fabius
from diffbyint import kernels
from diffbyint import output
from diffbyint import validation
from diffbyint.exceptions import DiffByIntError

logger = logging.getLogger("diffbyint")

SUBCOMMANDS = ("diff", "validate", "sweep", "fabius", "kernels")
FORMATS = ("table", "csv")

FLAGS = {"kernel_id": "--kernel", "function_id": "--f", "x0": "--x0"}
SETTING_FLAGS = {"quad_tol": "--quad-tol", "validation_tol": "--tol", "grid_size": "--grid-size"}

EXIT_OK = 0
EXIT_FAILURE = 1


@dataclass
class CliConfig:
    """Everything a subcommand needs, with defaults from the configuration file."""

    subcommand: str
    kernel_id: str | None = None
    weight_id: str | None = None
    order: int | None = None
    function_id: str | None = None
    x0: float | None = None
    h_values: tuple = ()
    reference: float | None = None
    x: float | None = None
    m: int = 0
    table_path: str | None = None
    export_path: str | None = None
    nonnegative: bool = False
    output_format: str = "table"
    output_path: str | None = None
    settings: dict = field(default_factory=lambda: dict(configuration.DEFAULTS))

    def check(self):
        """Ensure the subcommand specific fields are present."""
        if self.subcommand not in SUBCOMMANDS:
            raise click.UsageError(f"Unknown subcommand '{self.subcommand}'.")
        if self.output_format not in FORMATS:
            raise click.BadParameter(
                f"Use one of {', '.join(FORMATS)}.", param_hint="--format"
            )

        match self.subcommand:
            case "diff":
                self._require("kernel_id", "function_id", "x0")
                if len(self.h_values) != 1:
                    raise click.UsageError("diff needs exactly one value of --h.")
            case "sweep":
                self._require("kernel_id", "function_id", "x0")
                if not self.h_values:
                    raise click.UsageError("sweep needs at least one value of --h.")
            case "validate":
                if (self.kernel_id is None) == (self.weight_id is None):
                    raise click.UsageError("validate needs exactly one of --kernel or --weight.")
                if self.nonnegative and self.weight_id is None:
                    raise click.UsageError("--nonnegative only applies to weights.")
            case "fabius":
                if self.x is None and self.export_path is None:
                    raise click.UsageError("fabius needs --x or --export.")
                if self.m < 0:
                    raise click.BadParameter("has to be non-negative.", param_hint="--m")
        return self

    def _require(self, *names):
        missing = [FLAGS[name] for name in names if getattr(self, name) is None]
        if missing:
            raise click.UsageError(
                f"{self.subcommand} needs the option(s) {', '.join(missing)}."
            )


def configure_logging(verbose):
    """No flag logs warnings, -v adds info, -vv debug messages."""
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    logger.setLevel(level)


def fabius_table(settings, table_path=None):
    if table_path is not None:
        return csv_input.read_fabius_table(table_path, settings["fabius_max_order"])
    return fabius.get_table(
        settings["fabius_grid_size"],
        settings["fabius_max_iterations"],
        settings["fabius_tol"],
        settings["fabius_max_order"],
    )


def _table_for(entry_id, settings):
    """Only the fabius family needs a table, which is built on demand."""
    if entry_id.strip().partition(":")[0] == "fabius":
        return fabius_table(settings)
    return None


def _emit(config, table_text, csv_text):
    text = csv_text if config.output_format == "csv" else table_text
    output.write_output(text, config.output_path)


def run_diff(config):
    settings = config.settings
    function = corpus.parse_function(config.function_id)
    (h,) = config.h_values

    if config.kernel_id.strip() == "constant":
        # The constant weight is not a kernel, only its boundary terms contribute
        weight, _n = kernels.resolve_weight("constant", config.order)
        result = differentiator.integration_by_parts_estimate(
            function, config.x0, h, weight, settings["quad_tol"]
        )
    else:
        table = _table_for(config.kernel_id, settings)
        kernel = kernels.resolve_kernel(config.kernel_id, config.order, table)
        result = differentiator.estimate(
            function, config.x0, kernel.order, h, kernel, settings["quad_tol"]
        )

    _emit(config, output.estimate_text(result), output.estimate_csv(result))
    return EXIT_OK if result.converged else EXIT_FAILURE


def run_validate(config):
    settings = config.settings
    tol = settings["validation_tol"]

    if config.weight_id is not None:
        table = _table_for(config.weight_id, settings)
        weight, n = kernels.resolve_weight(config.weight_id, config.order, table)
        report = validation.validate_weight(weight, n, tol, config.nonnegative)
    else:
        table = _table_for(config.kernel_id, settings)
        kernel = kernels.resolve_kernel(config.kernel_id, config.order, table)
        report = validation.validate_kernel(
            kernel, tol, settings["grid_size"], settings["interpolation_degree"]
        )

    _emit(config, output.report_text(report), output.report_csv(report))
    return EXIT_OK if report.verdict else EXIT_FAILURE


def run_sweep(config):
    settings = config.settings
    function = corpus.parse_function(config.function_id)
    table = _table_for(config.kernel_id, settings)
    kernel = kernels.resolve_kernel(config.kernel_id, config.order, table)

    reference = config.reference
    if reference is None:
        reference = function.exact_derivative(kernel.order, config.x0)
        if reference is not None:
            logger.info("Using the exact derivative %r as reference", reference)

    result = differentiator.sweep(
        function,
        config.x0,
        kernel.order,
        kernel,
        config.h_values,
        reference,
        settings["quad_tol"],
    )
    _emit(config, output.sweep_table(result), output.sweep_csv(result))
    return EXIT_FAILURE if result.flagged else EXIT_OK


def run_fabius(config):
    table = fabius_table(config.settings, config.table_path)
    if config.export_path is not None:
        output.write_output(output.fabius_table_csv(table), config.export_path)
    if config.x is not None:
        value = table.eval_derivative(config.x, config.m)
        _emit(
            config,
            output.fabius_text(config.x, config.m, value),
            output.fabius_csv(config.x, config.m, value),
        )
    return EXIT_OK


def run_kernels(config):
    rows = kernels.list_entries(config.settings["fabius_max_order"])
    _emit(config, output.kernels_table(rows), output.kernels_csv(rows))
    return EXIT_OK


def run(config):
    """Execute a checked configuration and return the exit status.

    Invalid input is reported as a click usage error (exit status 2),
    failed computations and failed verdicts return 1.
    """
    config.check()
    handlers = {
        "diff": run_diff,
        "validate": run_validate,
        "sweep": run_sweep,
        "fabius": run_fabius,
        "kernels": run_kernels,
    }
    try:
        return handlers[config.subcommand](config)
    except ValueError as err:
        raise click.UsageError(str(err)) from err
    except DiffByIntError as err:
        click.echo(f"Error: {err}", err=True)
        return EXIT_FAILURE


def _finish(ctx, config):
    ctx.exit(run(config))


format_option = click.option(
    "--format",
    "output_format",
    type=click.Choice(FORMATS),
    default="table",
    show_default=True,
    help="Output as aligned text or as CSV.",
)
out_option = click.option(
    "--out", "output_path", type=click.Path(dir_okay=False), help="Write to a file instead of stdout."
)


@click.group()
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    help="YAML file overriding the numerical defaults.",
)
@click.option("--verbose", "-v", count=True, help="Log progress (-v) and details (-vv).")
@click.pass_context
def main(ctx, config_path, verbose):
    """Provide a central entry point for click group."""
    configure_logging(verbose)
    try:
        ctx.obj = configuration.load_config(config_path)
    except DiffByIntError as err:
        raise click.BadParameter(str(err), param_hint="--config") from err


@main.command()
@click.option("--kernel", "kernel_id", required=True, help="Kernel id, e.g. lanczos or legendre:2.")
@click.option("--n", "order", type=int, help="Derivative order, if the id does not fix it.")
@click.option("--f", "function_id", required=True, help="Function id or poly:c0,c1,...")
@click.option("--x0", type=float, required=True, help="Point of differentiation.")
@click.option("--h", type=float, required=True, help="Half-width of the integration interval.")
@click.option("--quad-tol", type=float, help="Absolute quadrature tolerance.")
@format_option
@out_option
@click.pass_context
def diff(ctx, kernel_id, order, function_id, x0, h, quad_tol, output_format, output_path):
    """Estimate the n-th derivative of a function at x0.

    The kernel `constant` evaluates the boundary terms of the constant
    weight, which gives the central difference quotient.
    """
    settings = _override(ctx.obj, quad_tol=quad_tol)
    config = CliConfig(
        "diff",
        kernel_id=kernel_id,
        order=order,
        function_id=function_id,
        x0=x0,
        h_values=(h,),
        output_format=output_format,
        output_path=output_path,
        settings=settings,
    )
    _finish(ctx, config)


@main.command()
@click.option("--kernel", "kernel_id", help="Kernel id to validate.")
@click.option("--weight", "weight_id", help="Weight id to validate.")
@click.option("--n", "order", type=int, help="Order, if the id does not fix it.")
@click.option("--tol", type=float, help="Tolerance of every condition.")
@click.option("--grid-size", type=int, help="Nodes of the antiderivative grids.")
@click.option("--nonnegative", is_flag=True, help="Also require w >= 0.")
@format_option
@out_option
@click.pass_context
def validate(
    ctx, kernel_id, weight_id, order, tol, grid_size, nonnegative, output_format, output_path
):
    """Check the validity conditions of a weight or kernel.

    Returns a non-zero exit code if any condition fails.
    """
    settings = _override(ctx.obj, validation_tol=tol, grid_size=grid_size)
    config = CliConfig(
        "validate",
        kernel_id=kernel_id,
        weight_id=weight_id,
        order=order,
        nonnegative=nonnegative,
        output_format=output_format,
        output_path=output_path,
        settings=settings,
    )
    _finish(ctx, config)


@main.command()
@click.option("--kernel", "kernel_id", required=True, help="Kernel id.")
@click.option("--n", "order", type=int, help="Derivative order, if the id does not fix it.")
@click.option("--f", "function_id", required=True, help="Function id or poly:c0,c1,...")
@click.option("--x0", type=float, required=True, help="Point of differentiation.")
@click.option(
    "--h", "h_values", type=float, multiple=True, required=True, help="Strictly decreasing h."
)
@click.option("--reference", type=float, help="Exact derivative, defaults to the known one.")
@click.option("--quad-tol", type=float, help="Absolute quadrature tolerance.")
@click.option(
    "--format",
    "output_format",
    type=click.Choice(FORMATS),
    default="csv",
    show_default=True,
    help="Output as aligned text or as CSV.",
)
@out_option
@click.pass_context
def sweep(
    ctx, kernel_id, order, function_id, x0, h_values, reference, quad_tol, output_format, output_path
):
    """Estimate a derivative for a decreasing sequence of h."""
    settings = _override(ctx.obj, quad_tol=quad_tol)
    config = CliConfig(
        "sweep",
        kernel_id=kernel_id,
        order=order,
        function_id=function_id,
        x0=x0,
        h_values=tuple(h_values),
        reference=reference,
        output_format=output_format,
        output_path=output_path,
        settings=settings,
    )
    _finish(ctx, config)


@main.command(name="fabius")
@click.option("--x", type=float, help="Argument, 0 <= x <= 2^(max order + 1).")
@click.option("--m", type=int, default=0, show_default=True, help="Derivative order.")
@click.option("--table", "table_path", type=click.Path(exists=True, dir_okay=False), help="Load a table.")
@click.option("--export", "export_path", type=click.Path(dir_okay=False), help="Save the table as CSV.")
@format_option
@out_option
@click.pass_context
def fabius_command(ctx, x, m, table_path, export_path, output_format, output_path):
    """Evaluate the Fabius function or its m-th derivative."""
    config = CliConfig(
        "fabius",
        x=x,
        m=m,
        table_path=table_path,
        export_path=export_path,
        output_format=output_format,
        output_path=output_path,
        settings=dict(ctx.obj),
    )
    _finish(ctx, config)


@main.command(name="kernels")
@format_option
@out_option
@click.pass_context
def kernels_command(ctx, output_format, output_path):
    """List the built-in weights and kernels with their orders."""
    config = CliConfig(
        "kernels", output_format=output_format, output_path=output_path, settings=dict(ctx.obj)
    )
    _finish(ctx, config)


def _override(settings, **overrides):
    """Explicit flags take precedence over configuration values."""
    merged = dict(settings)
    for key, value in overrides.items():
        if value is None:
            continue
        if not value > 0:
            raise click.BadParameter(f"has to be positive, got {value}.", param_hint=SETTING_FLAGS[key])
        merged[key] = value
    return merged


if __name__ == "__main__":
    main()
