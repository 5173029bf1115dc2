"""Render results as human-readable tables or CSV and write them out."""

import csv
import io
import logging
import math

import click

logger = logging.getLogger(__name__)

SWEEP_HEADER = ["h", "estimate", "abs_error", "quad_error"]
REPORT_HEADER = ["condition", "residual", "tolerance", "pass"]
ESTIMATE_HEADER = ["value", "order", "h", "x0", "kernel_id", "quad_error", "converged"]
FABIUS_HEADER = ["x", "m", "value"]
FABIUS_TABLE_HEADER = ["node", "value"]
KERNELS_HEADER = ["id", "provides", "orders", "description"]


def format_float(value):
    """Locale independent, full double precision."""
    if value is None:
        return ""
    value = float(value)
    if math.isnan(value):
        return "nan"
    return f"{value:.17g}"


def _csv(header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _table(header, rows):
    """Align columns with a dashed rule below the header."""
    cells = [list(header)] + [[str(c) for c in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cells[0], widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in cells[1:]:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _sweep_values(row, with_errors):
    errors = [row.abs_error] if with_errors else []
    return [row.h, row.estimate] + errors + [row.quad_error]


def sweep_csv(result):
    """Header `h,estimate,abs_error,quad_error`, without abs_error if there is no reference."""
    with_errors = result.reference is not None
    header = SWEEP_HEADER if with_errors else [c for c in SWEEP_HEADER if c != "abs_error"]
    rows = []
    for row in result.rows:
        values = _sweep_values(row, with_errors)
        rows.append([format_float(v) for v in values])
    return _csv(header, rows)


def sweep_table(result):
    with_errors = result.reference is not None
    header = [c for c in SWEEP_HEADER if with_errors or c != "abs_error"] + ["flag"]
    rows = []
    for row in result.rows:
        values = _sweep_values(row, with_errors)
        rows.append([f"{v:.10g}" for v in values] + [row.flag or ""])

    lines = [f"Sweep of order {result.order} at x0={result.x0!r} with kernel {result.kernel_id}"]
    if with_errors:
        lines.append(f"Reference value {result.reference!r}")
    text = "\n".join(lines) + "\n" + _table(header, rows)
    if result.observed_order is not None:
        text += f"Observed convergence order {result.observed_order:.3f}\n"
    return text


def report_text(report):
    return str(report) + "\n"


def report_csv(report):
    rows = [
        [name, format_float(residual), format_float(tolerance), "true" if passed else "false"]
        for name, residual, tolerance, passed in report.rows()
    ]
    return _csv(REPORT_HEADER, rows)


def estimate_text(estimate):
    return str(estimate) + "\n"


def estimate_csv(estimate):
    row = [
        format_float(estimate.value),
        estimate.order,
        format_float(estimate.h),
        format_float(estimate.x0),
        estimate.kernel_id,
        format_float(estimate.quad_error),
        "true" if estimate.converged else "false",
    ]
    return _csv(ESTIMATE_HEADER, [row])


def fabius_text(x, m, value):
    label = "Fb" if m == 0 else f"Fb^({m})"
    return f"{label}({x!r}) = {value!r}\n"


def fabius_csv(x, m, value):
    return _csv(FABIUS_HEADER, [[format_float(x), m, format_float(value)]])


def fabius_table_csv(table):
    rows = [
        [format_float(node), format_float(value)]
        for node, value in zip(table.base.nodes, table.base.values)
    ]
    return _csv(FABIUS_TABLE_HEADER, rows)


def kernels_table(rows):
    return _table(KERNELS_HEADER, rows)


def kernels_csv(rows):
    return _csv(KERNELS_HEADER, rows)


def write_output(text, output_path=None):
    """Write to the given path, or to stdout if there is none."""
    if output_path is None:
        click.echo(text, nl=False)
        return
    logger.info("Writing output file to: %s", output_path)
    with open(output_path, "w", newline="") as out_file:
        out_file.write(text)
