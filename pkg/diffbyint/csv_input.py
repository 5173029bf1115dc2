"""Read CSV files written by diffbyint back in."""

import csv
import logging

import numpy as np

from diffbyint import fabius
from diffbyint import output
from diffbyint.exceptions import CsvFormatError

logger = logging.getLogger(__name__)


def _read_rows(csv_path, required):
    with open(csv_path, "r", newline="") as csv_file:
        reader = csv.DictReader(csv_file)
        missing = [column for column in required if column not in (reader.fieldnames or [])]
        if missing:
            raise CsvFormatError(f"{csv_path} lacks the column(s) {', '.join(missing)}.")
        rows = list(reader)
    logger.debug("Read %d rows from %s", len(rows), csv_path)
    return rows


def _to_float(text, csv_path, line_no):
    try:
        return float(text) if text != "" else None
    except ValueError:
        raise CsvFormatError(f"{csv_path}, row {line_no}: '{text}' is not a number.") from None


def read_sweep_csv(csv_path):
    """Parse a sweep CSV into dictionaries of floats.

    abs_error is None for every row if the column is absent.
    """
    required = [c for c in output.SWEEP_HEADER if c != "abs_error"]
    rows = []
    for line_no, row in enumerate(_read_rows(csv_path, required), 2):
        rows.append(
            {
                column: _to_float(row.get(column, ""), csv_path, line_no)
                for column in output.SWEEP_HEADER
            }
        )
    return rows


def read_fabius_table(csv_path, max_order=fabius.DEFAULT_MAX_ORDER):
    """Load a table written by `fabius --export`; the residual is recomputed."""
    rows = _read_rows(csv_path, output.FABIUS_TABLE_HEADER)
    nodes = np.array([_to_float(row["node"], csv_path, i) for i, row in enumerate(rows, 2)])
    values = np.array([_to_float(row["value"], csv_path, i) for i, row in enumerate(rows, 2)])
    try:
        table = fabius.table_from_values(nodes, values, max_order)
    except (TypeError, ValueError) as err:
        raise CsvFormatError(f"{csv_path} does not contain a Fabius table: {err}") from None
    logger.info("Loaded Fabius table with residual %.3e from %s", table.residual, csv_path)
    return table
