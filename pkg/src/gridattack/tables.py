"""Delimited result tables that read back to the values that were written."""

import csv
import io
import math
from pathlib import Path


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ";".join(str(v) for v in value)
    return str(value)


def _parse(text):
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def write_table(rows, columns, out=None):
    """Write ``rows`` (dicts) as CSV with a header; returns the text if ``out`` is None."""
    buf = io.StringIO() if out is None else None
    fh = buf
    if out is not None:
        if isinstance(out, (str, Path)):
            fh = open(out, "w", newline="")
        else:
            fh = out
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format(row[c]) for c in columns])
    finally:
        if isinstance(out, (str, Path)):
            fh.close()
    return buf.getvalue() if buf is not None else None


def read_table(source):
    """Parse a table written by :func:`write_table`; ``source`` is a path or the table text."""
    if isinstance(source, Path) or "\n" not in source:
        text = Path(source).read_text()
    else:
        text = source
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    return [dict(zip(header, (_parse(v) for v in row))) for row in reader]


def same_value(a, b):
    if isinstance(a, float) and isinstance(b, float) and math.isnan(a) and math.isnan(b):
        return True
    return a == b
