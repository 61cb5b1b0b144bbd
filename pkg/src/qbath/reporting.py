"""Delimited output: CSV files with an embedded re-parseable config header.

Floats are emitted with a fixed number of significant digits (17 by default)
so that repeated runs are byte-identical and diffs are meaningful.
"""

import json
import os

import numpy as np

CONFIG_PREFIX = "# config: "


def format_value(value, precision: int = 17) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"%.{precision}g" % float(value)
    return str(value)


def write_csv(path, header, rows, config: dict | None = None, precision: int = 17) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    lines = []
    if config is not None:
        lines.append(CONFIG_PREFIX + json.dumps(config, sort_keys=True, separators=(",", ":")))
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(format_value(v, precision) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_config_comment(path) -> dict | None:
    """Recover the embedded effective config from a CSV produced here."""
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
    if first.startswith(CONFIG_PREFIX):
        return json.loads(first[len(CONFIG_PREFIX):])
    return None


def read_csv(path):
    """(header, rows of floats) for quick programmatic reads; skips comments."""
    header = None
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
            else:
                rows.append([float(x) for x in line.split(",")])
    return header, np.array(rows)
